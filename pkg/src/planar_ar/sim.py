"""Field generation on a finite lattice.

Deterministic quadrant recurrences are solved directly (with the convolution
form of the explicit solution kept as an independent check), and stationary
fields are sampled either by a truncated causal moving average or by running
the recurrence from a zero boundary over a burn-in margin.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from scipy.signal import convolve2d, fftconvolve

from ._recursion import fill_quadrant
from .acf import AcfGrid
from .errors import LagRangeError, ParameterDomainError, TruncationError
from .ma import psi_table
from .params import ParamSet, canonical_causal, require_causal, require_stationary

__all__ = [
    "Provenance",
    "NoiseKind",
    "FieldGrid",
    "BoundaryData",
    "solve_deterministic",
    "solve_explicit",
    "stability_bound",
    "truncation_size",
    "draw_noise",
    "simulate_stationary",
    "residual_field",
    "empirical_acf",
    "RNG_NAME",
]

MAX_CELLS = 10**8
BLOCK_ROWS = 256
RNG_NAME = f"numpy.random.PCG64 via SeedSequence(seed).spawn, one child per {BLOCK_ROWS}-row block"
DEFAULT_TOL = 1e-8
MIN_MARGIN = 64
MAX_TABLE = 4096


class Provenance(str, enum.Enum):
    DETERMINISTIC = "Deterministic"
    CAUSAL_MA = "CausalMA"
    BOUNDARY_RECURSION = "BoundaryRecursion"


class NoiseKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Values ``x[i, j]`` for ``0 <= i < n_rows``, ``0 <= j < n_cols``."""

    n_rows: int
    n_cols: int
    values: np.ndarray
    provenance: Provenance
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.n_rows, self.n_cols):
            raise ParameterDomainError(
                f"values shape {values.shape} does not match ({self.n_rows}, {self.n_cols})"
            )
        if not np.isfinite(values).all():
            raise ParameterDomainError("field values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "provenance", Provenance(self.provenance))


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Initial values for the quadrant recurrence.

    ``top_row[i - 1]`` is ``x[i, 0]`` and ``left_col[j - 1]`` is ``x[0, j]``;
    ``forcing[i - 1, j - 1]`` is ``v[i, j]`` for ``i, j >= 1``.
    """

    x00: float
    top_row: np.ndarray
    left_col: np.ndarray
    forcing: np.ndarray

    def __post_init__(self):
        top = np.asarray(self.top_row, dtype=float).reshape(-1)
        left = np.asarray(self.left_col, dtype=float).reshape(-1)
        forcing = np.asarray(self.forcing, dtype=float)
        if forcing.ndim != 2 or forcing.shape != (top.size, left.size):
            raise ParameterDomainError(
                f"forcing shape {forcing.shape} inconsistent with boundary lengths "
                f"{top.size} and {left.size}"
            )
        object.__setattr__(self, "x00", float(self.x00))
        object.__setattr__(self, "top_row", top)
        object.__setattr__(self, "left_col", left)
        object.__setattr__(self, "forcing", forcing)

    @property
    def shape(self) -> tuple[int, int]:
        return self.top_row.size + 1, self.left_col.size + 1

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BoundaryData":
        return cls(0.0, np.zeros(n_rows - 1), np.zeros(n_cols - 1), np.zeros((n_rows - 1, n_cols - 1)))

    def max_input(self, p: ParamSet) -> float:
        """The largest effective input entering the explicit solution."""
        parts = [abs(self.x00)]
        if self.top_row.size:
            parts.append((1 + abs(p.a)) * np.abs(self.top_row).max())
        if self.left_col.size:
            parts.append((1 + abs(p.b)) * np.abs(self.left_col).max())
        if self.forcing.size:
            parts.append(np.abs(self.forcing).max())
        return float(max(parts))


def _check_size(n_rows: int, n_cols: int) -> None:
    if n_rows < 1 or n_cols < 1:
        raise ParameterDomainError(f"grid dimensions must be positive, got {n_rows} x {n_cols}")
    if n_rows * n_cols > MAX_CELLS:
        raise ParameterDomainError(f"grid of {n_rows * n_cols} cells exceeds {MAX_CELLS}")


def solve_deterministic(p: ParamSet, bd: BoundaryData) -> FieldGrid:
    """Run ``x[i,j] = a x[i-1,j] + b x[i,j-1] + c x[i-1,j-1] + v[i,j]`` from the boundary."""
    n1, n2 = bd.shape
    _check_size(n1, n2)
    out = np.empty((n1, n2))
    out[0, 0] = bd.x00
    out[1:, 0] = bd.top_row
    out[0, 1:] = bd.left_col
    forcing = np.zeros((n1, n2))
    forcing[1:, 1:] = bd.forcing
    fill_quadrant(out, p.a, p.b, p.c, forcing)
    return FieldGrid(n1, n2, out, Provenance.DETERMINISTIC, meta={"params": p.to_dict(), "solver": "recursion"})


def _effective_input(p: ParamSet, bd: BoundaryData) -> np.ndarray:
    n1, n2 = bd.shape
    v = np.empty((n1, n2))
    v[0, 0] = bd.x00
    col = np.concatenate(([bd.x00], bd.top_row))
    row = np.concatenate(([bd.x00], bd.left_col))
    v[1:, 0] = col[1:] - p.a * col[:-1]
    v[0, 1:] = row[1:] - p.b * row[:-1]
    v[1:, 1:] = bd.forcing
    return v


def solve_explicit(p: ParamSet, bd: BoundaryData) -> FieldGrid:
    """Closed-form solution: the coefficient table convolved with the
    boundary increments and the forcing."""
    require_causal(p, hint="the explicit solution is stated for causal coefficients")
    n1, n2 = bd.shape
    _check_size(n1, n2)
    table = psi_table(p, n1 - 1, n2 - 1)
    x = convolve2d(table.values, _effective_input(p, bd))[:n1, :n2]
    return FieldGrid(n1, n2, x, Provenance.DETERMINISTIC, meta={"params": p.to_dict(), "solver": "explicit"})


def stability_bound(p: ParamSet, bd: BoundaryData) -> float:
    """Upper bound on ``max |x|`` for the solution of the quadrant recurrence:
    ``(sum |psi| + estimated tail) * max effective input``."""
    require_causal(p)
    n1, n2 = bd.shape
    table = psi_table(p, n1 - 1, n2 - 1)
    return (table.abs_sum + table.tail_bound) * bd.max_input(p)


def truncation_size(p: ParamSet, tol: float = DEFAULT_TOL, cap: int = MAX_TABLE) -> tuple[int, float]:
    """Smallest power-of-two table side (at least 64) whose estimated tail is below ``tol``.

    Returns the side and the tail estimate.  Raises :class:`TruncationError`
    if ``cap`` is reached first.
    """
    require_causal(p)
    if not tol > 0:
        raise ParameterDomainError(f"tol must be positive, got {tol}")
    k = MIN_MARGIN
    while True:
        tail = psi_table(p, k, k).tail_bound
        if tail < tol:
            return k, tail
        if 2 * k > cap:
            raise TruncationError(
                f"coefficient tail {tail:.3g} still above tol={tol:g} at table side {k}; "
                f"raise the table cap or loosen tol"
            )
        k *= 2


def draw_noise(shape: tuple[int, int], seed: int, sigma: float = 1.0, noise: NoiseKind | str = NoiseKind.GAUSSIAN) -> np.ndarray:
    """White noise with standard deviation ``sigma``.

    Row blocks of fixed height get their own child stream, so the result
    depends only on ``seed`` and ``shape``, never on how blocks are scheduled.
    """
    noise = NoiseKind(noise)
    n1, n2 = shape
    n_blocks = -(-n1 // BLOCK_ROWS)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    out = np.empty(shape)
    for k, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        rows = slice(k * BLOCK_ROWS, min(n1, (k + 1) * BLOCK_ROWS))
        size = (rows.stop - rows.start, n2)
        if noise is NoiseKind.GAUSSIAN:
            out[rows] = rng.standard_normal(size)
        else:
            # variance-matched uniform
            out[rows] = rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size)
    return sigma * out


def _threads() -> int:
    raw = os.environ.get("PLANAR_AR_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ParameterDomainError(f"PLANAR_AR_THREADS must be an integer, got {raw!r}") from None


def _support(values: np.ndarray) -> np.ndarray:
    """Drop trailing all-zero rows and columns."""
    rows = np.flatnonzero(np.any(values != 0, axis=1))
    cols = np.flatnonzero(np.any(values != 0, axis=0))
    return values[: rows[-1] + 1, : cols[-1] + 1]


def simulate_stationary(
    p: ParamSet,
    n_rows: int,
    n_cols: int,
    seed: int | None = None,
    method: Provenance | str = Provenance.CAUSAL_MA,
    tol: float = DEFAULT_TOL,
    noise: NoiseKind | str = NoiseKind.GAUSSIAN,
    table_cap: int = MAX_TABLE,
    margin: int | None = None,
) -> FieldGrid:
    """Sample the stationary field on an ``n_rows x n_cols`` window.

    Parameters
    ----------
    p : ParamSet
        Any stationary parameters.  Non-causal sets are simulated through
        their causal reparameterization and the lattice axes reversed so the
        output has the autocovariance of ``p``.
    seed : int, optional
        Fresh entropy is drawn (and recorded) when omitted.
    method : {"CausalMA", "BoundaryRecursion"}
    tol : float
        Target for the estimated coefficient tail mass.  Sets the moving
        average truncation or the burn-in margin.
    noise : {"gaussian", "uniform"}
    table_cap : int
        Largest coefficient table side tried before giving up.
    margin : int, optional
        Burn-in margin for ``BoundaryRecursion``; derived from ``tol`` if omitted.
    """
    require_stationary(p)
    method = Provenance(method)
    if method is Provenance.DETERMINISTIC:
        raise ParameterDomainError("method must be CausalMA or BoundaryRecursion")
    _check_size(n_rows, n_cols)
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ParameterDomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    q, m, flip = canonical_causal(p)
    side, tail = truncation_size(q, tol, table_cap)
    sigma = float(np.sqrt(q.sigma2))
    meta = {
        "params": p.to_dict(),
        "canonical": q.to_dict(),
        "transform": m,
        "flip": flip.value,
        "method": method.value,
        "seed": seed,
        "rng": RNG_NAME,
        "noise": NoiseKind(noise).value,
        "tol": tol,
        "tail_estimate": tail,
    }
    if method is Provenance.CAUSAL_MA:
        kernel = _support(psi_table(q, side, side).values)
        k1, k2 = kernel.shape
        eps = draw_noise((n_rows + k1 - 1, n_cols + k2 - 1), seed, sigma, noise)
        if kernel.size == 1:
            x = kernel[0, 0] * eps
        else:
            with scipy.fft.set_workers(_threads()):
                x = fftconvolve(eps, kernel, mode="valid")
        meta["truncation"] = {"table_side": side, "kernel_shape": [k1, k2]}
    else:
        burn = max(MIN_MARGIN, side) if margin is None else int(margin)
        if burn < 0:
            raise ParameterDomainError(f"margin must be nonnegative, got {burn}")
        _check_size(n_rows + burn, n_cols + burn)
        eps = draw_noise((n_rows + burn, n_cols + burn), seed, sigma, noise)
        full = np.zeros(eps.shape)
        forcing = eps.copy()
        forcing[0, :] = 0.0
        forcing[:, 0] = 0.0
        fill_quadrant(full, q.a, q.b, q.c, forcing)
        x = full[burn:, burn:]
        meta["truncation"] = {"burn_in": burn}
    s1, s2 = flip.signs
    x = x[:: s1, :: s2]
    return FieldGrid(n_rows, n_cols, x, method, seed=seed, meta=meta)


def residual_field(p: ParamSet, g: FieldGrid) -> np.ndarray:
    """``x[i,j] - a x[i-1,j] - b x[i,j-1] - c x[i-1,j-1]`` on cells with ``i, j >= 1``."""
    x = g.values
    return x[1:, 1:] - p.a * x[:-1, 1:] - p.b * x[1:, :-1] - p.c * x[:-1, :-1]


def empirical_acf(g: FieldGrid, h1_max: int, h2_max: int) -> AcfGrid:
    """Biased sample autocovariance on ``[-h1_max, h1_max] x [-h2_max, h2_max]``.

    Every lag divides by the total cell count.  Values at ``h`` and ``-h``
    come from the same sum, so the grid is exactly even.
    """
    if h1_max < 0 or h2_max < 0:
        raise ParameterDomainError(f"lag bounds must be nonnegative, got {h1_max}, {h2_max}")
    if h1_max >= g.n_rows or h2_max >= g.n_cols:
        raise LagRangeError(
            f"lag window ({h1_max}, {h2_max}) does not fit a {g.n_rows} x {g.n_cols} grid"
        )
    x = g.values - g.values.mean()
    n = x.size
    n1, n2 = 2 * h1_max + 1, 2 * h2_max + 1
    out = np.empty((n1, n2))
    for h1 in range(0, h1_max + 1):
        for h2 in range(-h2_max, h2_max + 1):
            if h1 == 0 and h2 < 0:
                continue
            # pairs (x[i, j], x[i - h1, j - h2])
            lo, hi = max(h2, 0), g.n_cols + min(h2, 0)
            s = float(np.vdot(x[h1:, lo:hi], x[: g.n_rows - h1, lo - h2 : hi - h2])) / n
            out[h1_max + h1, h2_max + h2] = s
            out[h1_max - h1, h2_max - h2] = s
    return AcfGrid(
        -h1_max, h1_max, -h2_max, h2_max, out,
        source="empirical",
        meta={"n_cells": n, "mean": float(g.values.mean()), "seed": g.seed},
    )
