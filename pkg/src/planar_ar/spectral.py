"""Spectral density of the stationary field and a brute-force quadrature
oracle for its autocovariance, plus closed forms of the one-dimensional
integrals the exact formulas are built from.

The quadrature path never touches the recursions in :mod:`planar_ar.acf`;
it integrates ``sigma2 * cos(2 pi (h1 nu1 + h2 nu2)) / g(nu1, nu2)`` over the
unit torus directly.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError
from .params import ParamSet, require_causal, require_stationary

__all__ = [
    "QuadratureRule",
    "QuadratureSpec",
    "QuadratureResult",
    "QuadratureWarning",
    "denominator",
    "density_at",
    "density_grid",
    "acf_quadrature",
    "acf_quadrature_window",
    "acf_quadrature_adaptive",
    "integral_poisson",
    "integral_ar1_kernel",
    "integral_unit_circle",
    "integral_binomial",
]

TWO_PI = 2.0 * math.pi
MAX_NODES = 16384
_CHUNK_CELLS = 1 << 22


class QuadratureWarning(UserWarning):
    """Quadrature accuracy could not be confirmed at the requested tolerance."""


class QuadratureRule(str, enum.Enum):
    TRAPEZOID = "trapezoid"
    GAUSS_LEGENDRE = "gauss-legendre"


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_axis: int = 1024
    rule: QuadratureRule = QuadratureRule.TRAPEZOID

    def __post_init__(self):
        object.__setattr__(self, "rule", QuadratureRule(self.rule))
        n = self.nodes_per_axis
        if n < 16:
            raise ParameterDomainError(f"nodes_per_axis must be >= 16, got {n}")
        if self.rule is QuadratureRule.TRAPEZOID and n % 2:
            raise ParameterDomainError(f"trapezoid rule needs an even node count, got {n}")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes on [-1/2, 1/2] and their weights (summing to one)."""
        n = self.nodes_per_axis
        if self.rule is QuadratureRule.TRAPEZOID:
            # midpoints of a uniform periodic grid: symmetric under nu -> -nu
            nu = (np.arange(n) + 0.5) / n - 0.5
            return nu, np.full(n, 1.0 / n)
        x, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * x, 0.5 * w


@dataclass(frozen=True)
class QuadratureResult:
    h1: np.ndarray
    h2: np.ndarray
    values: np.ndarray
    nodes_per_axis: int
    error_estimate: float
    converged: bool


def _abc(p: ParamSet, nu2):
    a, b, c = p.a, p.b, p.c
    c2 = np.cos(TWO_PI * nu2)
    A = 1 + a * a + b * b + c * c + 2 * (a * c - b) * c2
    B = 2 * ((b * c - a) + (a * b - c) * c2)
    C = 2 * (a * b + c) * np.sin(TWO_PI * nu2)
    return A, B, C


def denominator(p: ParamSet, nu1, nu2):
    """``|1 - a e1 - b e2 - c e1 e2|^2`` in the real form ``A + B cos + C sin``."""
    nu1 = np.asarray(nu1, dtype=float)
    A, B, C = _abc(p, np.asarray(nu2, dtype=float))
    return A + B * np.cos(TWO_PI * nu1) + C * np.sin(TWO_PI * nu1)


def density_at(p: ParamSet, nu1, nu2):
    """Spectral density ``sigma2 / g(nu1, nu2)``; scalars in, scalar out."""
    require_stationary(p)
    out = p.sigma2 / denominator(p, nu1, nu2)
    return float(out) if np.ndim(out) == 0 else out


def density_grid(p: ParamSet, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Density on the closed ``n x n`` grid over [-1/2, 1/2]^2.

    Returns the axis nodes and an array indexed ``[i1, i2]``.
    """
    require_stationary(p)
    if n < 2:
        raise ParameterDomainError(f"grid resolution must be >= 2, got {n}")
    nu = np.linspace(-0.5, 0.5, n)
    return nu, p.sigma2 / denominator(p, nu[:, None], nu[None, :])


def _canonical_lags(h1s, h2s):
    """Split a lag window into representatives of the pairs {h, -h}."""
    pairs = set()
    for h1 in h1s:
        for h2 in h2s:
            if (h1, h2) >= (0, 0):
                pairs.add((h1, h2))
            else:
                pairs.add((-h1, -h2))
    return sorted(pairs)


def _trig_sums(p: ParamSet, lags, spec: QuadratureSpec) -> np.ndarray:
    nu, w = spec.nodes()
    n = nu.size
    k1 = np.array(sorted({h for h, _ in lags}), dtype=float)
    k2 = np.array(sorted({h for _, h in lags}), dtype=float)
    cos2 = np.cos(TWO_PI * np.outer(k2, nu)) * w
    sin2 = np.sin(TWO_PI * np.outer(k2, nu)) * w
    A, B, C = _abc(p, nu)
    # accumulate over blocks of nu1 rows to bound memory at large n
    step = max(1, _CHUNK_CELLS // n)
    cc = np.zeros((k1.size, k2.size))
    ss = np.zeros((k1.size, k2.size))
    for start in range(0, n, step):
        nu1 = nu[start : start + step]
        g = A[None, :] + B[None, :] * np.cos(TWO_PI * nu1)[:, None] + C[None, :] * np.sin(TWO_PI * nu1)[:, None]
        inv = w[start : start + step, None] / g
        c1 = np.cos(TWO_PI * np.outer(k1, nu1))
        s1 = np.sin(TWO_PI * np.outer(k1, nu1))
        cc += c1 @ inv @ cos2.T
        ss += s1 @ inv @ sin2.T
    table = p.sigma2 * (cc - ss)
    i1 = {h: i for i, h in enumerate(k1.astype(int))}
    i2 = {h: i for i, h in enumerate(k2.astype(int))}
    return np.array([table[i1[h1], i2[h2]] for h1, h2 in lags])


def acf_quadrature_window(p: ParamSet, h1s, h2s, q: QuadratureSpec | None = None) -> np.ndarray:
    """Quadrature autocovariance on the product window ``h1s x h2s``.

    Returns an array indexed ``[index of h1, index of h2]``.  Values at ``h``
    and ``-h`` are bitwise identical.
    """
    require_stationary(p)
    q = q or QuadratureSpec()
    h1s = [int(h) for h in h1s]
    h2s = [int(h) for h in h2s]
    lags = _canonical_lags(h1s, h2s)
    vals = dict(zip(lags, _trig_sums(p, lags, q)))
    out = np.empty((len(h1s), len(h2s)))
    for i, h1 in enumerate(h1s):
        for j, h2 in enumerate(h2s):
            key = (h1, h2) if (h1, h2) in vals else (-h1, -h2)
            out[i, j] = vals[key]
    return out


def acf_quadrature(
    p: ParamSet, h1: int, h2: int, q: QuadratureSpec | None = None, tol: float | None = None
) -> float:
    """Autocovariance at one lag by double quadrature of the spectral density.

    With ``tol`` given, the estimate is repeated at twice the node count and
    a :class:`QuadratureWarning` is issued if the two differ by more than
    ``tol`` relative to the variance.
    """
    q = q or QuadratureSpec()
    value = float(acf_quadrature_window(p, [h1], [h2], q)[0, 0])
    if tol is not None and 2 * q.nodes_per_axis <= MAX_NODES:
        finer = QuadratureSpec(2 * q.nodes_per_axis, q.rule)
        both = acf_quadrature_window(p, [h1, 0], [h2, 0], finer)
        v2, scale = float(both[0, 0]), float(both[1, 1])
        if abs(v2 - value) > tol * scale:
            warnings.warn(
                f"quadrature at {q.nodes_per_axis} nodes changes by {abs(v2 - value):.3g} "
                f"when doubled; increase nodes_per_axis",
                QuadratureWarning,
                stacklevel=2,
            )
    return value


def acf_quadrature_adaptive(
    p: ParamSet,
    h1s,
    h2s,
    tol: float = 1e-10,
    start_nodes: int = 1024,
    max_nodes: int = MAX_NODES,
) -> QuadratureResult:
    """Trapezoid quadrature with node doubling until successive estimates
    agree to ``tol`` (absolute) or ``max_nodes`` is reached.

    The reported ``error_estimate`` is the last successive difference.  If
    the cap is hit first, a :class:`QuadratureWarning` is issued and
    ``converged`` is false.
    """
    report = require_stationary(p)
    h1s = list(h1s)
    h2s = list(h2s)
    n = start_nodes
    prev = acf_quadrature_window(p, h1s, h2s, QuadratureSpec(n))
    err = math.inf
    while 2 * n <= max_nodes:
        n *= 2
        cur = acf_quadrature_window(p, h1s, h2s, QuadratureSpec(n))
        err = float(np.max(np.abs(cur - prev)))
        prev = cur
        if err < tol:
            break
    converged = err < tol
    if not converged:
        warnings.warn(
            f"quadrature did not reach tol={tol:g} by {n} nodes (last change {err:.3g})"
            + ("; parameters are near the stationarity boundary" if report.near_boundary else ""),
            QuadratureWarning,
            stacklevel=2,
        )
    return QuadratureResult(
        h1=np.array(h1s), h2=np.array(h2s), values=prev, nodes_per_axis=n,
        error_estimate=err, converged=converged,
    )


def integral_poisson(A: float, B: float, C: float) -> float:
    """Closed form of the integral of ``1 / (A + B cos 2 pi t + C sin 2 pi t)``
    over one period."""
    disc = A * A - B * B - C * C
    if not (A > 0 and disc > 0):
        raise ParameterDomainError(f"need A > 0 and A^2 > B^2 + C^2, got A={A}, B={B}, C={C}")
    return 1.0 / math.sqrt(disc)


def integral_ar1_kernel(A: float, B: float, n: int) -> float:
    """Closed form of the integral of ``exp(2 pi i n t) / (A + B cos 2 pi t)``
    over one period: ``alpha^|n| / sqrt(A^2 - B^2)``."""
    if not A > abs(B):
        raise ParameterDomainError(f"need A > |B|, got A={A}, B={B}")
    root = math.sqrt(A * A - B * B)
    alpha = -B / (A + root)
    n = abs(int(n))
    return (1.0 if n == 0 else alpha**n) / root


def integral_unit_circle(A: complex, B: complex, n: int) -> complex:
    """Closed form of the integral of ``exp(2 pi i n v) / (A - B exp(2 pi i v))``
    over one period, for ``|A| != |B|``."""
    A = complex(A)
    B = complex(B)
    if abs(A) == abs(B):
        raise ParameterDomainError(f"need |A| != |B|, got |A|=|B|={abs(A)}")
    n = int(n)
    outside = abs(A) > abs(B)
    if n <= 0:
        # B may be zero here: A^(n-1) B^(-n) with n <= 0 stays finite
        return A ** (n - 1) * B ** (-n) if outside else 0j
    if outside:
        return 0j
    return -(A ** (n - 1)) * B ** (-n)


def integral_binomial(p: ParamSet, n1: int, n2: int) -> float:
    """Closed form of the integral of
    ``exp(-2 pi i n2 v) (a + c e)^n1 / (1 - b e)^(n1 + 1)``, ``e = exp(2 pi i v)``,
    as a finite binomial sum."""
    require_causal(p)
    if n1 < 0 or n2 < 0:
        raise ParameterDomainError(f"n1 and n2 must be nonnegative, got {n1}, {n2}")
    a, b, c = p.a, p.b, p.c
    d = a * b + c
    return math.fsum(
        math.comb(n1, k) * math.comb(n2, k) * a ** (n1 - k) * b ** (n2 - k) * d**k
        for k in range(min(n1, n2) + 1)
    )

