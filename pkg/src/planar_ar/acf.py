"""Exact autocovariance of the stationary field.

Axis values have closed forms; for causal coefficients the mixed-sign
quadrants factorize and the positive quadrant follows from the Yule-Walker
recursion.  Any other stationary parameter set is handled by moving to its
causal reparameterization and reflecting lag axes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._recursion import fill_quadrant
from .errors import LagRangeError, NonstationaryError, ParameterDomainError
from .params import ParamSet, canonical_causal, require_causal, require_stationary

__all__ = [
    "AxisCoefficients",
    "AcfGrid",
    "ProductStructure",
    "axis_coefficients",
    "acf_axes",
    "acf_causal",
    "acf_grid",
    "acf_value",
    "yw_residual",
    "acf_special_symmetric",
    "classify_product_structure",
]

MAX_WINDOW_CELLS = 10**8
MAX_LAG = 10**4


@dataclass(frozen=True)
class AxisCoefficients:
    alpha: float
    beta: float
    sqrtD: float
    variance: float


@dataclass(frozen=True, eq=False)
class AcfGrid:
    """Autocovariance values on the window ``[h1_min, h1_max] x [h2_min, h2_max]``.

    ``values[i, j]`` holds the lag ``(h1_min + i, h2_min + j)``.
    """

    h1_min: int
    h1_max: int
    h2_min: int
    h2_max: int
    values: np.ndarray
    source: str = "exact"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        expected = (self.h1_max - self.h1_min + 1, self.h2_max - self.h2_min + 1)
        if values.shape != expected:
            raise ParameterDomainError(f"values shape {values.shape} does not match window {expected}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def h1_range(self) -> range:
        return range(self.h1_min, self.h1_max + 1)

    @property
    def h2_range(self) -> range:
        return range(self.h2_min, self.h2_max + 1)

    def contains(self, h1: int, h2: int) -> bool:
        return self.h1_min <= h1 <= self.h1_max and self.h2_min <= h2 <= self.h2_max

    def at(self, h1: int, h2: int) -> float:
        if not self.contains(h1, h2):
            raise LagRangeError(
                f"lag ({h1}, {h2}) outside window "
                f"[{self.h1_min}, {self.h1_max}] x [{self.h2_min}, {self.h2_max}]"
            )
        return float(self.values[h1 - self.h1_min, h2 - self.h2_min])

    def __getitem__(self, lag: tuple[int, int]) -> float:
        return self.at(*lag)

    def items(self):
        for h1 in self.h1_range:
            for h2 in self.h2_range:
                yield h1, h2, float(self.values[h1 - self.h1_min, h2 - self.h2_min])


class ProductStructure(str, enum.Enum):
    FULLY_MULTIPLICATIVE = "FullyMultiplicative"
    OPPOSITE_QUADRANT = "MultiplicativeOppositeQuadrant"
    SAME_QUADRANT = "MultiplicativeSameQuadrant"
    BOUNDARY_UNCLASSIFIED = "BoundaryUnclassified"


def _sign(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def axis_coefficients(p: ParamSet) -> AxisCoefficients:
    """Decay rates along the two lattice axes and the variance."""
    report = require_stationary(p)
    a, b, c = p.a, p.b, p.c
    root = math.sqrt(report.D)
    # both denominators' leading terms are nonzero whenever D > 0
    ta = 1 + a * a - b * b - c * c
    tb = 1 - a * a + b * b - c * c
    alpha = 2 * (a + b * c) / (ta + _sign(ta) * root)
    beta = 2 * (a * c + b) / (tb + _sign(tb) * root)
    return AxisCoefficients(alpha=alpha, beta=beta, sqrtD=root, variance=p.sigma2 / root)


def acf_axes(p: ParamSet, h: int, axis: str = "first") -> float:
    """Autocovariance at ``(h, 0)`` (``axis="first"``) or ``(0, h)`` (``"second"``)."""
    k = axis_coefficients(p)
    axis = axis.lower()
    if axis not in ("first", "second"):
        raise ParameterDomainError(f"axis must be 'first' or 'second', got {axis!r}")
    rate = k.alpha if axis == "first" else k.beta
    return rate ** abs(int(h)) * k.variance


def _positive_quadrant(p: ParamSet, k: AxisCoefficients, n1: int, n2: int) -> np.ndarray:
    """Causal autocovariance on ``[0, n1] x [0, n2]`` by the Yule-Walker
    recursion seeded with the axis values."""
    out = np.empty((n1 + 1, n2 + 1))
    out[:, 0] = k.alpha ** np.arange(n1 + 1) * k.variance
    out[0, :] = k.beta ** np.arange(n2 + 1) * k.variance
    return fill_quadrant(out, p.a, p.b, p.c)


def _causal_lookup(p: ParamSet, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    k = axis_coefficients(p)
    n1 = int(np.max(np.abs(u1), initial=0))
    n2 = int(np.max(np.abs(u2), initial=0))
    mixed = u1 * u2 <= 0
    out = np.empty(u1.shape)
    out[mixed] = (k.alpha ** np.abs(u1[mixed])) * (k.beta ** np.abs(u2[mixed])) * k.variance
    if not mixed.all():
        quad = _positive_quadrant(p, k, n1, n2)
        same = ~mixed
        out[same] = quad[np.abs(u1[same]), np.abs(u2[same])]
    return out


def acf_causal(p: ParamSet, h1: int, h2: int) -> float:
    """Autocovariance at one lag for causal coefficients."""
    require_causal(p, hint="use acf_grid, which handles any stationary parameters")
    return float(_causal_lookup(p, np.array([int(h1)]), np.array([int(h2)]))[0])


def acf_grid(p: ParamSet, h1_min: int, h1_max: int, h2_min: int, h2_max: int) -> AcfGrid:
    """Exact autocovariance over a rectangular lag window for any stationary
    parameters."""
    require_stationary(p)
    bounds = (h1_min, h1_max, h2_min, h2_max)
    if h1_min > h1_max or h2_min > h2_max:
        raise ParameterDomainError(f"empty lag window {bounds}")
    if max(abs(int(x)) for x in bounds) > MAX_LAG:
        raise ParameterDomainError(f"lag window bounds must satisfy |h| <= {MAX_LAG}")
    n_cells = (h1_max - h1_min + 1) * (h2_max - h2_min + 1)
    if n_cells > MAX_WINDOW_CELLS:
        raise ParameterDomainError(f"window of {n_cells} cells exceeds {MAX_WINDOW_CELLS}")
    q, m, flip = canonical_causal(p)
    s1, s2 = flip.signs
    h1, h2 = np.meshgrid(np.arange(h1_min, h1_max + 1), np.arange(h2_min, h2_max + 1), indexing="ij")
    values = _causal_lookup(q, s1 * h1, s2 * h2)
    return AcfGrid(
        h1_min, h1_max, h2_min, h2_max, values,
        source="exact",
        meta={"params": p.to_dict(), "canonical": q.to_dict(), "transform": m, "flip": flip.value},
    )


def acf_value(p: ParamSet, h1: int, h2: int) -> float:
    """Exact autocovariance at one lag for any stationary parameters."""
    return acf_grid(p, h1, h1, h2, h2).at(h1, h2)


def yw_residual(p: ParamSet, g: AcfGrid, h1: int, h2: int) -> float:
    """``gamma(h) - a gamma(h1-1, h2) - b gamma(h1, h2-1) - c gamma(h1-1, h2-1)``."""
    return (
        g.at(h1, h2)
        - p.a * g.at(h1 - 1, h2)
        - p.b * g.at(h1, h2 - 1)
        - p.c * g.at(h1 - 1, h2 - 1)
    )


def acf_special_symmetric(p: ParamSet, h1: int, h2: int, tol: float = 0.0) -> float:
    """Separable autocovariance for ``c = -ab``.

    The base of each power is the coefficient or its reciprocal, whichever
    has modulus below one.
    """
    a, b = p.a, p.b
    if abs(p.c + a * b) > tol:
        raise ParameterDomainError(f"requires c = -ab, got c + ab = {p.c + a * b!r}")
    if abs(a) == 1 or abs(b) == 1:
        raise NonstationaryError(f"|a| = 1 or |b| = 1 admits no stationary solution (a={a}, b={b})")
    ra = a if abs(a) < 1 else 1 / a
    rb = b if abs(b) < 1 else 1 / b
    return ra ** abs(int(h1)) * rb ** abs(int(h2)) * p.sigma2 / (abs(1 - a * a) * abs(1 - b * b))


def classify_product_structure(p: ParamSet, tol: float = 0.0) -> ProductStructure:
    """Which lag quadrants the autocovariance factorizes on.

    ``BOUNDARY_UNCLASSIFIED`` covers ``ab + c != 0`` with
    ``1 + c^2 == a^2 + b^2``.  It cannot occur for stationary input, since
    ``f1 f4 + f2 f3 = 2 (1 + c^2 - a^2 - b^2)`` forces ``D = -(f1 f4)^2`` there,
    but it is kept so the classification stays total.
    """
    require_stationary(p)
    a, b, c = p.a, p.b, p.c
    if abs(a * b + c) <= tol:
        return ProductStructure.FULLY_MULTIPLICATIVE
    gap = 1 + c * c - a * a - b * b
    if gap > 0:
        return ProductStructure.OPPOSITE_QUADRANT
    if gap < 0:
        return ProductStructure.SAME_QUADRANT
    return ProductStructure.BOUNDARY_UNCLASSIFIED
