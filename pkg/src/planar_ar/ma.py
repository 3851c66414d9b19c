"""Moving-average (causal) representation ``X = sum psi[k, l] eps[i-k, j-l]``.

``psi[k, l]`` is a polynomial in ``a``, ``b`` and ``ab + c``; it is also the
impulse response of the quadrant recursion, which is how tables are filled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._recursion import fill_quadrant
from .errors import ParameterDomainError
from .params import ParamSet, require_causal

__all__ = ["PsiTable", "psi", "psi_closed_form_table", "psi_table", "estimate_tail", "cross_covariance"]

_RIMS = 4


@dataclass(frozen=True, eq=False)
class PsiTable:
    """Coefficients ``psi[k, l]`` for ``0 <= k <= kmax``, ``0 <= l <= lmax``.

    ``tail_bound`` is an *estimated* l1 mass outside the table, obtained by
    geometric extrapolation of the outer rims; it is not a proven bound.
    """

    kmax: int
    lmax: int
    values: np.ndarray
    tail_bound: float

    def __post_init__(self):
        self.values.flags.writeable = False

    def at(self, k: int, l: int) -> float:
        if k < 0 or l < 0:
            return 0.0
        return float(self.values[k, l])

    @property
    def abs_sum(self) -> float:
        return float(np.abs(self.values).sum())


def _dyadic(x: float) -> tuple[int, int]:
    """``x = n / 2**e`` exactly."""
    n, d = x.as_integer_ratio()
    return n, d.bit_length() - 1


def psi(p: ParamSet, k: int, l: int) -> float:
    """Closed-form ``psi[k, l]``; zero outside the first quadrant.

    Every double is a dyadic rational, so the binomial sum is accumulated
    exactly in integers over a common power-of-two denominator and rounded
    once.  The summands alternate in sign whenever ``ab`` and ``ab + c`` do,
    and the cancellation can reach 13 digits at ``k = l = 50``; a floating
    point sum would lose all accuracy there.  Binomial products advance by
    the ratio ``(k-m)(l-m) / (m+1)^2``.
    """
    k = int(k)
    l = int(l)
    if k < 0 or l < 0:
        return 0.0
    A, ea = _dyadic(p.a)
    B, eb = _dyadic(p.b)
    # ab + c is again dyadic
    ab_num, ab_exp = A * B, ea + eb
    cn, ec = _dyadic(p.c)
    ed = max(ab_exp, ec)
    Dn = (ab_num << (ed - ab_exp)) + (cn << (ed - ec))
    n = min(k, l)
    pow_a = [1]
    for _ in range(k):
        pow_a.append(pow_a[-1] * A)
    pow_b = [1]
    for _ in range(l):
        pow_b.append(pow_b[-1] * B)
    pow_d = [1]
    for _ in range(n):
        pow_d.append(pow_d[-1] * Dn)
    expo = [ea * (k - m) + eb * (l - m) + ed * m for m in range(n + 1)]
    top = max(expo)
    total = 0
    binom = 1
    for m in range(n + 1):
        total += (binom * pow_a[k - m] * pow_b[l - m] * pow_d[m]) << (top - expo[m])
        binom = binom * (k - m) * (l - m) // ((m + 1) * (m + 1))
    try:
        return total / (1 << top)
    except OverflowError:
        return math.inf if total > 0 else -math.inf


def psi_closed_form_table(p: ParamSet, kmax: int, lmax: int) -> np.ndarray:
    """Array of closed-form values, computed entry by entry."""
    return np.array([[psi(p, k, l) for l in range(lmax + 1)] for k in range(kmax + 1)])


def estimate_tail(values: np.ndarray) -> float:
    """Extrapolate the l1 mass beyond a coefficient table.

    Cells are grouped into L-shaped shells anchored at the far corner (the
    outermost shell is the last row plus the last column).  The largest ratio
    between consecutive shell masses among the outer few is taken as a
    geometric decay rate.  Returns ``inf`` when no decay is visible.
    """
    a = np.abs(values)
    n1, n2 = a.shape
    depth = min(n1, n2)
    shells = []
    for s in range(min(_RIMS + 1, depth)):
        r, c = n1 - 1 - s, n2 - 1 - s
        shells.append(a[r, : c + 1].sum() + a[:r, c].sum())
    shells = shells[::-1]  # innermost first, outermost last
    outer = shells[-1]
    if len(shells) < 2:
        return math.inf if outer > 0 else 0.0
    ratios = []
    for inner, out in zip(shells[:-1], shells[1:]):
        if out == 0:
            ratios.append(0.0)
        elif inner == 0:
            ratios.append(math.inf)
        else:
            ratios.append(out / inner)
    rho = max(ratios)
    if outer == 0 and rho == 0:
        return 0.0
    if rho >= 1:
        return math.inf
    return float(outer * rho / (1 - rho))


def psi_table(p: ParamSet, kmax: int, lmax: int) -> PsiTable:
    """Fill ``psi`` on ``[0, kmax] x [0, lmax]`` by the defining recursion."""
    require_causal(p, hint="the coefficient tail may diverge")
    if kmax < 0 or lmax < 0:
        raise ParameterDomainError(f"kmax and lmax must be nonnegative, got {kmax}, {lmax}")
    out = np.empty((kmax + 1, lmax + 1))
    out[:, 0] = p.a ** np.arange(kmax + 1)
    out[0, :] = p.b ** np.arange(lmax + 1)
    fill_quadrant(out, p.a, p.b, p.c)
    return PsiTable(kmax=kmax, lmax=lmax, values=out, tail_bound=estimate_tail(out))


def cross_covariance(p: ParamSet, h1: int, h2: int) -> float:
    """``cov(X[i + h1, j + h2], eps[i, j])``."""
    require_causal(p)
    if h1 < 0 or h2 < 0:
        return 0.0
    return psi(p, h1, h2) * p.sigma2
