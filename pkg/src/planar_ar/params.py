"""Model parameters, existence and causality predicates, and the four
index-reflection transforms that generate the nonidentifiability classes.

The model is the first-order planar autoregression

    X[i, j] = a X[i-1, j] + b X[i, j-1] + c X[i-1, j-1] + eps[i, j]

with white noise of variance ``sigma2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (
    InternalInvariantError,
    NonstationaryError,
    NotCausalError,
    ParameterDomainError,
)

__all__ = [
    "ParamSet",
    "Symmetry",
    "FlipKind",
    "ConditionReport",
    "EquivalenceClass",
    "factors",
    "discriminant",
    "check_conditions",
    "require_stationary",
    "require_causal",
    "transform",
    "transform_orbit",
    "equivalence_class",
    "canonical_causal",
    "sign_table_transform",
]

NEAR_BOUNDARY = 1e-9


@dataclass(frozen=True)
class ParamSet:
    """Coefficients ``a``, ``b``, ``c`` and white-noise variance ``sigma2``."""

    a: float
    b: float
    c: float
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "c", "sigma2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterDomainError(f"{name} must be finite, got {value!r}")
        if not self.sigma2 > 0:
            raise ParameterDomainError(f"sigma2 must be positive, got {self.sigma2!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.sigma2)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "sigma2": self.sigma2}


class Symmetry(str, enum.Enum):
    GENERIC = "Generic"
    SYMMETRIC_ABC = "SymmetricABC"  # c = -ab
    TRANSECT_UNCORRELATED = "TransectUncorrelated"  # a = -bc
    DEGENERATE = "Degenerate"  # a = b = c = 0


class FlipKind(str, enum.Enum):
    """How the autocovariance of a reparameterized field relates to the original."""

    NONE = "None"
    BOTH_AXES = "BothAxes"
    FIRST_AXIS = "FirstAxis"
    SECOND_AXIS = "SecondAxis"

    @property
    def signs(self) -> tuple[int, int]:
        return _FLIP_SIGNS[self]


_FLIP_SIGNS = {
    FlipKind.NONE: (1, 1),
    FlipKind.BOTH_AXES: (-1, -1),
    FlipKind.FIRST_AXIS: (-1, 1),
    FlipKind.SECOND_AXIS: (1, -1),
}

_FLIP_OF_TRANSFORM = {
    1: FlipKind.NONE,
    2: FlipKind.BOTH_AXES,
    3: FlipKind.FIRST_AXIS,
    4: FlipKind.SECOND_AXIS,
}


@dataclass(frozen=True)
class ConditionReport:
    f1: float
    f2: float
    f3: float
    f4: float
    D: float
    stationary: bool
    causal: bool
    pnd_sufficient: bool
    symmetry: Symmetry
    near_boundary: bool

    @property
    def factors(self) -> tuple[float, float, float, float]:
        return (self.f1, self.f2, self.f3, self.f4)

    def to_dict(self) -> dict:
        return {
            "f1": self.f1,
            "f2": self.f2,
            "f3": self.f3,
            "f4": self.f4,
            "D": self.D,
            "stationary": self.stationary,
            "causal": self.causal,
            "pnd_sufficient": self.pnd_sufficient,
            "symmetry": self.symmetry.value,
            "near_boundary": self.near_boundary,
        }


@dataclass(frozen=True)
class EquivalenceClass:
    """Parameter sets sharing one autocovariance function.

    ``members`` pairs each set with the transform id that produced it from the
    input.  ``causal_member_index`` is ``None`` when the shared autocovariance
    is an axis flip of a causal one (``1 + c^2 < a^2 + b^2``); the causal
    representative is then reached through :func:`canonical_causal`.
    """

    members: tuple[tuple[int, ParamSet], ...]
    causal_member_index: int | None

    @property
    def class_size(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {
            "class_size": self.class_size,
            "causal_member_index": self.causal_member_index,
            "members": [{"transform": m, **q.to_dict()} for m, q in self.members],
        }


def factors(a: float, b: float, c: float) -> tuple[float, float, float, float]:
    return (1 - a - b - c, 1 - a + b + c, 1 + a - b + c, 1 + a + b - c)


def discriminant(a: float, b: float, c: float) -> float:
    f1, f2, f3, f4 = factors(a, b, c)
    return f1 * f2 * f3 * f4


def _symmetry(a, b, c, tol):
    if tol is None:
        zero = lambda x: x == 0  # noqa: E731
    else:
        zero = lambda x: abs(x) <= tol  # noqa: E731
    if zero(a) and zero(b) and zero(c):
        return Symmetry.DEGENERATE
    if zero(c + a * b):
        return Symmetry.SYMMETRIC_ABC
    if zero(a + b * c):
        return Symmetry.TRANSECT_UNCORRELATED
    return Symmetry.GENERIC


def check_conditions(p: ParamSet, symmetry_tol: float | None = None) -> ConditionReport:
    """Evaluate the existence, causality and pure-nondeterminism predicates.

    Parameters
    ----------
    p : ParamSet
    symmetry_tol : float, optional
        When given, the symmetry classes are tested with ``abs(...) <= tol``
        instead of exact equality.
    """
    f1, f2, f3, f4 = factors(p.a, p.b, p.c)
    D = f1 * f2 * f3 * f4
    stationary = D > 0
    causal = f1 > 0 and f2 > 0 and f3 > 0 and f4 > 0
    pnd = stationary and 1 + p.c**2 > p.a**2 + p.b**2
    return ConditionReport(
        f1=f1,
        f2=f2,
        f3=f3,
        f4=f4,
        D=D,
        stationary=stationary,
        causal=causal,
        pnd_sufficient=pnd,
        symmetry=_symmetry(p.a, p.b, p.c, symmetry_tol),
        near_boundary=min(abs(f1), abs(f2), abs(f3), abs(f4)) < NEAR_BOUNDARY,
    )


def require_stationary(p: ParamSet) -> ConditionReport:
    report = check_conditions(p)
    if not report.stationary:
        raise NonstationaryError(
            f"no stationary solution for a={p.a!r}, b={p.b!r}, c={p.c!r}: D={report.D!r} <= 0"
        )
    return report


def require_causal(p: ParamSet, hint: str = "") -> ConditionReport:
    report = require_stationary(p)
    if not report.causal:
        msg = f"parameters a={p.a!r}, b={p.b!r}, c={p.c!r} are not causal (factors {report.factors})"
        if hint:
            msg += f"; {hint}"
        raise NotCausalError(msg)
    return report


def transform(p: ParamSet, m: int) -> ParamSet:
    """Apply the reparameterization T_m, m in 1..4.

    T_1 is the identity; T_2 reverses both lattice axes, T_3 the first axis
    and T_4 the second.  Each T_m is an involution.
    """
    a, b, c, s = p.as_tuple()
    if m == 1:
        return p
    if m == 2:
        if c == 0:
            raise ParameterDomainError("transform 2 undefined: coefficient c is zero")
        return ParamSet(-b / c, -a / c, 1 / c, s / c / c)
    if m == 3:
        if a == 0:
            raise ParameterDomainError("transform 3 undefined: coefficient a is zero")
        return ParamSet(1 / a, -c / a, -b / a, s / a / a)
    if m == 4:
        if b == 0:
            raise ParameterDomainError("transform 4 undefined: coefficient b is zero")
        return ParamSet(-c / b, 1 / b, -a / b, s / b / b)
    raise ParameterDomainError(f"transform id must be 1, 2, 3 or 4, got {m!r}")


def _defined(p: ParamSet, m: int) -> bool:
    return m == 1 or (m == 2 and p.c != 0) or (m == 3 and p.a != 0) or (m == 4 and p.b != 0)


def transform_orbit(p: ParamSet) -> list[tuple[int, ParamSet]]:
    """All well-defined ``(m, T_m p)`` pairs, in transform order.

    Images that overflow double precision (a coefficient below about 1e-154
    in magnitude) are skipped; they are never causal.
    """
    out = []
    for m in (1, 2, 3, 4):
        if not _defined(p, m):
            continue
        try:
            out.append((m, transform(p, m)))
        except ParameterDomainError:
            continue
    return out


def _class_transforms(p: ParamSet) -> tuple[int, ...]:
    a, b, c = p.a, p.b, p.c
    if c == -a * b:
        if c != 0:
            return (1, 2, 3, 4)
        if a != 0 and b == 0:
            return (1, 3)
        if b != 0 and a == 0:
            return (1, 4)
        return (1,)
    if c != 0:
        return (1, 2)
    return (1,)


def equivalence_class(p: ParamSet) -> EquivalenceClass:
    """Enumerate the parameter sets that share the autocovariance of ``p``."""
    require_stationary(p)
    members = []
    for m in _class_transforms(p):
        try:
            members.append((m, transform(p, m)))
        except ParameterDomainError as exc:
            raise ParameterDomainError(f"class member T{m} of {p} is not representable: {exc}") from None
    members = tuple(members)
    causal = [k for k, (_, q) in enumerate(members) if check_conditions(q).causal]
    if len(causal) > 1:
        raise InternalInvariantError(f"several causal members in class of {p}")
    return EquivalenceClass(members=members, causal_member_index=causal[0] if causal else None)


def canonical_causal(p: ParamSet) -> tuple[ParamSet, int, FlipKind]:
    """Return the causal member of ``{T_m p}`` with its transform id and flip.

    The autocovariances relate as ``gamma_p(h1, h2) = gamma_q(s1*h1, s2*h2)``
    with ``(s1, s2) = flip.signs``.
    """
    require_stationary(p)
    found = [(m, q) for m, q in transform_orbit(p) if check_conditions(q).causal]
    if len(found) != 1:
        raise InternalInvariantError(
            f"expected exactly one causal reparameterization of {p}, found {len(found)}"
        )
    m, q = found[0]
    return q, m, _FLIP_OF_TRANSFORM[m]


def sign_table_transform(p: ParamSet) -> int:
    """Transform id predicted from the signs of f1..f4 alone.

    Independent of :func:`canonical_causal`, which scans the predicate.
    """
    report = require_stationary(p)
    signs = tuple(f > 0 for f in report.factors)
    table = {
        (True, True, True, True): 1,
        (False, True, True, False): 2,
        (True, False, False, True): 2,
        (False, False, True, True): 3,
        (True, True, False, False): 3,
        (False, True, False, True): 4,
        (True, False, True, False): 4,
    }
    try:
        return table[signs]
    except KeyError:
        raise InternalInvariantError(f"sign pattern {signs} incompatible with D > 0") from None
