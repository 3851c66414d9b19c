"""Parameter recovery from four autocovariance values.

The inversion returns the causal member of the equivalence class; the other
members are attached because no autocovariance can tell them apart.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .acf import AcfGrid
from .errors import IllConditionedError, InconsistentAcfError, LagRangeError, PlanarARError
from .params import (
    ConditionReport,
    EquivalenceClass,
    FlipKind,
    ParamSet,
    check_conditions,
    discriminant,
    equivalence_class,
    transform,
)

__all__ = ["AcfSource", "MomentEstimate", "recover_params", "recover_from_grid"]

ILL_CONDITIONED = 1e-12
DIAGNOSTIC_LAG = 2


class AcfSource(str, enum.Enum):
    EXACT = "ExactAcf"
    EMPIRICAL = "EmpiricalAcf"


@dataclass(frozen=True)
class MomentEstimate:
    """Recovered causal parameters and everything consistent with them.

    ``flip`` says how the input autocovariance relates to that of ``params``;
    ``equivalence`` lists the parameter sets whose autocovariance is the
    input itself (after the flip), so it contains ``params`` only when
    ``flip`` is ``NONE``.
    """

    params: ParamSet
    equivalence: EquivalenceClass
    condition_report: ConditionReport
    source: AcfSource
    flip: FlipKind = FlipKind.NONE
    candidates: tuple[tuple[FlipKind, ParamSet], ...] = ()
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "estimate": {**self.params.to_dict(), "source": self.source.value, "flip": self.flip.value},
            "equivalence_class": self.equivalence.to_dict(),
            "condition_report": self.condition_report.to_dict(),
            "diagnostics": {
                **self.diagnostics,
                "candidates": [{"flip": f.value, **q.to_dict()} for f, q in self.candidates],
            },
        }


def _invert(g00: float, g10: float, g01: float, g11: float) -> ParamSet:
    if not (math.isfinite(g00) and g00 > 0):
        raise InconsistentAcfError(f"variance must be positive, got g00={g00!r}")
    scale = ILL_CONDITIONED * g00 * g00
    d1 = g00 * g00 - g01 * g01
    d2 = g00 * g00 - g10 * g10
    if abs(d1) < scale or abs(d2) < scale:
        raise IllConditionedError(
            f"g00^2 - g01^2 = {d1:.3g} and g00^2 - g10^2 = {d2:.3g}; one is below {scale:.3g}"
        )
    a = (g10 * g00 - g01 * g11) / d1
    b = (g01 * g00 - g10 * g11) / d2
    c = (g11 - a * g01 - b * g10) / g00
    # D of the recovered triple is a perfect square in the normalized lags,
    # so it only vanishes on a thin surface; causality is the real test
    D = discriminant(a, b, c)
    if not D > 0:
        raise InconsistentAcfError(
            f"recovered a={a!r}, b={b!r}, c={c!r} have D={D!r} <= 0; no stationary model fits"
        )
    q = ParamSet(a, b, c, g00 * math.sqrt(D))
    if not check_conditions(q).causal:
        raise InconsistentAcfError(
            f"recovered a={a!r}, b={b!r}, c={c!r} are not causal, so no model has these four lags "
            "in this orientation"
        )
    return q


def _class_of_flipped(q: ParamSet, flip: FlipKind) -> EquivalenceClass:
    if flip in (FlipKind.NONE, FlipKind.BOTH_AXES):
        return equivalence_class(q)
    # the one-axis flip of q's autocovariance belongs to T3 q (or T4 q when a = 0)
    return equivalence_class(transform(q, 3 if q.a != 0 else 4))


def recover_params(
    g00: float, g10: float, g01: float, g11: float, source: AcfSource | str = AcfSource.EXACT
) -> MomentEstimate:
    """Invert the autocovariance at lags (0,0), (1,0), (0,1), (1,1).

    Raises
    ------
    IllConditionedError
        If ``g00^2 - g01^2`` or ``g00^2 - g10^2`` is below ``1e-12 * g00^2``.
    InconsistentAcfError
        If ``g00 <= 0``, or the recovered coefficients have ``D <= 0`` or are
        not causal.  A causal recovery always reproduces the four inputs, a
        non-causal one never does.
    """
    q = _invert(float(g00), float(g10), float(g01), float(g11))
    return MomentEstimate(
        params=q,
        equivalence=equivalence_class(q),
        condition_report=check_conditions(q),
        source=AcfSource(source),
        candidates=((FlipKind.NONE, q),),
    )


def _yw_diagnostics(g: AcfGrid, q: ParamSet, signs: tuple[int, int]) -> dict:
    s1, s2 = signs

    def at(h1, h2):
        return g.at(s1 * h1, s2 * h2)

    out = {}
    for h1 in range(DIAGNOSTIC_LAG + 1):
        for h2 in range(DIAGNOSTIC_LAG + 1):
            try:
                r = at(h1, h2) - q.a * at(h1 - 1, h2) - q.b * at(h1, h2 - 1) - q.c * at(h1 - 1, h2 - 1)
            except LagRangeError:
                continue
            if (h1, h2) == (0, 0):
                r -= q.sigma2
            out[f"{h1},{h2}"] = abs(r)
    return {"yw_residuals": out, "yw_residual_max": max(out.values(), default=None)}


def recover_from_grid(g: AcfGrid) -> MomentEstimate:
    """Recover parameters from an autocovariance grid.

    When lag (1,-1) is available it decides the orientation: a causal
    autocovariance factorizes on the mixed-sign quadrants, so whichever of
    ``gamma(1, 1)`` and ``gamma(1, -1)`` satisfies
    ``gamma(1, +-1) gamma(0, 0) = gamma(1, 0) gamma(0, 1)`` better marks the
    mixed quadrant, and the other one feeds the inversion.
    """
    source = AcfSource.EMPIRICAL if g.source == "empirical" else AcfSource.EXACT
    g00, g10, g01, g11 = g.at(0, 0), g.at(1, 0), g.at(0, 1), g.at(1, 1)
    diagnostics: dict = {}
    options = [(FlipKind.NONE, g11)]
    if g.contains(1, -1):
        g1m = g.at(1, -1)
        target = g10 * g01
        mismatch = {FlipKind.NONE: abs(g1m * g00 - target), FlipKind.FIRST_AXIS: abs(g11 * g00 - target)}
        diagnostics["orientation_mismatch"] = {k.value: v for k, v in mismatch.items()}
        options.append((FlipKind.FIRST_AXIS, g1m))
        options.sort(key=lambda o: mismatch[o[0]])
    else:
        diagnostics["orientation"] = "lag (1,-1) missing; assumed unflipped"

    candidates = []
    errors = []
    for flip, g_diag in options:
        try:
            candidates.append((flip, _invert(g00, g10, g01, g_diag)))
        except PlanarARError as exc:
            errors.append(exc)
    if not candidates:
        raise errors[0]
    flip, q = candidates[0]
    distinct = tuple(
        c for k, c in enumerate(candidates) if k == 0 or c[1].as_tuple() != candidates[0][1].as_tuple()
    )
    if source is AcfSource.EMPIRICAL:
        diagnostics.update(_yw_diagnostics(g, q, flip.signs))
    return MomentEstimate(
        params=q,
        equivalence=_class_of_flipped(q, flip),
        condition_report=check_conditions(q),
        source=source,
        flip=flip,
        candidates=distinct,
        diagnostics=diagnostics,
    )
