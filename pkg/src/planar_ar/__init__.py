"""Planar first-order autoregression on the integer lattice.

    X[i, j] = a X[i-1, j] + b X[i, j-1] + c X[i-1, j-1] + eps[i, j]

Existence and causality checks, exact autocovariances, moving-average
coefficients, simulation and moment-based parameter recovery.
"""

from .acf import AcfGrid, acf_causal, acf_grid, acf_value, axis_coefficients, yw_residual
from .errors import (
    IllConditionedError,
    InconsistentAcfError,
    InputFormatError,
    LagRangeError,
    NonstationaryError,
    NotCausalError,
    ParameterDomainError,
    PlanarARError,
    TruncationError,
)
from .estimate import MomentEstimate, recover_from_grid, recover_params
from .ma import PsiTable, cross_covariance, psi, psi_table
from .params import (
    ConditionReport,
    EquivalenceClass,
    FlipKind,
    ParamSet,
    canonical_causal,
    check_conditions,
    equivalence_class,
    transform,
)
from .sim import BoundaryData, FieldGrid, empirical_acf, simulate_stationary, solve_deterministic, solve_explicit
from .spectral import QuadratureSpec, acf_quadrature, density_at

__version__ = "0.1.0"

__all__ = [
    "AcfGrid",
    "BoundaryData",
    "ConditionReport",
    "EquivalenceClass",
    "FieldGrid",
    "FlipKind",
    "IllConditionedError",
    "InconsistentAcfError",
    "InputFormatError",
    "LagRangeError",
    "MomentEstimate",
    "NonstationaryError",
    "NotCausalError",
    "ParamSet",
    "ParameterDomainError",
    "PlanarARError",
    "PsiTable",
    "QuadratureSpec",
    "TruncationError",
    "acf_causal",
    "acf_grid",
    "acf_quadrature",
    "acf_value",
    "axis_coefficients",
    "canonical_causal",
    "check_conditions",
    "cross_covariance",
    "density_at",
    "empirical_acf",
    "equivalence_class",
    "psi",
    "psi_table",
    "recover_from_grid",
    "recover_params",
    "simulate_stationary",
    "solve_deterministic",
    "solve_explicit",
    "transform",
    "yw_residual",
]
