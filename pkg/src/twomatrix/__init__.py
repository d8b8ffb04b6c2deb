"""Spectral curve, vector equilibrium measures and a polynomial oracle for a
Hermitian two-matrix model with quadratic and quartic potentials."""

from .errors import (
    AxisError,
    BranchPointError,
    ConstraintError,
    InvalidSymbolError,
    PrecisionError,
    RegimeError,
    ResolutionError,
    SelectionError,
    TwoMatrixError,
)
from .spectral_curve import ModelParams, classify_phase, classify_subregion, endpoints

__all__ = [
    "AxisError",
    "BranchPointError",
    "ConstraintError",
    "InvalidSymbolError",
    "ModelParams",
    "PrecisionError",
    "RegimeError",
    "ResolutionError",
    "SelectionError",
    "TwoMatrixError",
    "classify_phase",
    "classify_subregion",
    "endpoints",
]
