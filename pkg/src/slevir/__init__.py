"""Exact Virasoro-module computations for SLE local martingales, with numeric companions."""

from .algebra import KAPPA, T, ScalarK, central_charge, h12
from .errors import (
    ChamberError,
    DepthError,
    LevelOverflowError,
    NullFieldError,
    QuadratureError,
    RecursionInconsistency,
    SlevirError,
    SpecializationError,
    WindowError,
)
from .funcspace import Element, VariableSet
from .sle import SleVariant, apply_A, build_module, find_singular_null, make_variant
from .virasoro import WeightAssignment, apply_L, apply_L_explicit, commutator_residual

__version__ = "0.1.0"

__all__ = [
    "KAPPA",
    "T",
    "ScalarK",
    "central_charge",
    "h12",
    "ChamberError",
    "DepthError",
    "LevelOverflowError",
    "NullFieldError",
    "QuadratureError",
    "RecursionInconsistency",
    "SlevirError",
    "SpecializationError",
    "WindowError",
    "Element",
    "VariableSet",
    "SleVariant",
    "apply_A",
    "build_module",
    "find_singular_null",
    "make_variant",
    "WeightAssignment",
    "apply_L",
    "apply_L_explicit",
    "commutator_residual",
]
