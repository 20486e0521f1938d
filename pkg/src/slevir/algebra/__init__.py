"""Exact scalars, truncated Laurent series and Loewner-map expansions."""

from .scalar import (
    ALPHA,
    ALPHA_MINUS,
    ALPHA_PLUS,
    ALPHA_ZERO,
    KAPPA,
    ONE,
    T,
    ZERO,
    ScalarK,
    central_charge,
    charge_weight,
    dual_kappa,
    h12,
    parse_scalar,
)
from .series import LaurentSeries, inverse_power_large_f, is_zero_on_window
from .mapseries import MapSeries, expand_inverse_power, residue, schwarzian, series_power
from .identities import lemma_identity_residual, transport_identity_residual

__all__ = [
    "ALPHA",
    "ALPHA_MINUS",
    "ALPHA_PLUS",
    "ALPHA_ZERO",
    "KAPPA",
    "ONE",
    "T",
    "ZERO",
    "ScalarK",
    "central_charge",
    "charge_weight",
    "dual_kappa",
    "h12",
    "parse_scalar",
    "LaurentSeries",
    "inverse_power_large_f",
    "is_zero_on_window",
    "MapSeries",
    "expand_inverse_power",
    "residue",
    "schwarzian",
    "series_power",
    "lemma_identity_residual",
    "transport_identity_residual",
]
