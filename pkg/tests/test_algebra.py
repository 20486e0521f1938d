"""Scalars in Q(t), truncated Laurent series and Loewner-map expansions, checked against sympy."""

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from slevir.algebra import (
    ALPHA,
    ALPHA_MINUS,
    ALPHA_PLUS,
    ALPHA_ZERO,
    KAPPA,
    LaurentSeries,
    MapSeries,
    ScalarK,
    central_charge,
    charge_weight,
    dual_kappa,
    expand_inverse_power,
    h12,
    transport_identity_residual,
    parse_scalar,
    schwarzian,
    series_power,
)
from slevir.algebra.identities import CASES
from slevir.errors import SpecializationError, WindowError

t_sym = sp.Symbol("t", positive=True)
small = st.integers(-6, 6)
polys = st.lists(small, min_size=1, max_size=4)


def _scalar(num, den):
    return ScalarK(num) / ScalarK(den)


def _sym(num, den):
    return sum(c * t_sym**i for i, c in enumerate(num)) / sum(c * t_sym**i for i, c in enumerate(den))


nonzero_den = polys.filter(lambda d: any(d))


@given(polys, nonzero_den, polys, nonzero_den)
def test_field_operations_match_sympy(n1, d1, n2, d2):
    a, b = _scalar(n1, d1), _scalar(n2, d2)
    A, B = _sym(n1, d1), _sym(n2, d2)
    for got, want in ((a + b, A + B), (a - b, A - B), (a * b, A * B)):
        assert sp.simplify(got.to_sympy(t_sym) - want) == 0
    if not b.is_zero():
        assert sp.simplify((a / b).to_sympy(t_sym) - A / B) == 0


@given(polys, nonzero_den)
def test_json_round_trip(n, d):
    a = _scalar(n, d)
    assert ScalarK.from_json(a.to_json()) == a


def test_canonical_form_is_unique():
    t = ScalarK.t()
    assert (t * t - 1) / (t - 1) == t + 1
    assert hash((t * t - 1) / (t - 1)) == hash(t + 1)


def test_named_constants():
    t = sp.Symbol("t", positive=True)
    assert KAPPA == ScalarK.t() ** 2
    assert sp.simplify(central_charge().to_sympy(t) - (6 - t**2) * (3 * t**2 - 8) / (2 * t**2)) == 0
    assert sp.simplify(h12().to_sympy(t) - (6 - t**2) / (2 * t**2)) == 0
    assert ALPHA_ZERO == (ALPHA_PLUS + ALPHA_MINUS) / 2
    assert charge_weight(ALPHA_MINUS) == 1
    assert charge_weight(ALPHA) == h12()
    assert 1 - 24 * ALPHA_ZERO**2 == central_charge()
    assert dual_kappa() == 16 / KAPPA


@pytest.mark.parametrize("kappa, c, h", [(6, 0, 0), (Fraction(8, 3), 0, Fraction(5, 8)), (2, -2, 1), (4, 1, Fraction(1, 4))])
def test_specializations(kappa, c, h):
    assert central_charge().at_kappa(kappa) == c
    assert h12().at_kappa(kappa) == h


def test_irrational_root_needs_even_function():
    assert (KAPPA + 1).at_kappa(2) == 3
    with pytest.raises(SpecializationError):
        ScalarK.t().at_kappa(2)
    with pytest.raises(SpecializationError):
        (1 / (KAPPA - 4)).at_kappa(4)
    with pytest.raises(SpecializationError):
        KAPPA.at_kappa(-1)


def test_parse_scalar():
    assert parse_scalar("kappa-6") == KAPPA - 6
    assert parse_scalar("kappa/3") == KAPPA / 3
    assert parse_scalar("2") == ScalarK(2)


# Laurent series ----------------------------------------------------------------------

z = sp.Symbol("z")


def _to_sympy(s: LaurentSeries):
    return sum(sp.Rational(str(v)) * z**k for k, v in s.items())


@given(st.dictionaries(st.integers(-4, 2), small, min_size=1), st.dictionaries(st.integers(-4, 2), small, min_size=1))
def test_polynomial_products(a, b):
    A = LaurentSeries({k: Fraction(v) for k, v in a.items()})
    B = LaurentSeries({k: Fraction(v) for k, v in b.items()})
    want = sp.expand(_to_sympy(A) * _to_sympy(B))
    assert sp.expand(_to_sympy(A * B) - want) == 0


def test_inverse_matches_sympy_series():
    f = LaurentSeries({1: Fraction(1), -1: Fraction(2), -2: Fraction(-1)})
    inv = f.inverse(floor=-8)
    w = sp.Symbol("w")
    exact = sp.series(1 / (1 / w + 2 * w - w**2), w, 0, 9).removeO()
    for k in range(-8, 0):
        assert sp.Rational(str(inv.coefficient(k))) == exact.coeff(w, -k)


def test_window_is_enforced():
    f = MapSeries({2: Fraction(1)}, depth=4)
    s = f.power(-1)
    with pytest.raises(WindowError):
        s.coefficient(s.lo - 1)
    with pytest.raises(WindowError):
        series_power(f, 2, (-10, 2))
    with pytest.raises(WindowError):
        expand_inverse_power(f, Fraction(1), 1, -20)


def _numeric_map(vals, depth):
    return MapSeries({k: Fraction(v) for k, v in vals.items()}, depth)


def test_map_powers_against_sympy():
    vals = {2: 1, 3: -2, 4: 3, 5: 1}
    f = _numeric_map(vals, 5)
    w = sp.Symbol("w")
    fw = 1 / w + sum(v * w ** (k - 1) for k, v in vals.items())
    for n in (-2, -1, 2, 3):
        s = f.power(n)
        exact = sp.series(fw**n, w, 0, -(s.lo) + 1).removeO()
        for k in range(s.lo, n + 1):
            assert sp.Rational(str(s.coefficient(k))) == exact.coeff(w, -k), (n, k)


def test_schwarzian_against_sympy():
    vals = {2: 1, 3: 2, 4: -1, 5: 0, 6: 1}
    f = _numeric_map(vals, 6)
    S = schwarzian(f)
    w = sp.Symbol("w")
    zz = sp.Symbol("zz")
    F = zz + sum(v * zz ** (1 - k) for k, v in vals.items())
    exact = sp.diff(F, zz, 3) / sp.diff(F, zz) - sp.Rational(3, 2) * (sp.diff(F, zz, 2) / sp.diff(F, zz)) ** 2
    ser = sp.series(exact.subs(zz, 1 / w), w, 0, -S.lo + 1).removeO()
    for k in range(S.lo, 0):
        assert sp.Rational(str(S.coefficient(k))) == ser.coeff(w, -k)


@pytest.mark.parametrize("case", CASES)
def test_transport_identities_vanish(case):
    res = transport_identity_residual(case, depth=6)
    from slevir.algebra import is_zero_on_window

    assert is_zero_on_window(res)


def test_transport_identity_detects_a_wrong_right_side():
    lhs, rhs = transport_identity_residual("A1a", depth=6, sides=True)
    from slevir.algebra import is_zero_on_window

    assert not is_zero_on_window(lhs - rhs.scale(2))
