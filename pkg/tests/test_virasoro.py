"""The first-order differential operators L_n on the function space."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slevir import DepthError, VariableSet, WeightAssignment, apply_L, apply_L_explicit, commutator_residual
from slevir.algebra import KAPPA, ScalarK, central_charge, h12
from slevir.funcspace import random_element
from slevir.sle import make_variant, rho_weight
from slevir.virasoro import apply_L_hat, log_derivative, q_poly

VS = VariableSet(("x", "y"), 10)
W = WeightAssignment.of({"x": h12(), "y": rho_weight(KAPPA - 6)})


def _random(seed, vs=VS):
    return random_element(vs, np.random.default_rng(seed), f_degree=4, exponents=(ScalarK(2) / KAPPA,))


@given(st.integers(0, 10_000))
def test_residue_formula_matches_closed_forms(seed):
    e = _random(seed)
    for n in (-2, -1, 0, 1, 2, 3):
        assert (apply_L(n, W, e) - apply_L_explicit(n, W, e)).is_zero(), n


@given(st.integers(0, 10_000))
def test_commutation_relations_sample(seed):
    e = _random(seed)
    for n, m in ((-2, 2), (-1, 1), (-3, 1), (2, -1), (-2, -1)):
        assert commutator_residual(n, m, W, e).is_zero()


def test_central_term_is_needed():
    # any c gives a representation when operators and relation use the same c
    e = VS.one()
    for c in (ScalarK(0), central_charge(), ScalarK(7)):
        w = WeightAssignment.of(dict(W.deltas), c=c)
        bracket = apply_L(2, w, apply_L(-2, w, e)) - apply_L(-2, w, apply_L(2, w, e)) - apply_L(0, w, e).scale(4)
        assert (bracket - e.scale(c / 2)).is_zero()
        assert not (bracket - e.scale((c + 1) / 2)).is_zero()


def test_L0_grades_homogeneous_elements():
    x, y = VS.var("x"), VS.var("y")
    pref = VS.difference_power("y", "x", ScalarK(2) / KAPPA)
    e = pref * (x * x * y + 3 * x * VS.f(-2) - VS.f(-3))
    d = e.homogeneity_degree()
    total = d + W.delta("x") + W.delta("y")
    assert (apply_L(0, W, e) - e.scale(total)).is_zero()


def test_highest_weight_vector_of_kappa_rho():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=8)
    for n in (1, 2, 3):
        assert apply_L(n, v.weights, v.Z).is_zero()
    assert (apply_L(0, v.weights, v.Z) - v.Z.scale(v.highest_weight)).is_zero()
    assert v.highest_weight == 0


def test_q_polynomials():
    assert q_poly(0, VS, "x") == VS.const(-2)
    assert q_poly(-1, VS, "x") == VS.var("x").scale(-4)
    assert q_poly(-2, VS, "x") == VS.parse("-6*x**2 + 8*f2")
    assert q_poly(1, VS, "x").is_zero()
    assert q_poly(-3, VS, "x").homogeneity_degree() == 3


@given(st.integers(0, 10_000))
def test_conjugated_action_two_routes(seed):
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=10)
    phi = random_element(v.vs, np.random.default_rng(seed), f_degree=4)
    for n in (-2, -1, 0, 1, 2):
        a = apply_L_hat(n, v.weights, v.Z, phi, "formula")
        b = apply_L_hat(n, v.weights, v.Z, phi, "divide")
        assert (a - b).is_zero(), n


def test_log_derivative():
    Z = VS.difference_power("y", "x", (KAPPA - 6) / KAPPA)
    got = log_derivative(Z, "x")
    want = VS.difference_power("y", "x", -1).scale(-(KAPPA - 6) / KAPPA)
    assert got == want


def test_depth_overflow_raises():
    small = VariableSet(("x",), 3)
    w = WeightAssignment.of({"x": h12()})
    with pytest.raises(DepthError):
        apply_L(-5, w, small.one())
