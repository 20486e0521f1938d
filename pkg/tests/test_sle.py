"""SLE variants, drift operators and the Virasoro module of local martingales."""

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from slevir import DepthError, NullFieldError, SpecializationError, apply_A, build_module, find_singular_null, make_variant
from slevir.algebra import KAPPA, ScalarK
from slevir.funcspace import VariableSet, random_element
from slevir.sle import (
    drift_commutator_residual,
    mobius_covariance_check,
    normal_order,
    p_poly,
    p_poly_residue,
    partitions,
    positivity_check,
    translation_residual,
    zeta_function,
)
from slevir.virasoro import apply_word


def test_transport_polynomials_two_routes():
    vs = VariableSet(("x",), 9)
    for m in range(-2, -10, -1):
        assert p_poly(m, vs, "x") == p_poly_residue(m, vs, "x"), m


def test_transport_polynomials_low_orders():
    vs = VariableSet(("x",), 6)
    assert p_poly(-2, vs, "x") == vs.one()
    assert p_poly(-3, vs, "x") == vs.var("x")
    assert p_poly(-4, vs, "x") == vs.parse("x**2 - f2")


@pytest.mark.parametrize("n", range(0, 9))
def test_partitions_count(n):
    ps = partitions(n)
    assert len(ps) == sp.functions.combinatorial.numbers.partition(n)
    assert all(list(p) == sorted(p, reverse=True) for p in ps)


def test_normal_ordering_basic_bracket():
    # L_{-1} L_{-2} = L_{-2} L_{-1} + L_{-3}
    assert normal_order((1, 2)) == {(2, 1): 1, (3,): 1}


@given(st.lists(st.integers(1, 3), min_size=2, max_size=3), st.integers(0, 1000))
def test_normal_ordering_preserves_the_action(word, seed):
    v = make_variant("kappa-rho", rho=["2"], depth=10)
    e = random_element(v.vs, np.random.default_rng(seed), f_degree=2, point_degree=1, n_terms=2)
    direct = apply_word([-a for a in word], v.weights, e)
    ordered = v.vs.zero()
    for wd, c in normal_order(tuple(word)).items():
        ordered = ordered + apply_word([-a for a in wd], v.weights, e).scale(c)
    assert (direct - ordered).is_zero()


@pytest.mark.parametrize(
    "kind, kw",
    [
        ("chordal", {}),
        ("kappa-rho", {"rho": ["kappa-6"]}),
        ("kappa-rho", {"rho": ["2", "kappa/3"]}),
        ("multiple", {"n": 2, "geometry": "paired"}),
        ("multiple", {"n": 2, "geometry": "unpaired"}),
    ],
)
def test_partition_functions_solve_the_null_field_equations(kind, kw):
    v = make_variant(kind, depth=6, **kw)
    for xi in v.xs:
        assert v.D(xi, v.Z).is_zero()
        assert apply_A(v, xi, v.Z).is_zero()
    assert translation_residual(v).is_zero()


def test_wrong_partition_function_rejected():
    vs = VariableSet(("x", "y"), 6)
    Z = vs.difference_power("y", "x", ScalarK(1) / KAPPA)
    with pytest.raises(NullFieldError):
        make_variant("custom", order=("x", "y"), Z=Z, hy={"y": 0})


def test_mobius_covariance_of_kappa_rho():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=6)
    assert all(r["pass"] for r in mobius_covariance_check(v).values())


@pytest.mark.parametrize("geometry", ["paired", "unpaired"])
def test_positivity(geometry):
    v = make_variant("multiple", n=2, geometry=geometry, depth=4)
    assert positivity_check(v, Fraction(3), samples=50)


@given(st.integers(0, 10_000), st.sampled_from([0, -1, -2]))
def test_drift_commutator(seed, n):
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=10)
    e = random_element(v.vs, np.random.default_rng(seed), f_degree=4)
    assert drift_commutator_residual(v, n, "x", e).is_zero()


def test_drift_commutator_fails_for_wrong_q():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=10)
    e = v.vs.parse("x*y + f2")
    w = v.weights
    from slevir.virasoro import apply_L

    Ae = apply_A(v, "x", e)
    lhs = apply_L(-1, w, Ae) - apply_A(v, "x", apply_L(-1, w, e))
    assert not (lhs - Ae.scale(-4)).is_zero()  # q_{-1} is -4x, not -4


@pytest.mark.parametrize(
    "kind, kw, dims",
    [
        ("chordal", {}, [1, 1, 1, 2, 3, 4, 6]),
        ("kappa-rho", {"rho": ["kappa-6"]}, [1, 0, 1, 1, 2, 2, 4]),
    ],
)
def test_graded_dimensions(kind, kw, dims):
    v = make_variant(kind, depth=8, **kw)
    mb = build_module(v, len(dims) - 1)
    assert mb.dims == dims
    assert mb.verified


def test_module_json_words_are_negative_indices():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=6)
    doc = build_module(v, 2).to_json()
    assert doc["graded_dimensions"] == [1, 0, 1]
    assert doc["levels"][2]["basis"][0]["word"] == [-2]


def test_depth_guard():
    v = make_variant("chordal", depth=3)
    with pytest.raises(DepthError):
        build_module(v, 4)


def test_singular_rejects_nonpositive_kappa():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=4)
    with pytest.raises(SpecializationError):
        find_singular_null(v, 2, Fraction(-1))


def test_generic_kappa_has_no_singular_vectors_at_level_two():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=6)
    r = find_singular_null(v, 2)
    assert r["singular_vectors"] == [] and r["null_vectors"] == []


def test_zeta_is_a_second_solution():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=6)
    z = zeta_function(v)
    assert apply_A(v, "x", z).is_zero()
    assert not (z * v.Z_inverse()).is_polynomial()
