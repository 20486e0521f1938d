"""Charged Fock spaces, vertex operators, G_f and the Coulomb-gas states."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slevir import make_variant
from slevir.algebra import ALPHA, ALPHA_MINUS, ALPHA_ZERO, KAPPA, ScalarK
from slevir.errors import LevelOverflowError
from slevir.fock import (
    FockElement,
    _multiple_variant,
    _pairs,
    build_Gf,
    coulomb_null_field_residual,
    converse_relation_residual,
    defining_relation_residual,
    fock_basis,
    fock_virasoro,
    heisenberg_commutator_residual,
    mixed_partials_commute,
    multiple_state_residual,
    screening_identity,
    screening_vs,
    state_annihilation_failures,
    state_components,
    state_to_json,
    vertex_intertwining_residual,
    virasoro_residual,
)
from slevir.sle import null_field_operator

parts = st.integers(0, 5).flatmap(lambda n: st.sampled_from(fock_basis(n)))


def test_basis_sizes():
    assert [len(fock_basis(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]


@given(parts, st.integers(-4, 4), st.integers(-4, 4))
def test_heisenberg_relations(part, n, m):
    assert heisenberg_commutator_residual(n, m, part, ALPHA) == {}


def test_heisenberg_zero_mode_is_charge():
    # [a_1, a_{-1}] v = 2 v; with the unnormalized bracket n delta it would be 1
    assert heisenberg_commutator_residual(1, -1, (), ALPHA) == {}


@given(parts, st.integers(-3, 3), st.integers(-3, 3))
def test_virasoro_relations_on_fock_space(part, n, m):
    e = FockElement.basis(ALPHA, part, 12)
    assert virasoro_residual(n, m, e).is_zero()


def test_vacuum_weight():
    v = FockElement.vacuum(ALPHA, 4)
    L0 = fock_virasoro(0, v)
    h = ALPHA * ALPHA - 2 * ALPHA * ALPHA_ZERO
    assert L0.component(()) == h
    assert fock_virasoro(1, v).is_zero()


def test_truncation_overflow():
    with pytest.raises(LevelOverflowError):
        fock_virasoro(-1, FockElement.vacuum(ALPHA, 0))


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("part", [(), (1,), (1, 1), (2,)])
def test_vertex_operator_intertwines(n, part):
    assert vertex_intertwining_residual(ALPHA, ALPHA_MINUS, n, part, level=3).is_zero()


@pytest.fixture(scope="module")
def G():
    return build_Gf(5)


def test_G_defining_relations(G):
    for m in range(-2, -6, -1):
        assert defining_relation_residual(G, m) == {}


def test_G_converse_relations(G):
    for k in range(-2, -5, -1):
        assert converse_relation_residual(G, k) == {}, k


def test_G_mixed_partials(G):
    assert mixed_partials_commute(G)


def test_G_low_order_terms(G):
    gens = G.ctx.gens()
    f2, f3, f4 = (gens[G.ctx.variable_to_index(f"f{k}")] for k in (2, 3, 4))
    assert G.terms[()] == 1
    assert G.terms[(2,)] == -f2
    assert G.terms[(3,)] == -f3
    assert G.terms[(2, 2)] == f2**2 / 2
    assert G.terms[(4,)] == -(f2**2) / 2 - f4


def test_G_rejects_a_perturbed_coefficient(G):
    from slevir.fock import EnvelopingElement

    terms = dict(G.terms)
    terms[(2,)] = terms[(2,)] * 2
    bad = EnvelopingElement(terms, G.degree, G.ctx)
    assert defining_relation_residual(bad, -2) != {}


@pytest.fixture(scope="module")
def kappa_rho_state():
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=6)
    return v, state_components(v, lmax=3, D=5)


def test_state_is_annihilated(kappa_rho_state):
    v, comps = kappa_rho_state
    assert state_annihilation_failures(v, comps) == []
    assert comps[0][1] == v.vs.one()


def test_perturbed_state_is_not_annihilated(kappa_rho_state):
    v, comps = kappa_rho_state
    bad = [(p, c + v.vs.var("x") if p == (1,) else c) for p, c in comps]
    assert [p for p, _ in state_annihilation_failures(v, bad)] == [(1,)]


def test_state_json(kappa_rho_state):
    v, comps = kappa_rho_state
    doc = state_to_json(v, comps)
    assert [c["partition"] for c in doc["components"]][:4] == [[], [1], [2], [1, 1]]


@pytest.mark.parametrize("M", [1, 2, 3])
def test_coulomb_functions_solve_null_field(M):
    alphas = [ScalarK(k + 1) / 5 + ALPHA * k for k in range(M)]
    assert coulomb_null_field_residual(alphas).is_zero()


@pytest.mark.parametrize("N, L", [(2, 1), (3, 1), (4, 2)])
def test_screening_is_a_total_derivative(N, L):
    for I in range(N):
        assert screening_identity(N, L, I).is_zero()


def test_screening_fails_with_the_wrong_exponent():
    vs, xs, ws = screening_vs(2, 1)
    h = vs.difference_power(xs[1], xs[0], 2 / KAPPA)
    for x in xs:
        h = h * vs.difference_power(x, ws[0], -2 / KAPPA)  # should be -4/kappa
    v = _multiple_variant(vs, xs, h)
    out = null_field_operator(v, xs[0], h)
    out = out + (h * vs.difference_power(ws[0], xs[0], -1)).derive(ws[0]).scale(2)
    assert not out.is_zero()
    assert _pairs(3) == [(0, 1), (0, 2), (1, 2)]


def test_multiple_state_drift_is_a_total_derivative():
    assert multiple_state_residual(2, 1, lmax=2) == []
