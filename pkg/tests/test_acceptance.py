"""Acceptance criteria, one test per criterion, each within its runtime budget.

Reference expressions are transcribed here independently of the package.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from slevir import fock, geometry, linalg, sim
from slevir.algebra import ALPHA, ALPHA_ZERO, KAPPA, ScalarK, central_charge, charge_weight
from slevir.funcspace import VariableSet, random_element
from slevir.sle import apply_A, build_module, drift_commutator_residual, find_singular_null, make_variant, rho_weight, zeta_function
from slevir.virasoro import WeightAssignment, apply_L, apply_word, commutator_residual, q_poly

H = "((6-kappa)/(2*kappa))"
C = "((6-kappa)*(3*kappa-8)/(2*kappa))"


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert elapsed < self.seconds, f"took {elapsed:.1f}s, budget {self.seconds}s"


@pytest.fixture(scope="module")
def kr():
    return make_variant("kappa-rho", rho=["kappa-6"], depth=8)


@pytest.mark.criterion(1, "Virasoro relations")
def test_virasoro_relations():
    with Budget(60):
        vs = VariableSet(("x", "y"), 12)
        w = WeightAssignment.of({"x": (6 - KAPPA) / (2 * KAPPA), "y": rho_weight(ScalarK(2))})
        rng = np.random.default_rng(101)
        for _ in range(20):
            e = random_element(vs, rng, f_degree=4)
            for n in range(-3, 4):
                for m in range(-3, 4):
                    assert commutator_residual(n, m, w, e).is_zero(), (n, m)


@pytest.mark.criterion(2, "drift commutator")
def test_drift_commutator():
    with Budget(60):
        v = make_variant("kappa-rho", rho=["kappa-6"], depth=12)
        vs = v.vs
        assert q_poly(0, vs, "x") == vs.const(-2)
        assert q_poly(-1, vs, "x") == vs.parse("-4*x")
        assert q_poly(-2, vs, "x") == vs.parse("-6*x**2 + 8*f2")
        rng = np.random.default_rng(202)
        for _ in range(20):
            e = random_element(vs, rng, f_degree=4)
            for n in (0, -1, -2):
                assert drift_commutator_residual(v, n, "x", e).is_zero(), n


@pytest.mark.criterion(3, "golden table for kappa(kappa-6)")
def test_golden_table(kr):
    table = {
        (-2,): f"{H}*(y-x)**2 - {C}/2*f2",
        (-3,): f"2*{H}*(y-x)**2*(x+y) - 2*{C}*f3",
        (-4,): f"{H}*(y-x)**2*(3*x**2 + 4*x*y + 3*y**2 - 6*f2) - {C}*(f2**2 + 5*f4)",
        (-2, -2): f"{C}/2*(f2**2 - 6*f4) + ({H}*(y-x)**2 - {C}/2*f2)**2 + 2*{H}*(y-x)**2*(-4*f2 + x**2 + x*y + y**2)",
    }
    with Budget(10):
        for word, text in table.items():
            got = apply_word(list(word), kr.weights, kr.Z)
            assert (got - kr.Z * kr.vs.parse(text)).is_zero(), word
        assert apply_L(-1, kr.weights, kr.Z).is_zero()


@pytest.mark.criterion(4, "zeta family")
def test_zeta_family(kr):
    with Budget(10):
        vs = kr.vs
        zeta = zeta_function(kr)
        assert zeta == vs.difference_power("y", "x", 2 / KAPPA)
        tail = kr.Z * vs.difference_power("y", "x", (8 - KAPPA) / KAPPA)
        expected = [
            ([], tail),
            ([-1], tail * vs.parse("(8-kappa)/kappa*(y+x)")),
            ([-2], tail * vs.parse("((3*kappa**2 - 10*kappa - 80)*f2 + (44 - 6*kappa)*(x**2 + y**2) + 8*x*y)/(4*kappa)")),
        ]
        for word, want in expected:
            got = apply_word(word, kr.weights, zeta) if word else zeta
            assert (got - want).is_zero(), word
            assert apply_A(kr, "x", got).is_zero(), word


def _spec(e, kappa):
    return e.specialize(kappa=Fraction(kappa))


@pytest.mark.criterion(5, "exceptional kappa")
def test_exceptional_kappa(kr):
    with Budget(120):
        w, Z, vs = kr.weights, kr.Z, kr.vs
        # kappa = 6: c = h = 0, L_{-2} Z vanishes and the chordal module is trivial
        assert _spec(apply_L(-2, w, Z), 6).is_zero()
        assert build_module(make_variant("chordal", depth=8), 4, kappa0=6).dims == [1, 0, 0, 0, 0]

        # kappa = 8/3: L_{-2} Z = (5/8)(y-x)^2 Z is singular
        L2Z = apply_L(-2, w, Z)
        assert (_spec(L2Z, Fraction(8, 3)) - _spec(Z * vs.parse("5/8*(y-x)**2"), Fraction(8, 3))).is_zero()
        for n in (1, 2):
            assert _spec(apply_L(n, w, L2Z), Fraction(8, 3)).is_zero()
        r = find_singular_null(kr, 2, Fraction(8, 3))
        assert len(r["singular_vectors"]) == 1 and not r["null_vectors"]

        # kappa = 10: L_{-2} L_{-2} Z and L_{-4} Z are proportional
        combo = apply_word([-2, -2], w, Z) - apply_L(-4, w, Z).scale(ScalarK(3, 5))
        assert _spec(combo, 10).is_zero()
        assert not combo.is_zero()
        r = find_singular_null(kr, 4, Fraction(10))
        assert len(r["null_vectors"]) == 1 and not r["singular_vectors"]

        # kappa = 8/5: (y-x)^4 Z, killed by L_1 and L_2, joins the level-four span
        cand = Z * vs.parse("(y-x)**4")
        for n in (1, 2):
            assert apply_L(n, w, cand).is_zero()
        level4 = build_module(kr, 4)
        elems = [level4.element(wd) for wd in level4.basis[4]] + [cand]
        for k, rank in ((Fraction(8, 5), 2), (Fraction(2), 3)):
            assert linalg.rank(linalg.coordinates([_spec(e, k) for e in elems])) == rank
        r = find_singular_null(kr, 4, Fraction(8, 5))
        (sv,) = r["singular_vectors"]
        assert (sv["ratio"] - vs.parse("693/320*(y-x)**4")).is_zero()


@pytest.mark.criterion(6, "chordal graded dimensions")
def test_chordal_dimensions():
    with Budget(300):
        mb = build_module(make_variant("chordal", depth=8), 6)
        p = [1, 1, 2, 3, 5, 7, 11]
        assert mb.dims == [p[n] - (p[n - 2] if n >= 2 else 0) for n in range(7)] == [1, 1, 1, 2, 3, 4, 6]


@pytest.mark.criterion(7, "Fock space consistency")
def test_fock_consistency():
    with Budget(60):
        for level in range(7):
            for part in fock.fock_basis(level):
                e = fock.FockElement.basis(ALPHA, part, 12)
                for n in range(-3, 4):
                    for m in range(-3, 4):
                        assert fock.virasoro_residual(n, m, e, ALPHA_ZERO).is_zero(), (part, n, m)
        assert charge_weight(ALPHA) == (6 - KAPPA) / (2 * KAPPA)
        assert 1 - 24 * ALPHA_ZERO**2 == (6 - KAPPA) * (3 * KAPPA - 8) / (2 * KAPPA) == central_charge()


@pytest.mark.criterion(8, "Coulomb-gas states")
def test_states():
    with Budget(600):
        for rho in (["kappa-6"], ["2"], ["2", "kappa/3"]):
            v = make_variant("kappa-rho", rho=rho, depth=8)
            comps = fock.state_components(v, lmax=4, D=6)
            assert len(comps) == 1 + 1 + 2 + 3 + 5
            assert fock.state_annihilation_failures(v, comps) == [], rho
        chordal = make_variant("chordal", depth=8)
        comps = fock.state_components(chordal, lmax=4, D=6)
        mb = build_module(chordal, 4)
        one = ScalarK(1)
        for level in range(5):
            cs = [c for p, c in comps if sum(p) == level and not c.is_zero()]
            ms = [mb.element(wd) for wd in mb.basis[level]]
            r_c = linalg.rank(linalg.coordinates(cs), one) if cs else 0
            r_all = linalg.rank(linalg.coordinates(cs + ms), one)
            assert r_c == len(ms) == r_all, level


@pytest.mark.criterion(9, "screening identities")
def test_screening():
    with Budget(120):
        t = ScalarK.t()
        for alphas in ([(KAPPA - 6) / (2 * t)], [1 / t, KAPPA / (6 * t)], [1 / t, -ALPHA, KAPPA / (4 * t)]):
            assert fock.coulomb_null_field_residual(alphas).is_zero()
        for N, L in ((2, 1), (3, 1)):
            for I in range(N):
                assert fock.screening_identity(N, L, I).is_zero(), (N, L, I)
        assert fock.multiple_state_residual(2, 1, 3, 0) == []


@pytest.mark.criterion(10, "pure-geometry combinatorics")
def test_configurations():
    from math import factorial

    with Budget(5):
        for N in range(1, 9):
            for L in range(N // 2 + 1):
                cs = geometry.enumerate_configs(N, L)
                assert len(cs) == (N + 1 - 2 * L) * factorial(N) // (factorial(L) * factorial(N - L + 1))
                assert len(set(cs)) == len(cs)
                for c in cs:
                    assert c.is_valid()
                    assert geometry.config_from_walk(c.walk()) == c


@pytest.mark.criterion(11, "Feigin-Fuchs numerics")
def test_feigin_fuchs():
    from scipy.special import beta

    P = geometry.PairingConfig
    with Budget(600):
        arc = P(2, ((1, 2),))
        for k in (4.5, 5.0, 6.0, 7.0):
            for x1, x2 in ((0.0, 1.0), (-0.3, 0.8), (1.0, 3.5)):
                want = (x2 - x1) ** ((k - 6) / k) * beta(1 - 4 / k, 1 - 4 / k)
                assert geometry.feigin_fuchs_Z(arc, [x1, x2], k) == pytest.approx(want, rel=1e-8)
        for k in (5.0, 6.0, 7.0):
            for I in (1, 2):
                assert geometry.null_field_residual(arc, [0.0, 1.3], k, I) < 1e-6
        for c in geometry.enumerate_configs(3, 1):
            for I in (1, 2, 3):
                assert geometry.null_field_residual(c, [0.0, 1.0, 2.5], 6.0, I) < 1e-5

        def slope(cfg, pts, k, pair):
            return geometry.asymptotic_exponent(cfg, pts, k, pair).slope

        for k in (5.0, 6.0, 7.0):
            assert slope(arc, [0.0, 1.0], k, (1, 2)) == pytest.approx((k - 6) / k, abs=1e-3)
            assert slope(P(2, ()), [0.0, 1.0], k, (1, 2)) == pytest.approx(2 / k, abs=1e-3)
            for cfg, pair in ((P(4, ((1, 2), (3, 4))), (1, 2)), (P(4, ((1, 2), (3, 4))), (3, 4)), (P(4, ((1, 4), (2, 3))), (2, 3))):
                assert slope(cfg, [0, 1, 2, 3], k, pair) == pytest.approx((k - 6) / k, abs=5e-3)
        # two points from different arcs: 2/kappa leads once kappa > 8
        for cfg, pair in ((P(4, ((1, 2), (3, 4))), (2, 3)), (P(4, ((1, 4), (2, 3))), (1, 2))):
            assert slope(cfg, [0, 1, 2, 3], 16.0, pair) == pytest.approx(2 / 16, abs=5e-3)


@pytest.mark.criterion(12, "Monte Carlo")
def test_monte_carlo():
    with Budget(1800):
        cap = sim.capacity_expectation(
            sim.SimConfig(kappa=Fraction(2), K=2, dt=1.0, eta=5e-3, eps=0.05, horizon=1e5, n_paths=100_000, seed=7)
        )
        assert cap["predicted"] == pytest.approx(2 / (8 - 6) * 1.0**2)
        assert abs(cap["extrapolated"] - cap["predicted"]) / cap["predicted"] < 0.05

        times = np.linspace(0.0, 1.0, 11)
        broken_z = {}
        for kind, rho in (("chordal", ()), ("kappa-rho", ("kappa-6",))):
            for kappa in (Fraction(2), Fraction(3)):
                cfg = sim.SimConfig(
                    variant=kind, rho=rho, kappa=kappa, x0=(0.0,), y0=(1.0,) if rho else (),
                    dt=1e-3, eta=1e-2, K=3, eps=1e-2, n_paths=10_000, seed=11, horizon=1.0,
                )
                v = cfg.variant_object()
                res = sim.run_ensemble(cfg, times)
                mb = build_module(v, 3)
                for level in range(4):
                    for wd in mb.basis[level]:
                        rep = sim.martingale_drift_test(cfg, mb.element(wd), form="Zm", res=res)
                        assert max(abs(z) for z in rep["z_scores"]) < 4, (kind, kappa, wd)
                if kind == "kappa-rho":
                    vs = v.vs
                    good = vs.parse(f"(y-x)**2 - ({(3 * kappa - 8) / 2})*f2")
                    assert sim.martingale_drift_test(cfg, good, res=res)["pass"]
                    rep = sim.martingale_drift_test(cfg, vs.parse("(y-x)**2 - f2"), res=res)
                    broken_z[kappa] = max(abs(z) for z in rep["z_scores"])
        assert broken_z[Fraction(2)] > 10 and broken_z[Fraction(3)] > 4

        flags = {}
        for kappa in (Fraction(4), Fraction(2)):
            cfg = sim.SimConfig(kappa=kappa, K=2, dt=1e6, eta=1e-2, eps=1e-2, horizon=1e8, n_paths=4096, seed=13)
            flags[kappa] = sim.integrability_flag(cfg)["flagged"]
        assert flags[Fraction(4)] and not flags[Fraction(2)]
