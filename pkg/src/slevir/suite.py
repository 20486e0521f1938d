"""Reproducible verification suite: every check exactly once, with a JSON report.

Each check returns ``{"pass": bool, "details": {...}}`` whose details are
deterministic for fixed settings.  Wall-clock times are reported separately
so that reports are byte-for-byte reproducible.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import fock, geometry, linalg, sim
from .algebra.scalar import ALPHA, ALPHA_ZERO, KAPPA, ScalarK, central_charge, charge_weight, h12
from .funcspace import VariableSet, random_element
from .sle import (
    apply_A,
    build_module,
    drift_commutator_residual,
    find_singular_null,
    make_variant,
    rho_weight,
    zeta_function,
)
from .virasoro import WeightAssignment, apply_L, apply_word, commutator_residual, q_poly

log = logging.getLogger(__name__)

SCHEMA_SUITE = "slevir.suite/1"

# exact reference expressions for the kappa(kappa-6) variant, ratio to Z
_H = "((6-kappa)/(2*kappa))"
_C = "((6-kappa)*(3*kappa-8)/(2*kappa))"
KAPPA_RHO_RATIOS = {
    (2,): f"{_H}*(y-x)**2 - {_C}/2*f2",
    (3,): f"2*{_H}*(y-x)**2*(x+y) - 2*{_C}*f3",
    (4,): f"{_H}*(y-x)**2*(3*x**2+4*x*y+3*y**2-6*f2) - {_C}*(f2**2+5*f4)",
    (2, 2): f"{_C}/2*(f2**2-6*f4) + ({_H}*(y-x)**2 - {_C}/2*f2)**2 + 2*{_H}*(y-x)**2*(-4*f2+x**2+x*y+y**2)",
}
# (word, ratio to zeta) for the second two-point solution zeta = (y-x)^{2/kappa}
ZETA_RATIOS = [
    ((), "1"),
    ((1,), "(8-kappa)/kappa*(y+x)"),
    ((2,), "((3*kappa**2-10*kappa-80)*f2+(44-6*kappa)*(x**2+y**2)+8*x*y)/(4*kappa)"),
]
Q_EXPECTED = {0: "-2", -1: "-4*x", -2: "-6*x**2+8*f2"}


@dataclass(frozen=True)
class SuiteSettings:
    seed: int = 0
    random_elements: int = 20
    # Monte Carlo sizes; ``quick`` shrinks them for smoke runs
    capacity_paths: int = 100_000
    drift_paths: int = 10_000
    flag_paths: int = 4096
    quick: bool = False

    @classmethod
    def quick_settings(cls, seed: int = 0) -> "SuiteSettings":
        return cls(seed=seed, random_elements=4, capacity_paths=20_000, drift_paths=4000, flag_paths=2048, quick=True)


def _rng(s: SuiteSettings, salt: int):
    return np.random.default_rng([s.seed, salt])


# 1 ---------------------------------------------------------------------------------


def check_virasoro_relations(s: SuiteSettings) -> dict:
    vs = VariableSet(("x", "y"), 12)
    w = WeightAssignment.of({"x": h12(), "y": rho_weight(ScalarK(2))})
    rng = _rng(s, 1)
    bad = []
    for k in range(s.random_elements):
        e = random_element(vs, rng, f_degree=4)
        for n in range(-3, 4):
            for m in range(-3, 4):
                if not commutator_residual(n, m, w, e).is_zero():
                    bad.append([k, n, m])
    return {"pass": not bad, "details": {"elements": s.random_elements, "pairs": 49, "failures": bad}}


# 2 ---------------------------------------------------------------------------------


def check_drift_commutator(s: SuiteSettings) -> dict:
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=12)
    vs = v.vs
    q_ok = {str(n): (q_poly(n, vs, "x") - vs.parse(txt)).is_zero() for n, txt in Q_EXPECTED.items()}
    rng = _rng(s, 2)
    bad = []
    for k in range(s.random_elements):
        e = random_element(vs, rng, f_degree=4)
        for n in (0, -1, -2):
            if not drift_commutator_residual(v, n, "x", e).is_zero():
                bad.append([k, n])
    return {"pass": not bad and all(q_ok.values()), "details": {"q_polynomials": q_ok, "failures": bad}}


# 3 ---------------------------------------------------------------------------------


def check_kappa_rho_table(s: SuiteSettings) -> dict:
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=8)
    w = v.weights
    match = {}
    for word, txt in KAPPA_RHO_RATIOS.items():
        e = apply_word([-a for a in word], w, v.Z)
        match["L" + "L".join(f"-{a}" for a in word)] = (v.ratio(e) - v.vs.parse(txt)).is_zero()
    translation_null = apply_L(-1, w, v.Z).is_zero()
    return {"pass": all(match.values()) and translation_null, "details": {"matches": match, "L-1 Z = 0": translation_null}}


# 4 ---------------------------------------------------------------------------------


def check_zeta_family(s: SuiteSettings) -> dict:
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=8)
    w = v.weights
    z = zeta_function(v)
    rows = []
    for word, txt in ZETA_RATIOS:
        e = apply_word([-a for a in word], w, z) if word else z
        same = (e - z * v.vs.parse(txt)).is_zero()
        killed = apply_A(v, "x", e).is_zero()
        rows.append({"word": [-a for a in word], "matches": same, "annihilated": killed})
    return {"pass": all(r["matches"] and r["annihilated"] for r in rows), "details": {"elements": rows}}


# 5 ---------------------------------------------------------------------------------


def check_exceptional_kappa(s: SuiteSettings) -> dict:
    v = make_variant("kappa-rho", rho=["kappa-6"], depth=8)
    vs = v.vs
    out: dict = {}
    out["kappa=6: L-2 Z = 0"] = apply_L(-2, v.weights, v.Z).specialize(kappa=Fraction(6)).is_zero()
    chordal = build_module(make_variant("chordal", depth=8), 4, kappa0=6)
    out["kappa=6: chordal dims"] = chordal.dims
    ok = out["kappa=6: L-2 Z = 0"] and chordal.dims == [1, 0, 0, 0, 0]

    r = find_singular_null(v, 2, Fraction(8, 3))
    sv = r["singular_vectors"]
    good = len(sv) == 1 and (sv[0]["ratio"] - vs.parse("5/8*(y-x)**2")).is_zero() and not r["null_vectors"]
    out["kappa=8/3: singular (5/8)(y-x)^2 Z"] = good
    ok = ok and good

    r = find_singular_null(v, 4, Fraction(10))
    nulls = r["null_vectors"]
    out["kappa=10: level-4 null vectors"] = nulls
    ok = ok and len(nulls) == 1 and not r["singular_vectors"]

    r = find_singular_null(v, 4, Fraction(8, 5))
    sv = r["singular_vectors"]
    good = False
    if len(sv) == 1:
        ratio = sv[0]["ratio"]
        c = Fraction(ratio.evaluate({"x": 0, "y": 1}, kappa=Fraction(8, 5))).limit_denominator(10**6)
        good = c != 0 and (ratio - vs.parse(f"{c}*(y-x)**4")).is_zero()
        out["kappa=8/5: singular coefficient of (y-x)^4"] = str(c)
    out["kappa=8/5: singular (y-x)^4 Z"] = good
    return {"pass": bool(ok and good), "details": out}


# 6 ---------------------------------------------------------------------------------


def check_chordal_dimensions(s: SuiteSettings) -> dict:
    mb = build_module(make_variant("chordal", depth=8), 6)
    expected = [1, 1, 1, 2, 3, 4, 6]
    return {"pass": mb.dims == expected, "details": {"dims": mb.dims, "expected": expected}}


# 7 ---------------------------------------------------------------------------------


def check_fock(s: SuiteSettings) -> dict:
    bad = []
    for level in range(7):
        for part in fock.fock_basis(level):
            # headroom so that no relation is cut by the truncation
            e = fock.FockElement.basis(ALPHA, part, 12)
            for n in range(-3, 4):
                for m in range(-3, 4):
                    if not fock.virasoro_residual(n, m, e).is_zero():
                        bad.append([list(part), n, m])
    heis = all(
        not fock.heisenberg_commutator_residual(n, m, part, ALPHA)
        for part in fock.fock_basis(3)
        for n in range(-3, 4)
        for m in range(-3, 4)
    )
    h_ok = charge_weight(ALPHA) == (6 - KAPPA) / (2 * KAPPA)
    c_ok = 1 - 24 * ALPHA_ZERO * ALPHA_ZERO == central_charge()
    return {
        "pass": not bad and heis and h_ok and c_ok,
        "details": {"virasoro_failures": bad, "heisenberg": heis, "h(alpha_12)": h_ok, "central_charge": c_ok},
    }


# 8 ---------------------------------------------------------------------------------


def _chordal_span(lmax: int) -> dict:
    v = make_variant("chordal", depth=8)
    comps = fock.state_components(v, lmax=lmax, D=6)
    mb = build_module(v, lmax)
    rows = {}
    for level in range(lmax + 1):
        cs = [c for p, c in comps if sum(p) == level and not c.is_zero()]
        ms = [mb.element(wd) for wd in mb.basis[level]]
        one = ScalarK(1)
        r_c = linalg.rank(linalg.coordinates(cs), one) if cs else 0
        r_m = len(ms)
        r_u = linalg.rank(linalg.coordinates(cs + ms), one) if cs or ms else 0
        rows[str(level)] = {"components": r_c, "module": r_m, "union": r_u, "equal": r_c == r_m == r_u}
    return rows


def check_fock_states(s: SuiteSettings) -> dict:
    runs = {}
    ok = True
    for label, rho in (("M=1 (kappa-6)", ["kappa-6"]), ("M=1 (2)", ["2"]), ("M=2 (2, kappa/3)", ["2", "kappa/3"])):
        v = make_variant("kappa-rho", rho=rho, depth=8)
        comps = fock.state_components(v, lmax=4, D=6)
        bad = fock.state_annihilation_failures(v, comps)
        runs[label] = {"components": len(comps), "failures": [[list(p), x] for p, x in bad]}
        ok = ok and not bad
    span = _chordal_span(4)
    ok = ok and all(r["equal"] for r in span.values())
    return {"pass": ok, "details": {"annihilation": runs, "chordal_span": span}}


# 9 ---------------------------------------------------------------------------------


def check_screening(s: SuiteSettings) -> dict:
    out = {}
    t = ScalarK.t()
    charge_sets = {1: [(KAPPA - 6) / (2 * t)], 2: [ScalarK(1) / t, KAPPA / (6 * t)], 3: [ScalarK(1) / t, -ALPHA, KAPPA / (4 * t)]}
    for M, alphas in charge_sets.items():
        out[f"coulomb M={M}"] = fock.coulomb_null_field_residual(alphas).is_zero()
    for N, L in ((2, 1), (3, 1)):
        for I in range(N):
            out[f"screening N={N} L={L} I={I + 1}"] = fock.screening_identity(N, L, I).is_zero()
    for I in range(2):
        out[f"screened state N=2 L=1 I={I + 1}"] = not fock.multiple_state_residual(2, 1, 3, I)
    return {"pass": all(out.values()), "details": out}


# 10 --------------------------------------------------------------------------------


def check_configurations(s: SuiteSettings) -> dict:
    counts = {}
    ok = True
    for N in range(1, 9):
        for L in range(N // 2 + 1):
            cs = geometry.enumerate_configs(N, L)
            good = len(cs) == geometry.config_count(N, L) and len(set(cs)) == len(cs)
            good = good and all(c.is_valid() and geometry.config_from_walk(c.walk()) == c for c in cs)
            counts[f"{N},{L}"] = len(cs)
            ok = ok and good
    return {"pass": ok, "details": {"counts": counts}}


# 11 --------------------------------------------------------------------------------


def check_feigin_fuchs(s: SuiteSettings) -> dict:
    P = geometry.PairingConfig
    out: dict = {"beta": {}, "null_field": {}, "exponents": {}}
    ok = True
    pair = P(2, ((1, 2),))
    for k in (4.5, 5.0, 6.0, 7.0):
        worst = 0.0
        for pts in ([0.0, 1.0], [-0.3, 0.8], [1.0, 3.5]):
            q = geometry.feigin_fuchs_Z(pair, pts, k)
            worst = max(worst, abs(q / geometry.beta_closed_form(pts, k) - 1))
        out["beta"][str(k)] = worst
        ok = ok and worst < 1e-8
    for k in (5.0, 6.0, 7.0):
        r = max(geometry.null_field_residual(pair, [0.0, 1.3], k, I) for I in (1, 2))
        out["null_field"][f"N=2 kappa={k}"] = r
        ok = ok and r < 1e-6
    for c in geometry.enumerate_configs(3, 1):
        r = max(geometry.null_field_residual(c, [0.0, 1.0, 2.5], 6.0, I) for I in (1, 2, 3))
        out["null_field"][f"N=3 {c.label()} kappa=6"] = r
        ok = ok and r < 1e-5

    def fit(label, cfg, pts, k, collapse, target, tol):
        nonlocal ok
        f = geometry.asymptotic_exponent(cfg, pts, k, collapse)
        err = abs(f.slope - target)
        out["exponents"][label] = {"slope": f.slope, "target": target, "error": err}
        ok = ok and err < tol

    for k in (5.0, 6.0, 7.0):
        fit(f"N=2 paired kappa={k}", pair, [0.0, 1.0], k, (1, 2), (k - 6) / k, 1e-3)
        fit(f"N=2 unpaired kappa={k}", P(2, ()), [0.0, 1.0], k, (1, 2), 2 / k, 1e-3)
        fit(f"N=4 (12)(34) collapse 12 kappa={k}", P(4, ((1, 2), (3, 4))), [0, 1, 2, 3], k, (1, 2), (k - 6) / k, 5e-3)
        fit(f"N=4 (12)(34) collapse 34 kappa={k}", P(4, ((1, 2), (3, 4))), [0, 1, 2, 3], k, (3, 4), (k - 6) / k, 5e-3)
        fit(f"N=4 (14)(23) collapse 23 kappa={k}", P(4, ((1, 4), (2, 3))), [0, 1, 2, 3], k, (2, 3), (k - 6) / k, 5e-3)
    # points on different arcs: the 2/kappa term dominates only for kappa > 8
    k = 16.0
    fit(f"N=4 (12)(34) collapse 23 kappa={k}", P(4, ((1, 2), (3, 4))), [0, 1, 2, 3], k, (2, 3), 2 / k, 5e-3)
    fit(f"N=4 (14)(23) collapse 12 kappa={k}", P(4, ((1, 4), (2, 3))), [0, 1, 2, 3], k, (1, 2), 2 / k, 5e-3)
    return {"pass": ok, "details": out}


# 12 --------------------------------------------------------------------------------


def _drift_configs(s: SuiteSettings):
    for kind, rho in (("chordal", ()), ("kappa-rho", ("kappa-6",))):
        for kappa in (Fraction(2), Fraction(3)):
            yield sim.SimConfig(
                variant=kind,
                rho=rho,
                kappa=kappa,
                x0=(0.0,),
                y0=(1.0,) if rho else (),
                dt=1e-3,
                eta=1e-2,
                K=3,
                eps=1e-2,
                n_paths=s.drift_paths,
                seed=s.seed + 11,
                horizon=1.0,
            )


def check_monte_carlo(s: SuiteSettings) -> dict:
    out: dict = {}
    cap_cfg = sim.SimConfig(
        kappa=Fraction(2), K=2, dt=1.0, eta=5e-3, eps=0.05, horizon=1e5, n_paths=s.capacity_paths, seed=s.seed + 7
    )
    cap = sim.capacity_expectation(cap_cfg)
    out["capacity"] = cap
    ok = cap["relative_error"] < 0.05

    drift = []
    for cfg in _drift_configs(s):
        v = cfg.variant_object()
        mb = build_module(v, 3)
        times = np.linspace(0.0, cfg.horizon, 11)
        res = sim.run_ensemble(cfg, times)
        for level in range(4):
            for wd in mb.basis[level]:
                label = "L" + "L".join(f"-{a}" for a in wd) + " Z" if wd else "Z"
                rep = sim.martingale_drift_test(cfg, mb.element(wd), form="Zm", res=res, label=label)
                drift.append({k: rep[k] for k in ("variant", "kappa", "observable", "z_scores", "pass")})
    out["drift"] = drift
    ok = ok and all(r["pass"] for r in drift)

    controls = []
    for cfg in _drift_configs(s):
        if cfg.variant != "kappa-rho":
            continue
        vs = cfg.variant_object().vs
        k = cfg.kappa
        good = vs.parse(f"(y-x)**2 - ({(3 * k - 8) / 2})*f2")
        broken = vs.parse("(y-x)**2 - f2")
        res = sim.run_ensemble(cfg, np.linspace(0.0, cfg.horizon, 11))
        rg = sim.martingale_drift_test(cfg, good, res=res, label="(y-x)^2 - (3k-8)/2 g2")
        rb = sim.martingale_drift_test(cfg, broken, res=res, label="(y-x)^2 - g2")
        zmax = max(abs(z) for z in rb["z_scores"])
        controls.append({"kappa": str(k), "good_pass": rg["pass"], "broken_max_abs_z": zmax, "broken_rejected": not rb["pass"]})
    out["controls"] = controls
    ok = ok and all(c["good_pass"] and c["broken_rejected"] for c in controls)
    # at kappa = 2 the broken drift is large enough to demand a wide margin
    ok = ok and controls[0]["broken_max_abs_z"] > 10

    flags = {}
    for kappa in (Fraction(4), Fraction(2)):
        cfg = sim.SimConfig(
            kappa=kappa, K=2, dt=1e6, eta=1e-2, eps=1e-2, horizon=1e8, n_paths=s.flag_paths, seed=s.seed + 13
        )
        sizes = (16, 64, 256, 1024) if s.flag_paths >= 4096 else (8, 32, 128, 512)
        flags[str(kappa)] = sim.integrability_flag(cfg, sizes=sizes)
    out["integrability"] = flags
    ok = ok and flags["4"]["flagged"] and not flags["2"]["flagged"]
    return {"pass": bool(ok), "details": out}


CHECKS: list[tuple[int, str, Callable[[SuiteSettings], dict]]] = [
    (1, "virasoro-relations", check_virasoro_relations),
    (2, "drift-commutator", check_drift_commutator),
    (3, "kappa-rho-table", check_kappa_rho_table),
    (4, "zeta-family", check_zeta_family),
    (5, "exceptional-kappa", check_exceptional_kappa),
    (6, "chordal-dimensions", check_chordal_dimensions),
    (7, "fock-consistency", check_fock),
    (8, "fock-states", check_fock_states),
    (9, "screening", check_screening),
    (10, "configurations", check_configurations),
    (11, "feigin-fuchs", check_feigin_fuchs),
    (12, "monte-carlo", check_monte_carlo),
]


def run_check(number: int, settings: SuiteSettings | None = None) -> dict:
    settings = settings or SuiteSettings()
    _, name, fn = CHECKS[number - 1]
    t0 = time.perf_counter()
    r = fn(settings)
    elapsed = time.perf_counter() - t0
    log.info("check %d %s: %s in %.1fs", number, name, "pass" if r["pass"] else "FAIL", elapsed)
    return {"id": number, "name": name, "pass": bool(r["pass"]), "details": r["details"], "seconds": elapsed}


def run_suite(settings: SuiteSettings | None = None, only: list[int] | None = None) -> tuple[dict, dict[int, float]]:
    """Run the selected checks; returns the deterministic report and per-check timings."""
    settings = settings or SuiteSettings()
    results, timings = [], {}
    for number, _, _ in CHECKS:
        if only and number not in only:
            continue
        r = run_check(number, settings)
        timings[number] = r.pop("seconds")
        results.append(r)
    report = {
        "schema": SCHEMA_SUITE,
        "seed": settings.seed,
        "quick": settings.quick,
        "checks": results,
        "pass": all(r["pass"] for r in results),
    }
    return report, timings
