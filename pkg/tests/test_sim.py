"""Euler-Maruyama simulation of the driving process and the coefficient flow."""

import math
from fractions import Fraction

import numpy as np
import pytest

from slevir.sim import (
    SimConfig,
    capacity_expectation,
    exact_frozen_coefficients,
    frozen_flow_check,
    hill_estimator,
    martingale_drift_test,
    run_ensemble,
    simulate,
    worker_count,
)

SMALL = SimConfig(kappa=Fraction(2), n_paths=600, dt=1e-3, eta=1e-2, K=3, horizon=0.5, seed=5, block=200)


def _same(a, b):
    assert np.array_equal(a.tau, b.tau)
    for k in a.values:
        assert np.array_equal(a.values[k], b.values[k], equal_nan=True)


def test_seed_determinism():
    _same(run_ensemble(SMALL, [0, 0.25, 0.5]), run_ensemble(SMALL, [0, 0.25, 0.5]))


def test_different_seeds_differ():
    a = run_ensemble(SMALL)
    b = run_ensemble(SimConfig(**{**SMALL.__dict__, "seed": 6}))
    assert not np.array_equal(a.values["x"], b.values["x"])


def test_threads_do_not_change_results(monkeypatch):
    monkeypatch.setenv("SLEVIR_THREADS", "1")
    a = run_ensemble(SMALL)
    monkeypatch.setenv("SLEVIR_THREADS", "3")
    assert worker_count() == 3
    _same(a, run_ensemble(SMALL))


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("SLEVIR_THREADS", "many")
    with pytest.raises(ValueError):
        worker_count()


def test_chordal_driver_variance():
    cfg = SimConfig(variant="chordal", rho=(), kappa=Fraction(3), x0=(0.0,), y0=(), n_paths=4000, dt=1e-2, horizon=1.0, seed=1)
    res = run_ensemble(cfg, [0.0, 1.0])
    x = res.values["x"][-1]
    se = 3.0 * math.sqrt(2 / len(x))
    assert abs(x.var(ddof=1) - 3.0) < 4 * se
    assert np.all(res.reason == "horizon")


def test_chordal_capacity_grows_linearly():
    # g_{-2}(t) = 2t on every chordal path
    cfg = SimConfig(variant="chordal", rho=(), kappa=Fraction(3), x0=(0.0,), y0=(), n_paths=500, dt=1e-3, horizon=0.5, seed=2)
    res = run_ensemble(cfg, [0.0, 0.5])
    assert res.values["f2"][-1] == pytest.approx(np.full(500, 1.0), abs=1e-9)


def test_frozen_driver_flow():
    r = frozen_flow_check()
    e = r["euler_errors"]
    assert e[0] / e[1] == pytest.approx(2, rel=0.1) and e[1] / e[2] == pytest.approx(2, rel=0.1)
    assert max(r["richardson_errors"]) < e[-1] / 10


def test_exact_frozen_coefficients_at_zero_driver():
    # sqrt(z^2 + 4t) = z + 2t/z - 2t^2/z^3 + ...
    g = exact_frozen_coefficients(0.0, 0.3, 4)
    assert g[2] == pytest.approx(0.6) and g[3] == 0 and g[4] == pytest.approx(-0.18)


def test_stopping_at_the_gap():
    cfg = SimConfig(**{**SMALL.__dict__, "horizon": 50.0, "eps": 0.05, "n_paths": 200})
    res = run_ensemble(cfg)
    gap = res.values["y"][-1] - res.values["x"][-1]
    hit = res.reason == "collision"
    assert hit.mean() > 0.9
    assert np.all(gap[hit] <= 0.05 + 1e-12)


def test_records_stream():
    recs = list(simulate(SimConfig(**{**SMALL.__dict__, "n_paths": 3}), [0.0, 0.5]))
    assert [r.index for r in recs] == [0, 1, 2]
    assert set(recs[0].to_json()) == {"index", "times", "values", "tau", "stop"}


def test_good_and_broken_observables():
    from slevir import make_variant

    cfg = SimConfig(kappa=Fraction(2), n_paths=3000, dt=1e-3, eta=1e-2, K=3, horizon=1.0, seed=11)
    vs = make_variant("kappa-rho", rho=["kappa-6"], depth=8).vs
    Z = make_variant("kappa-rho", rho=["kappa-6"], depth=8).Z
    res = run_ensemble(cfg, np.linspace(0, 1.0, 11))
    good = martingale_drift_test(cfg, Z * vs.parse("(y-x)**2 + f2"), form="Zm", res=res)  # (3*2-8)/2 = -1
    broken = martingale_drift_test(cfg, Z * vs.parse("(y-x)**2 - f2"), form="Zm", res=res)
    assert good["pass"]
    assert max(abs(z) for z in broken["z_scores"]) > 10


def test_hill_estimator_on_pareto():
    rng = np.random.default_rng(0)
    sample = rng.pareto(0.7, 200_000) + 1
    assert hill_estimator(sample, 2000) == pytest.approx(0.7, rel=0.05)


def test_capacity_small_run():
    cfg = SimConfig(kappa=Fraction(2), n_paths=4000, dt=1.0, eta=0.005, K=2, horizon=1e5, seed=3)
    r = capacity_expectation(cfg)
    assert r["predicted"] == pytest.approx(1.0)
    assert r["hit_fraction"] == [1.0, 1.0, 1.0]
    assert abs(r["extrapolated"] - 1.0) < 5 * max(r["standard_errors"])


def test_invalid_config():
    with pytest.raises(ValueError):
        SimConfig(dt=0)
    with pytest.raises(ValueError):
        SimConfig(K=1)
