"""Euler-Maruyama integration of SLE driving processes and Loewner coefficients.

All curves grow at unit speed, d<A^I>_t = dt.  For each path

    dX^I = sqrt(k_I) dB^I + sum_{J != I} 2/(X^I - X^J) dt + k_I d_I log Z dt
    dY^K = sum_J 2/(Y^K - X^J) dt
    dg_m = 2 sum_I p_m(-X^I, g) dt            (m = -2, ..., -K)

The step is dt_path = min(dt, eta * gap^2, time to next record), where gap is
the smallest distance between neighbouring points.  A path stops when the
gap drops to eps or the horizon is reached.  Paths are simulated in blocks
of fixed size; block b draws from SeedSequence(seed, spawn_key=(b,)), so a
path's trajectory depends only on (seed, path index, config).
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .algebra.scalar import ScalarK
from .errors import ChamberError
from .funcspace import Element
from .sle import SleVariant, make_variant, p_recursive
from .virasoro import log_derivative

log = logging.getLogger(__name__)

SCHEMA_DRIFT = "slevir.drift/1"
SCHEMA_SIM = "slevir.sim/1"


@dataclass(frozen=True)
class SimConfig:
    variant: str = "kappa-rho"
    rho: tuple[str, ...] = ("kappa-6",)
    n_curves: int | None = None
    geometry: str = "paired"
    kappa: Fraction = Fraction(2)
    x0: tuple[float, ...] = (0.0,)
    y0: tuple[float, ...] = (1.0,)
    dt: float = 1e-3
    eta: float = 1e-2
    K: int = 4
    eps: float = 1e-2
    n_paths: int = 1000
    seed: int = 0
    horizon: float = 1.0
    block: int = 4096

    def __post_init__(self):
        if self.dt <= 0 or self.eps <= 0 or self.eta <= 0:
            raise ValueError("dt, eps and eta must be positive")
        if self.K < 2:
            raise ValueError("K must be at least 2")

    def variant_object(self) -> SleVariant:
        kind = self.variant
        if kind == "chordal":
            return make_variant("chordal", depth=max(self.K, 8))
        if kind == "kappa-rho":
            return make_variant("kappa-rho", rho=list(self.rho), depth=max(self.K, 8))
        if kind == "multiple":
            return make_variant("multiple", n=self.n_curves or len(self.x0), geometry=self.geometry, depth=max(self.K, 8))
        raise ValueError(f"unsupported variant {kind!r}")

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "rho": list(self.rho),
            "geometry": self.geometry,
            "kappa": str(self.kappa),
            "x0": list(self.x0),
            "y0": list(self.y0),
            "dt": self.dt,
            "eta": self.eta,
            "K": self.K,
            "eps": self.eps,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "horizon": self.horizon,
        }


class _Model:
    """Numeric drift data for one variant at one kappa."""

    def __init__(self, cfg: SimConfig):
        v = cfg.variant_object()
        self.v = v
        self.cfg = cfg
        k0 = float(cfg.kappa)
        self.k0 = k0
        self.xs = v.xs
        self.ys = v.ys
        self.order = v.vs.points
        if len(cfg.x0) != len(self.xs) or len(cfg.y0) != len(self.ys):
            raise ValueError(f"variant needs {len(self.xs)} curve and {len(self.ys)} marked starting points")
        self.kappas = [v.kappas[x].evalf_kappa(k0) for x in self.xs]
        self.logder = []
        for x in self.xs:
            ld = log_derivative(v.Z, x)
            self.logder.append(None if ld.is_zero() else ld.numeric(k0))
        start = dict(zip(self.xs, cfg.x0)) | dict(zip(self.ys, cfg.y0))
        pos = [start[p] for p in self.order]
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ChamberError("initial points must be strictly ordered in the chamber")
        self.start = start

    def values(self, X: np.ndarray, Y: np.ndarray) -> dict:
        out = {x: X[i] for i, x in enumerate(self.xs)}
        out.update({y: Y[k] for k, y in enumerate(self.ys)})
        return out

    def gap(self, vals: dict) -> np.ndarray:
        pts = [vals[p] for p in self.order]
        if len(pts) < 2:
            return np.full(np.shape(pts[0]), np.inf)
        return np.min(np.stack([b - a for a, b in zip(pts, pts[1:])]), axis=0)

    def drifts(self, X, Y, g):
        vals = self.values(X, Y)
        dX = np.zeros_like(X)
        for i in range(len(self.xs)):
            for j in range(len(self.xs)):
                if j != i:
                    dX[i] += 2.0 / (X[i] - X[j])
            if self.logder[i] is not None:
                dX[i] += self.kappas[i] * self.logder[i](vals)
        dY = np.zeros_like(Y)
        for k in range(len(self.ys)):
            for j in range(len(self.xs)):
                dY[k] += 2.0 / (Y[k] - X[j])
        K = self.cfg.K
        dg = np.zeros_like(g)
        fs = {k: g[k - 2] for k in range(2, K + 1)}
        one = np.ones_like(X[0])
        for i in range(len(self.xs)):
            for m in range(2, K + 1):
                dg[m - 2] += 2.0 * p_recursive(-m, -X[i], fs, one)
        return dX, dY, dg


@dataclass
class EnsembleResult:
    times: np.ndarray
    values: dict  # name -> array (n_times, n_paths), stopped at tau
    tau: np.ndarray
    reason: np.ndarray  # "collision" | "horizon"
    crossings: dict = field(default_factory=dict)  # level -> {"hit": bool array, name: values}
    rejections: int = 0

    @property
    def n_paths(self) -> int:
        return len(self.tau)


def _state_names(model: _Model) -> list[str]:
    return list(model.xs) + list(model.ys) + [f"f{k}" for k in range(2, model.cfg.K + 1)]


def _run_block(model: _Model, n: int, rng: np.random.Generator, times: np.ndarray, levels: Sequence[float]):
    cfg = model.cfg
    N, M, K = len(model.xs), len(model.ys), cfg.K
    X = np.tile(np.asarray([model.start[x] for x in model.xs], float)[:, None], (1, n))
    Y = np.tile(np.asarray([model.start[y] for y in model.ys], float)[:, None], (1, n)).reshape(M, n)
    g = np.zeros((K - 1, n))
    t = np.zeros(n)
    alive = np.ones(n, bool)
    reason = np.array(["horizon"] * n, dtype=object)
    names = _state_names(model)
    rec = {name: np.empty((len(times), n)) for name in names}
    next_rec = np.zeros(n, dtype=int)
    crossings = {lv: {"hit": np.zeros(n, bool), **{name: np.full(n, np.nan) for name in names}} for lv in levels}
    sq = np.sqrt(np.asarray(model.kappas))[:, None]
    rejections = 0

    def snapshot(idx):
        return np.concatenate([X[:, idx], Y[:, idx], g[:, idx]], axis=0)

    def record(idx, k):
        st = snapshot(idx)
        for r, name in enumerate(names):
            rec[name][k, idx] = st[r]

    # time 0 records
    while True:
        due = alive & (next_rec < len(times)) & (np.abs(times[np.minimum(next_rec, len(times) - 1)] - t) < 1e-12)
        if not due.any():
            break
        for k in np.unique(next_rec[due]):
            sel = np.where(due & (next_rec == k))[0]
            record(sel, k)
        next_rec[due] += 1

    horizon = times[-1] if len(times) else cfg.horizon
    while alive.any():
        idx = np.where(alive)[0]
        Xa, Ya, ga = X[:, idx], Y[:, idx], g[:, idx]
        vals = model.values(Xa, Ya)
        gap = model.gap(vals)
        target = times[np.minimum(next_rec[idx], len(times) - 1)]
        target = np.where(next_rec[idx] < len(times), target, horizon)
        dt = np.minimum(cfg.dt, cfg.eta * gap * gap)
        dt = np.minimum(dt, np.maximum(target - t[idx], 0.0))
        dt = np.where(dt <= 0, 1e-15, dt)
        dX, dY, dg = model.drifts(Xa, Ya, ga)
        Z = rng.standard_normal((N, len(idx)))
        inc = sq * np.sqrt(dt) * Z + dX * dt
        # reject wild steps and halve their dt
        for _ in range(30):
            bad = np.any(np.abs(inc) > 10 * sq * np.sqrt(dt), axis=0)
            if not bad.any():
                break
            rejections += int(bad.sum())
            dt = np.where(bad, dt / 2, dt)
            Z2 = rng.standard_normal((N, len(idx)))
            inc = np.where(bad, sq * np.sqrt(dt) * Z2 + dX * dt, inc)
        Xn = Xa + inc
        Yn = Ya + dY * dt
        gn = ga + dg * dt
        tn = t[idx] + dt
        newvals = model.values(Xn, Yn)
        pts = [newvals[p] for p in model.order]
        ordered = np.all(np.stack([b > a for a, b in zip(pts, pts[1:])]), axis=0) if len(pts) > 1 else np.ones(len(idx), bool)
        ngap = model.gap(newvals)
        # keep the pre-step state for paths that left the chamber
        X[:, idx] = np.where(ordered, Xn, Xa)
        Y[:, idx] = np.where(ordered, Yn, Ya)
        g[:, idx] = np.where(ordered, gn, ga)
        t[idx] = np.where(ordered, tn, t[idx])
        for lv in levels:
            c = crossings[lv]
            newly = (~c["hit"][idx]) & ((ngap <= lv) | ~ordered)
            if newly.any():
                sel = idx[newly]
                st = snapshot(sel)
                for r, name in enumerate(names):
                    c[name][sel] = st[r]
                c["hit"][sel] = True
        stop = (ngap <= cfg.eps) | ~ordered
        reached = (~stop) & (next_rec[idx] < len(times)) & (np.abs(t[idx] - target) < 1e-12)
        if reached.any():
            sel = idx[reached]
            for k in np.unique(next_rec[sel]):
                s2 = sel[next_rec[sel] == k]
                record(s2, k)
            next_rec[sel] += 1
        stopped = idx[stop]
        if stopped.size:
            reason[stopped] = "collision"
            alive[stopped] = False
        done = alive & (next_rec >= len(times)) & (t >= horizon - 1e-12)
        alive[done] = False
    # later records of stopped paths hold the stopped state
    for k in range(len(times)):
        sel = np.where(next_rec <= k)[0]
        if sel.size:
            record(sel, k)
    return rec, t, reason, crossings, rejections


def worker_count() -> int:
    """Threads for block-parallel simulation, from SLEVIR_THREADS (default 1)."""
    raw = os.environ.get("SLEVIR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"SLEVIR_THREADS must be an integer, got {raw!r}") from None


def run_ensemble(cfg: SimConfig, times: Sequence[float] | None = None, levels: Sequence[float] = ()) -> EnsembleResult:
    """Simulate cfg.n_paths paths; states recorded at ``times`` (stopped at tau)."""
    model = _Model(cfg)
    times = np.asarray(times if times is not None else [0.0, cfg.horizon], float)
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ValueError("record times must increase from t >= 0")
    names = _state_names(model)
    n_blocks = math.ceil(cfg.n_paths / cfg.block)

    def block(b):
        n = min(cfg.block, cfg.n_paths - b * cfg.block)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(b,)))
        return _run_block(model, n, rng, times, levels)

    workers = worker_count()
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(block, range(n_blocks)))
    else:
        parts = [block(b) for b in range(n_blocks)]
    values = {name: np.concatenate([p[0][name] for p in parts], axis=1) for name in names}
    tau = np.concatenate([p[1] for p in parts])
    reason = np.concatenate([p[2] for p in parts])
    crossings = {
        lv: {key: np.concatenate([p[3][lv][key] for p in parts]) for key in parts[0][3][lv]} for lv in levels
    }
    rej = sum(p[4] for p in parts)
    if rej:
        log.info("rejected %d steps (dt halved)", rej)
    return EnsembleResult(times, values, tau, reason, crossings, rej)


@dataclass
class PathRecord:
    index: int
    times: np.ndarray
    values: dict
    tau: float
    reason: str

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "times": self.times.tolist(),
            "values": {k: v.tolist() for k, v in self.values.items()},
            "tau": self.tau,
            "stop": self.reason,
        }


def simulate(cfg: SimConfig, times: Sequence[float] | None = None) -> Iterator[PathRecord]:
    """Stream of per-path records."""
    res = run_ensemble(cfg, times)
    for p in range(res.n_paths):
        yield PathRecord(p, res.times, {k: v[:, p] for k, v in res.values.items()}, float(res.tau[p]), str(res.reason[p]))


# statistics -----------------------------------------------------------------


def _mean_se(a: np.ndarray) -> tuple[float, float]:
    a = np.asarray(a, float)
    n = len(a)
    mean = math.fsum(a) / n
    var = math.fsum((a - mean) ** 2) / (n - 1) if n > 1 else 0.0
    return mean, math.sqrt(var / n)


def observable_values(res: EnsembleResult, model_or_cfg, m: Element, form: str = "m") -> np.ndarray:
    """m (form "m") or m / Z (form "Zm", m = Z x martingale) along the recorded states."""
    cfg = model_or_cfg.cfg if isinstance(model_or_cfg, _Model) else model_or_cfg
    v = cfg.variant_object()
    if form == "Zm":
        m = m * v.Z.monomial_inverse()
    elif form != "m":
        raise ValueError("form must be 'm' or 'Zm'")
    if m.f_support() > cfg.K:
        raise ValueError(f"observable needs f_{-m.f_support()} but only K = {cfg.K} coefficients evolve")
    fn = m.numeric(float(cfg.kappa))
    vals = {name: arr for name, arr in res.values.items()}
    out = np.asarray(fn(vals), float)
    if out.ndim == 0:
        out = np.full(res.values[next(iter(res.values))].shape, float(out))
    return out


def martingale_drift_test(cfg: SimConfig, m: Element, form: str = "m", slices: int = 10, threshold: float = 4.0, res: EnsembleResult | None = None, label: str = "") -> dict:
    """z-scores of the mean increments of the candidate over ``slices`` time slices."""
    times = np.linspace(0.0, cfg.horizon, slices + 1)
    res = res or run_ensemble(cfg, times)
    vals = observable_values(res, cfg, m, form)
    zs, means, ses = [], [], []
    for k in range(slices):
        inc = vals[k + 1] - vals[k]
        mu, se = _mean_se(inc)
        if se == 0:
            z = 0.0 if mu == 0 else math.inf
        else:
            z = mu / se
        zs.append(z)
        means.append(mu)
        ses.append(se)
    ok = bool(all(abs(z) < threshold for z in zs)) and bool(np.all(np.isfinite(vals)))
    return {
        "schema": SCHEMA_DRIFT,
        "variant": cfg.variant,
        "kappa": str(cfg.kappa),
        "observable": label,
        "n_paths": cfg.n_paths,
        "dt": cfg.dt,
        "z_scores": zs,
        "mean_increments": means,
        "standard_errors": ses,
        "pass": ok,
    }


def capacity_expectation(cfg: SimConfig, eps_levels: Sequence[float] = (0.2, 0.1, 0.05)) -> dict:
    """E[g_{-2}] at the first time the gap reaches eps, extrapolated linearly in eps^2 to eps = 0."""
    levels = sorted(eps_levels, reverse=True)
    run_cfg = SimConfig(**{**cfg.__dict__, "eps": min(levels)})
    res = run_ensemble(run_cfg, [0.0, cfg.horizon], levels)
    means, ses, hit = [], [], []
    for lv in levels:
        c = res.crossings[lv]
        h = c["hit"]
        hit.append(float(h.mean()))
        mu, se = _mean_se(c["f2"][h]) if h.any() else (math.nan, math.nan)
        means.append(mu)
        ses.append(se)
    e2 = np.asarray(levels) ** 2
    A = np.vstack([np.ones_like(e2), e2]).T
    coef, *_ = np.linalg.lstsq(A, np.asarray(means), rcond=None)
    k = float(cfg.kappa)
    d0 = cfg.y0[0] - cfg.x0[0]
    predicted = 2 / (8 - 3 * k) * d0 * d0 if k < 8 / 3 else math.inf
    return {
        "eps": list(levels),
        "means": means,
        "standard_errors": ses,
        "hit_fraction": hit,
        "extrapolated": float(coef[0]),
        "predicted": predicted,
        "relative_error": abs(float(coef[0]) - predicted) / predicted if math.isfinite(predicted) else math.nan,
    }


def hill_estimator(sample: np.ndarray, k: int) -> float:
    """Tail-index estimate from the k largest values."""
    s = np.sort(np.asarray(sample, float))[::-1]
    s = s[s > 0]
    k = min(k, len(s) - 1)
    return float(1.0 / np.mean(np.log(s[:k] / s[k])))


def integrability_flag(cfg: SimConfig, sizes: Sequence[int] = (16, 64, 256, 1024), growth: float = 4.0) -> dict:
    """Flag a non-integrable g_{-2}(tau).

    Running means are medians of batch means over disjoint batches of each
    size; a heavy tail makes them grow steadily with the batch size.  The
    flag requires monotone growth by at least ``growth`` overall and a Hill
    tail index below one.
    """
    total = cfg.n_paths
    res = run_ensemble(cfg, [0.0, cfg.horizon])
    g = res.values["f2"][-1]
    running = []
    for n in sizes:
        nb = total // n
        if nb < 1:
            raise ValueError("n_paths too small for the largest batch size")
        batches = g[: nb * n].reshape(nb, n).mean(axis=1)
        running.append(float(np.median(batches)))
    monotone = all(b > a for a, b in zip(running, running[1:]))
    ratio = running[-1] / running[0]
    uncensored = g[res.reason == "collision"]
    alpha = hill_estimator(uncensored, max(10, len(uncensored) // 10))
    k = float(cfg.kappa)
    return {
        "kappa": str(cfg.kappa),
        "sizes": list(sizes),
        "running_means": running,
        "monotone": monotone,
        "growth_ratio": ratio,
        "hill_alpha": alpha,
        "tail_index_theory": (8 - k) / (2 * k),
        "censored_fraction": float(np.mean(res.reason != "collision")),
        "flagged": bool(monotone and ratio >= growth and alpha < 1),
    }


# frozen-driver coefficient flow ----------------------------------------------


def exact_frozen_coefficients(X: float, t: float, K: int) -> dict[int, float]:
    """g_m(t) for g_t(z) = X + sqrt((z - X)^2 + 4t), m = -2..-K."""
    out = {m: 0.0 for m in range(2, K + 1)}
    j = 1
    while 2 * j - 1 <= K:
        c = _binom_half(j) * (4 * t) ** j
        p = 1 - 2 * j  # (z - X)^p
        i = 0
        while True:
            power = p - i  # exponent of z
            m = 1 - power  # g_{-m} multiplies z^{1-m}
            if m > K:
                break
            if m >= 2:
                out[m] += c * _gen_binom(p, i) * (-X) ** i
            i += 1
        j += 1
    return out


def _binom_half(j: int) -> float:
    r = 1.0
    for q in range(j):
        r *= (0.5 - q) / (q + 1)
    return r


def _gen_binom(p: int, i: int) -> float:
    r = 1.0
    for q in range(i):
        r *= (p - q) / (q + 1)
    return r


def euler_frozen_coefficients(X: float, t: float, K: int, dt: float) -> dict[int, float]:
    steps = int(round(t / dt))
    g = {k: 0.0 for k in range(2, K + 1)}
    for _ in range(steps):
        inc = {k: 2.0 * p_recursive(-k, -X, g, 1.0) for k in range(2, K + 1)}
        for k in g:
            g[k] += inc[k] * dt
    return g


def frozen_flow_check(X: float = 0.7, t: float = 0.5, K: int = 5, dt: float = 0.01) -> dict:
    """Euler errors at dt, dt/2, dt/4 and the Richardson-combined error."""
    exact = exact_frozen_coefficients(X, t, K)
    errs, rich = [], []
    for h in (dt, dt / 2, dt / 4):
        g = euler_frozen_coefficients(X, t, K, h)
        errs.append(max(abs(g[k] - exact[k]) for k in g))
    for h in (dt, dt / 2):
        a = euler_frozen_coefficients(X, t, K, h)
        b = euler_frozen_coefficients(X, t, K, h / 2)
        rich.append(max(abs(2 * b[k] - a[k] - exact[k]) for k in a))
    return {"euler_errors": errs, "richardson_errors": rich}


def drift_report_json(reports: Sequence[dict]) -> dict:
    return {"schema": SCHEMA_DRIFT, "reports": list(reports), "pass": all(r["pass"] for r in reports)}
