"""Pure-geometry partition functions of multiple SLE as Feigin-Fuchs integrals.

A configuration of N boundary points pairs up 2L of them by non-crossing
arcs; the rest are unpaired.  Its partition function integrates

    h(x; w) = prod_{I<J} (x_J - x_I)^{2/k} prod_{R<S} (w_S - w_R)^{8/k} prod_{I,R} |x_I - w_R|^{-4/k}

with w_R running from the left to the right endpoint of the R-th pair.
Arcs enclosing other points are deformed into the upper half-plane and the
integrand is continued along them; those values are complex in general.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .errors import ChamberError, QuadratureError

SCHEMA_CONFIGS = "slevir.configs/1"
SCHEMA_FF = "slevir.ff/1"


@dataclass(frozen=True)
class PairingConfig:
    """N points, pairs (I, J) with 1 <= I < J <= N; unpaired points go to infinity."""

    n: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def L(self) -> int:
        return len(self.pairs)

    @property
    def unpaired(self) -> tuple[int, ...]:
        used = {i for p in self.pairs for i in p}
        return tuple(i for i in range(1, self.n + 1) if i not in used)

    def walk(self) -> tuple[int, ...]:
        right = {j for _, j in self.pairs}
        out = [0]
        for k in range(1, self.n + 1):
            out.append(out[-1] + (-1 if k in right else 1))
        return tuple(out)

    def is_valid(self) -> bool:
        """Pairs disjoint, non-crossing, and no unpaired point enclosed by an arc."""
        pts = [i for p in self.pairs for i in p]
        if len(set(pts)) != len(pts) or any(not (1 <= i < j <= self.n) for i, j in self.pairs):
            return False
        for (a, b), (c, d) in itertools.combinations(self.pairs, 2):
            if a < c < b < d or c < a < d < b:
                return False
        for u in self.unpaired:
            if any(i < u < j for i, j in self.pairs):
                return False
        return True

    def nested_in(self, pair: tuple[int, int]) -> bool:
        i, j = pair
        return j - i > 1

    def to_json(self) -> dict:
        return {"n": self.n, "pairs": [list(p) for p in self.pairs], "walk": list(self.walk())}

    def label(self) -> str:
        return "".join("U" if s > 0 else "D" for s in np.diff(self.walk()))


def config_from_walk(walk: Sequence[int]) -> PairingConfig:
    """Inverse of :meth:`PairingConfig.walk`: each down-step closes the latest open up-step."""
    if walk[0] != 0:
        raise ValueError("walks start at 0")
    stack: list[int] = []
    pairs = []
    for k in range(1, len(walk)):
        step = walk[k] - walk[k - 1]
        if step == 1:
            stack.append(k)
        elif step == -1:
            if not stack or walk[k] < 0:
                raise ValueError("walk goes negative")
            pairs.append((stack.pop(), k))
        else:
            raise ValueError("walk steps must be +-1")
    return PairingConfig(len(walk) - 1, tuple(sorted(pairs)))


def enumerate_configs(N: int, L: int) -> list[PairingConfig]:
    """All configurations, from non-negative walks with L down-steps."""
    if not 0 <= 2 * L <= N:
        raise ValueError("need 0 <= L <= N/2")
    out = []
    for downs in itertools.combinations(range(1, N + 1), L):
        w = [0]
        ok = True
        for k in range(1, N + 1):
            w.append(w[-1] + (-1 if k in downs else 1))
            if w[-1] < 0:
                ok = False
                break
        if ok:
            out.append(config_from_walk(w))
    return out


def config_count(N: int, L: int) -> int:
    return (N + 1 - 2 * L) * math.factorial(N) // (math.factorial(L) * math.factorial(N - L + 1))


def configs_to_json(configs: Sequence[PairingConfig]) -> dict:
    return {"schema": SCHEMA_CONFIGS, "count": len(configs), "configs": [c.to_json() for c in configs]}


# quadrature --------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Jacobi rule with endpoint exponents -4/kappa on each arc.

    When another marked point lies within ``grading`` (in units of the arc's
    half-length) of an endpoint, that end is refined by geometric panels
    down to the point's distance, each with ``panel_nodes`` nodes.
    """

    nodes: int = 40
    panel_nodes: int = 24
    grading: float = 0.5

    def rule(self, kappa: float) -> tuple[np.ndarray, np.ndarray]:
        a = -4.0 / kappa
        if a <= -1:
            raise QuadratureError(f"endpoint exponent {a} <= -1: direct quadrature needs kappa > 4")
        return _jacobi(self.nodes, a, a)

    def arc_rule(self, kappa: float, d_left: float = np.inf, d_right: float = np.inf):
        """Nodes s and weights W with sum W g(s) ~ int_{-1}^{1} (1-s^2)^a g(s) ds.

        d_left, d_right: distance (in s units) from each endpoint to the nearest
        singularity of g outside the interval.
        """
        s0, w0 = self.rule(kappa)
        if d_left >= self.grading and d_right >= self.grading:
            return s0, w0
        a = -4.0 / kappa
        cuts_l = _graded_cuts(d_left, self.grading)
        cuts_r = _graded_cuts(d_right, self.grading)
        # breakpoints in u = 1 + s from the left and v = 1 - s from the right
        left = [-1.0] + [-1.0 + c for c in cuts_l]
        right = [1.0 - c for c in reversed(cuts_r)] + [1.0]
        if left[-1] >= right[0]:
            mid = 0.5 * (left[-1] + right[0])
            left, right = [p for p in left if p < mid] + [mid], [mid] + [p for p in right if p > mid]
        bps = left + right[1:] if left[-1] == right[0] else left + right
        n = self.panel_nodes
        nodes, weights = [], []
        gl_u, gl_w = special.roots_legendre(n)
        for k, (lo, hi) in enumerate(zip(bps[:-1], bps[1:])):
            half = (hi - lo) / 2
            if k == 0:
                u, wu = _jacobi(n, 0.0, a)  # weight (1+u)^a, and 1+s = half (1+u)
                s = lo + half * (1 + u)
                wt = wu * half ** (1 + a) * (1 - s) ** a
            elif k == len(bps) - 2:
                u, wu = _jacobi(n, a, 0.0)  # weight (1-u)^a, and 1-s = half (1-u)
                s = lo + half * (1 + u)
                wt = wu * half ** (1 + a) * (1 + s) ** a
            else:
                s = lo + half * (1 + gl_u)
                wt = gl_w * half * (1 - s * s) ** a
            nodes.append(s)
            weights.append(wt)
        return np.concatenate(nodes), np.concatenate(weights)


def _graded_cuts(d: float, grading: float) -> list[float]:
    """Geometric breakpoints d, 2d, 4d, ... below ``grading`` (empty when d is not small)."""
    if d >= grading:
        return []
    out = []
    c = d
    while c < grading:
        out.append(c)
        c *= 2
    return out


_RULES: dict = {}


def _jacobi(n: int, a: float, b: float):
    key = (n, a, b)
    hit = _RULES.get(key)
    if hit is None:
        hit = special.roots_jacobi(n, a, b)
        _RULES[key] = hit
    return hit


def _check_chamber(points: Sequence[float]) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise ChamberError("points must be strictly increasing")
    return x


def _arc(a: float, b: float, s: np.ndarray, deformed: bool):
    """w(s) on [-1, 1] and dw/ds divided by the Jacobi weight, plus the weight-free factor.

    On a straight segment (w-a)(b-w) = ((b-a)/2)^2 (1-s^2); on the upper
    semicircle w = m - r cos(theta), theta = pi(1+s)/2, we divide by the same
    Jacobi weight and keep the smooth remainder.
    """
    half = (b - a) / 2
    if not deformed:
        w = a + half * (1 + s)
        return w.astype(complex), half * np.ones_like(s, dtype=complex), (half * half) * np.ones_like(s)
    m = (a + b) / 2
    theta = np.pi * (1 + s) / 2
    w = m - half * np.exp(-1j * theta)
    dw = half * 1j * np.exp(-1j * theta) * (np.pi / 2)
    # (w-a)(b-w) / (1-s^2) is smooth and nonvanishing on the semicircle; its
    # principal power continues the endpoint factors along the arc
    return w, dw, (w - a) * (b - w) / (1 - s * s)


def _power(z, e, real: bool):
    if real:
        return np.abs(z) ** e
    return np.exp(e * np.log(z))


def feigin_fuchs_Z(config: PairingConfig, points: Sequence[float], kappa: float, spec: QuadratureSpec | None = None):
    """Z^(p)(x) by tensor Gauss-Jacobi quadrature (kappa > 4, L <= 2).

    Real for configurations whose arcs enclose no other point; complex
    (continued through the upper half-plane) otherwise.
    """
    spec = spec or QuadratureSpec()
    x = _check_chamber(points)
    if len(x) != config.n:
        raise ValueError("one point per configuration slot")
    if config.L > 2:
        raise QuadratureError("nested quadrature supports at most two arcs")
    k = float(kappa)
    prefactor = 1.0
    for i, j in itertools.combinations(range(config.n), 2):
        prefactor *= (x[j] - x[i]) ** (2 / k)
    if config.L == 0:
        return prefactor
    a = -4.0 / k
    grids = []
    for (i, j) in config.pairs:
        deformed = config.nested_in((i, j))
        lo, hi = x[i - 1], x[j - 1]
        half = (hi - lo) / 2
        others = [x[q - 1] for q in range(1, config.n + 1) if q not in (i, j)]
        d_left = min((abs(p - lo) / half for p in others), default=np.inf)
        d_right = min((abs(p - hi) / half for p in others), default=np.inf)
        s, wts = spec.arc_rule(k, d_left, d_right)
        w, dw, rem = _arc(lo, hi, s, deformed)
        grids.append((w, wts * dw * rem**a, (i, j), deformed))
    real = not any(g[3] for g in grids)
    mesh = np.meshgrid(*[np.arange(len(g[0])) for g in grids], indexing="ij")
    idx = [m.ravel() for m in mesh]
    total = np.ones(idx[0].shape, dtype=complex)
    ws = []
    for (w, jac, (i, j), deformed), ix in zip(grids, idx):
        wv = w[ix]
        ws.append(wv)
        total = total * jac[ix]
        for q in range(1, config.n + 1):
            if q in (i, j):
                continue
            total = total * _power(wv - x[q - 1], a, real)
    for r, t in itertools.combinations(range(config.L), 2):
        total = total * _power(ws[t] - ws[r], 8 / k, real)
    val = prefactor * total.sum()
    if real:
        return float(val.real)
    return complex(val)


def beta_closed_form(points: Sequence[float], kappa: float) -> float:
    """(x2-x1)^{(k-6)/k} B(1-4/k, 1-4/k) for N=2, L=1; valid off the poles of B."""
    x1, x2 = points
    k = float(kappa)
    return (x2 - x1) ** ((k - 6) / k) * special.beta(1 - 4 / k, 1 - 4 / k)


def homogeneity_degree(N: int, L: int, kappa: float) -> float:
    am2 = 4.0 / kappa
    return L + (N * (N - 1) / 4 - N * L + L * (L - 1)) * am2


# finite differences -----------------------------------------------------------


def _partials(fn, x: np.ndarray, I: int, step: float):
    """Richardson-extrapolated central differences: dZ/dx_J for all J and d2Z/dx_I^2."""
    n = len(x)

    def shifted(J, h):
        y = x.copy()
        y[J] += h
        return fn(y)

    def first(J, h):
        return (shifted(J, h) - shifted(J, -h)) / (2 * h)

    def second(h):
        return (shifted(I, h) - 2 * fn(x) + shifted(I, -h)) / (h * h)

    def rich(g):
        a, b, c = g(step), g(step / 2), g(step / 4)
        ab = (4 * b - a) / 3
        bc = (4 * c - b) / 3
        return (16 * bc - ab) / 15

    d1 = [rich(lambda h, J=J: first(J, h)) for J in range(n)]
    d2 = rich(second)
    return d1, d2


def null_field_residual(
    config: PairingConfig,
    points: Sequence[float],
    kappa: float,
    I: int,
    spec: QuadratureSpec | None = None,
    rel_step: float = 1e-2,
) -> float:
    """|D_I Z| / (sum of |terms| + |Z|/gap^2) at ``points`` (I is 1-based); all curves share kappa."""
    x = _check_chamber(points)
    k = float(kappa)
    fn = lambda y: feigin_fuchs_Z(config, y, k, spec)  # noqa: E731
    scale = float(np.min(np.diff(x))) if len(x) > 1 else 1.0
    d1, d2 = _partials(fn, x, I - 1, rel_step * scale)
    Z = fn(x)
    terms = [k / 2 * d2]
    for J in range(len(x)):
        if J == I - 1:
            continue
        g = x[J] - x[I - 1]
        terms.append(2 / g * d1[J])
        terms.append((k - 6) / k / g**2 * Z)
    # the |Z|/gap^2 floor keeps the ratio meaningful when Z is locally constant
    num = abs(sum(terms))
    den = sum(abs(t) for t in terms) + abs(Z) / scale**2
    return float(num / den)


def translation_residual(config: PairingConfig, points: Sequence[float], kappa: float, shift: float = 0.37, spec=None) -> float:
    x = _check_chamber(points)
    a = feigin_fuchs_Z(config, x, kappa, spec)
    b = feigin_fuchs_Z(config, x + shift, kappa, spec)
    return float(abs(b - a) / abs(a))


def scaling_residual(config: PairingConfig, points: Sequence[float], kappa: float, lam: float = 1.7, spec=None) -> float:
    x = _check_chamber(points)
    a = feigin_fuchs_Z(config, x, kappa, spec)
    b = feigin_fuchs_Z(config, lam * x, kappa, spec)
    expected = lam ** homogeneity_degree(config.n, config.L, kappa)
    return float(abs(b / a - expected) / expected)


@dataclass
class ExponentFit:
    slope: float
    fit_residual: float
    gaps: list = field(default_factory=list)
    values: list = field(default_factory=list)


def asymptotic_exponent(
    config: PairingConfig,
    points: Sequence[float],
    kappa: float,
    pair: tuple[int, int],
    gaps: Sequence[float] | None = None,
    spec: QuadratureSpec | None = None,
    threshold: float = 1e-3,
) -> ExponentFit:
    """Slope of log|Z| against log(x_J - x_I) as x_J -> x_I (J = I + 1, others fixed)."""
    I, J = pair
    if J != I + 1:
        raise ValueError("collapse adjacent points only")
    x = _check_chamber(points)
    if gaps is None:
        base = float(x[J - 1] - x[I - 1])
        gaps = [base * 10.0 ** (-k) for k in (4, 4.5, 5, 5.5, 6)]
    vals = []
    for g in gaps:
        y = x.copy()
        y[J - 1] = y[I - 1] + g
        _check_chamber(y)
        vals.append(abs(feigin_fuchs_Z(config, y, kappa, spec)))
    lg = np.log(np.asarray(gaps))
    lv = np.log(np.asarray(vals))
    A = np.vstack([lg, np.ones_like(lg)]).T
    coef, *_ = np.linalg.lstsq(A, lv, rcond=None)
    resid = float(np.max(np.abs(A @ coef - lv)))
    if resid > threshold:
        raise QuadratureError(f"log-log fit residual {resid:.3g} above {threshold}")
    return ExponentFit(float(coef[0]), resid, list(map(float, gaps)), list(map(float, vals)))


def erased_pair_ratio(config: PairingConfig, points: Sequence[float], kappa: float, pair: tuple[int, int], gap: float, spec=None) -> float:
    """Z^(p) / [(gap)^{(k-6)/k} B(1-4/k,1-4/k) Z^(p')] with the adjacent pair collapsed; tends to 1."""
    I, J = pair
    x = _check_chamber(points)
    y = x.copy()
    y[J - 1] = y[I - 1] + gap
    full = feigin_fuchs_Z(config, y, kappa, spec)
    keep = [q for q in range(1, config.n + 1) if q not in pair]
    ren = {q: r + 1 for r, q in enumerate(keep)}
    reduced = PairingConfig(len(keep), tuple((ren[a], ren[b]) for a, b in config.pairs if (a, b) != pair))
    rest = feigin_fuchs_Z(reduced, [x[q - 1] for q in keep], kappa, spec)
    return float(abs(full) / (beta_closed_form([0.0, gap], kappa) * abs(rest)))


def results_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    cols = ["config", "walk", "points", "kappa", "Z", "residuals", "exponent"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in cols})
    return buf.getvalue()
