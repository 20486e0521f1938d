"""Charged Fock spaces, vertex-operator expansions and the operator G_f.

Basis vectors a_{-n_1} ... a_{-n_k} v_alpha are stored as ascending tuples
(n_1 <= ... <= n_k).  The Heisenberg modes satisfy [a_n, a_m] = 2 n delta_{n+m,0},
a_0 v_alpha = 2 alpha v_alpha, and the Virasoro action is
L_n = 1/4 sum_j :a_{n-j} a_j: - alpha_0 (n+1) a_n.

Coefficients of a :class:`FockElement` may be ScalarK values, funcspace
Elements, or exact LaurentSeries; anything with ``+`` and ``scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Sequence

from .algebra.mapseries import MapSeries
from .algebra.scalar import ALPHA, ALPHA_MINUS, ALPHA_ZERO, KAPPA, ScalarK, charge_weight, parse_scalar
from .algebra.series import LaurentSeries
from .errors import LevelOverflowError, RecursionInconsistency
from .funcspace import Element, VariableSet
from .sle import SleVariant, apply_A, normal_order, null_field_operator, partitions

SCHEMA_STATE = "slevir.state/1"

Partition = tuple[int, ...]


def fock_basis(level: int) -> list[Partition]:
    """Ascending partitions of ``level``."""
    return [tuple(reversed(p)) for p in partitions(level)]


def _insert(part: Partition, n: int) -> Partition:
    lst = list(part)
    i = 0
    while i < len(lst) and lst[i] < n:
        i += 1
    lst.insert(i, n)
    return tuple(lst)


def _heis(p: int, part: Partition, alpha: ScalarK) -> list[tuple[Partition, Any]]:
    """a_p on a basis vector."""
    if p < 0:
        return [(_insert(part, -p), 1)]
    if p == 0:
        return [(part, 2 * alpha)]
    k = part.count(p)
    if not k:
        return []
    lst = list(part)
    lst.remove(p)
    return [(tuple(lst), 2 * p * k)]


@lru_cache(maxsize=None)
def virasoro_on_basis(n: int, part: Partition, alpha: ScalarK, alpha0: ScalarK) -> tuple:
    """L_n applied to a_{-part} v_alpha, as ((partition, ScalarK), ...)."""
    level = sum(part)
    acc: dict = {}

    def add(p, c):
        acc[p] = acc.get(p, ScalarK(0)) + c

    for q in range(math.ceil(n / 2), level + 1):
        p = n - q
        factor = ScalarK(1, 2) if p < q else ScalarK(1, 4)
        for mid, c1 in _heis(q, part, alpha):
            for out, c2 in _heis(p, mid, alpha):
                add(out, factor * c1 * c2)
    if n + 1:
        for out, c in _heis(n, part, alpha):
            add(out, -alpha0 * (n + 1) * c)
    return tuple((k, v) for k, v in acc.items() if not v.is_zero())


def _scale(coeff, s):
    if isinstance(coeff, (Element, LaurentSeries)):
        return coeff.scale(s)
    return coeff * s


class FockElement:
    """Finite combination of basis vectors of one charged Fock space, truncated at ``lmax``."""

    __slots__ = ("alpha", "coeffs", "lmax")

    def __init__(self, alpha, coeffs: dict, lmax: int):
        self.alpha = ScalarK.coerce(alpha)
        self.coeffs = {k: v for k, v in coeffs.items() if not _is_zero(v)}
        self.lmax = lmax
        for k in self.coeffs:
            if sum(k) > lmax:
                raise LevelOverflowError(f"basis vector {k} above truncation level {lmax}")

    @classmethod
    def vacuum(cls, alpha, lmax: int, one=None) -> "FockElement":
        return cls(alpha, {(): ScalarK(1) if one is None else one}, lmax)

    @classmethod
    def basis(cls, alpha, part: Sequence[int], lmax: int, one=None) -> "FockElement":
        return cls(alpha, {tuple(sorted(part)): ScalarK(1) if one is None else one}, lmax)

    def component(self, part: Sequence[int], zero=0):
        return self.coeffs.get(tuple(sorted(part)), zero)

    def __add__(self, other: "FockElement") -> "FockElement":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return FockElement(self.alpha, out, min(self.lmax, other.lmax))

    def __sub__(self, other: "FockElement") -> "FockElement":
        return self + other.scale(-1)

    def scale(self, s) -> "FockElement":
        return FockElement(self.alpha, {k: _scale(v, s) for k, v in self.coeffs.items()}, self.lmax)

    def map(self, fn) -> "FockElement":
        return FockElement(self.alpha, {k: fn(v) for k, v in self.coeffs.items()}, self.lmax)

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, level: int) -> "FockElement":
        return FockElement(self.alpha, {k: v for k, v in self.coeffs.items() if sum(k) <= level}, min(level, self.lmax))

    def __repr__(self):
        return f"FockElement(alpha={self.alpha}, {len(self.coeffs)} terms, lmax={self.lmax})"


def _is_zero(v) -> bool:
    if isinstance(v, (Element, ScalarK)):
        return v.is_zero()
    if isinstance(v, LaurentSeries):
        return v.is_exact_zero()
    return v == 0


def fock_virasoro(n: int, e: FockElement, alpha0: ScalarK = ALPHA_ZERO, strict: bool = True) -> FockElement:
    """L_n e.  With ``strict`` a result component above ``lmax`` raises; otherwise it is dropped."""
    acc: dict = {}
    for part, coeff in e.coeffs.items():
        for out, s in virasoro_on_basis(n, part, e.alpha, alpha0):
            if sum(out) > e.lmax:
                if strict:
                    raise LevelOverflowError(f"L_{n} leaves the truncation level {e.lmax}")
                continue
            term = _scale(coeff, s)
            acc[out] = acc[out] + term if out in acc else term
    return FockElement(e.alpha, acc, e.lmax)


def heisenberg_commutator_residual(n: int, m: int, part: Partition, alpha: ScalarK) -> dict:
    """([a_n, a_m] - 2 n delta_{n+m,0}) on a basis vector, as a coefficient dict."""
    acc: dict = {}
    for mid, c1 in _heis(m, part, alpha):
        for out, c2 in _heis(n, mid, alpha):
            acc[out] = acc.get(out, 0) + c1 * c2
    for mid, c1 in _heis(n, part, alpha):
        for out, c2 in _heis(m, mid, alpha):
            acc[out] = acc.get(out, 0) - c1 * c2
    if n + m == 0:
        acc[part] = acc.get(part, 0) - 2 * n
    return {k: v for k, v in acc.items() if v != 0}


def virasoro_residual(n: int, m: int, e: FockElement, alpha0: ScalarK = ALPHA_ZERO) -> FockElement:
    """([L_n, L_m] - (n-m) L_{n+m} - (c/12)(n^3-n) delta_{n+m,0}) e with c = 1 - 24 alpha0^2."""
    c = 1 - 24 * alpha0 * alpha0
    L = lambda k, x: fock_virasoro(k, x, alpha0)  # noqa: E731
    out = L(n, L(m, e)) - L(m, L(n, e)) - L(n + m, e).scale(ScalarK(n - m))
    if n + m == 0:
        out = out - e.scale(c * ScalarK(n**3 - n) / 12)
    return out


# vertex operators ----------------------------------------------------------------


def _exp_creation(weights: dict[int, Any], lmax: int, one) -> dict[Partition, Any]:
    """exp(sum_n w_n a_{-n}) v, as partition -> coefficient up to lmax."""
    out: dict = {}
    for level in range(lmax + 1):
        for part in fock_basis(level):
            coeff = one
            for n in set(part):
                k = part.count(n)
                coeff = coeff * weights[n] ** k
                coeff = _scale(coeff, ScalarK(1, math.factorial(k)))
            out[part] = coeff
    return out


def _merge(part: Partition, extra: Partition) -> Partition:
    return tuple(sorted(part + extra))


def u_minus_apply(charges: Sequence[tuple[Any, Any]], e: FockElement) -> FockElement:
    """exp(sum_{n>=1} (1/n)(sum_i alpha_i z_i^n) a_{-n}) e, truncated at e.lmax.

    ``charges`` pairs a charge with a point: a funcspace Element (or a
    LaurentSeries) standing for z_i.
    """
    if not e.coeffs:
        return e
    sample = next(iter(e.coeffs.values()))
    one = _one_like(sample, charges)
    weights = {}
    for n in range(1, e.lmax + 1):
        s = None
        for alpha, z in charges:
            term = _scale(z**n, ScalarK.coerce(alpha) / n)
            s = term if s is None else s + term
        weights[n] = s
    expo = _exp_creation(weights, e.lmax, one)
    acc: dict = {}
    for part, coeff in e.coeffs.items():
        room = e.lmax - sum(part)
        for extra, w in expo.items():
            if sum(extra) > room:
                continue
            out = _merge(part, extra)
            term = w * coeff if not isinstance(coeff, ScalarK) else _scale(w, coeff)
            acc[out] = acc[out] + term if out in acc else term
    return FockElement(e.alpha, acc, e.lmax)


def _one_like(sample, charges):
    z = charges[0][1]
    if isinstance(z, Element):
        return z.vs.one()
    if isinstance(z, LaurentSeries):
        return LaurentSeries({0: ScalarK(1)}, zero=ScalarK(0))
    return ScalarK(1)


def u_plus_apply(alpha, z: LaurentSeries, e: FockElement) -> FockElement:
    """exp(-sum_{n>=1} (1/n) alpha z^{-n} a_n) e for a single point; exact (finitely many terms)."""
    alpha = ScalarK.coerce(alpha)
    zinv = LaurentSeries({-1: ScalarK(1)}, zero=ScalarK(0))
    cur = FockElement(e.alpha, dict(e.coeffs), e.lmax)
    top = max((sum(p) for p in e.coeffs), default=0)
    # apply exp(-alpha z^{-n} a_n / n) successively for n = 1..top
    for n in range(1, top + 1):
        coef = zinv.power(n).scale(-alpha / n)
        term = cur
        total = dict(cur.coeffs)
        k = 1
        while True:
            nxt: dict = {}
            for part, c in term.coeffs.items():
                for out, s in _heis(n, part, e.alpha):
                    v = (c * coef).scale(ScalarK(s, k))
                    nxt[out] = nxt[out] + v if out in nxt else v
            term = FockElement(e.alpha, nxt, e.lmax)
            if term.is_zero():
                break
            for part, c in term.coeffs.items():
                total[part] = total[part] + c if part in total else c
            k += 1
        cur = FockElement(e.alpha, total, e.lmax)
    return cur


def vertex_intertwining_residual(alpha, beta, n: int, part: Partition, level: int = 4) -> FockElement:
    """([L_n, W] - (2 alpha beta z^n + z^{1+n} d/dz + (1+n) h(alpha) z^n) W) u with V = z^{2 alpha beta} W.

    Here W = U^-_alpha(z) U^+_alpha(z) T_alpha acts on u = a_{-part} v_beta and
    components are compared up to ``level``.
    """
    alpha = ScalarK.coerce(alpha)
    beta = ScalarK.coerce(beta)
    lmax = max(level + max(n, 0), sum(part) + max(-n, 0))
    z = LaurentSeries({1: ScalarK(1)}, zero=ScalarK(0))
    one = LaurentSeries({0: ScalarK(1)}, zero=ScalarK(0))

    def W(vec: FockElement) -> FockElement:
        lifted = FockElement(vec.alpha, {p: _as_series(c, one) for p, c in vec.coeffs.items()}, lmax)
        plus = u_plus_apply(alpha, z, lifted)
        moved = FockElement(alpha + beta, plus.coeffs, lmax)
        return u_minus_apply([(alpha, z)], moved)

    u = FockElement.basis(beta, part, lmax)
    Wu = W(u)
    lhs = fock_virasoro(n, Wu, strict=False).truncate(level)
    Lu = fock_virasoro(n, u)
    lhs = lhs - W(FockElement(beta, Lu.coeffs, lmax)).truncate(level)
    hz = charge_weight(alpha)
    zn = z.power(n) if n >= 0 else one.shift(n)
    rhs = Wu.map(lambda c: c.mul(zn).scale(2 * alpha * beta + (1 + n) * hz) + c.derivative().shift(1 + n))
    return lhs - rhs.truncate(level)


def _as_series(c, one):
    if isinstance(c, LaurentSeries):
        return c
    return one.scale(ScalarK.coerce(c))


# G_f ------------------------------------------------------------------------------


@dataclass
class EnvelopingElement:
    """sum over PBW words (non-increasing positive indices a, meaning L_{-a1} L_{-a2} ...)
    of polynomial coefficients in f_{-2}, ..., f_{-D}."""

    terms: dict
    degree: int
    ctx: Any

    def coefficient(self, word: Sequence[int]):
        return self.terms.get(tuple(word), self.ctx.from_dict({}))

    def words(self) -> list[tuple[int, ...]]:
        return sorted(self.terms, key=lambda w: (sum(w), w))


def _f_ring(depth: int):
    import flint

    return flint.fmpq_mpoly_ctx.get(tuple(f"f{k}" for k in range(2, max(depth, 2) + 1)), "lex")


def _degree_of(poly, depth) -> int:
    # weighted degree of a homogeneous polynomial (f_{-k} has weight k)
    for exps, _ in poly.terms():
        return sum((k + 2) * int(e) for k, e in enumerate(exps))
    return 0


def _right_multiply(word: tuple[int, ...], b: int) -> dict:
    return normal_order(word + (b,))


class _GData:
    def __init__(self, depth: int):
        self.depth = max(depth, 2)
        self.ctx = _f_ring(self.depth)
        self.f = MapSeries.symbolic(self.depth, self.ctx)
        self.fp = self.f.derivative()
        self._R: dict = {}

    def fvar(self, k: int):
        return self.ctx.gen(k - 2)

    def R(self, m: int, k: int):
        """[w^{-2-m}] f'(w) f(w)^{-2-k}; homogeneous of degree m - k."""
        key = (m, k)
        hit = self._R.get(key)
        if hit is None:
            s = self.fp.mul(self.f.power(-2 - k))
            hit = s.coefficient(-2 - m)
            self._R[key] = hit
        return hit

    def P(self, l: int, k: int):
        """[z^{1+l}] f(z)^{1+k}."""
        return self.f.power(1 + k).coefficient(1 + l)


def build_Gf(D: int, check: bool = True) -> EnvelopingElement:
    """G_f truncated at f-degree D, from G|_{f=0} = 1 and
    d/df_m G = -sum_{k<=m} R_{m,k} G L_k (R_{m,k} = Res w^{1+m} f'(w)/f(w)^{2+k}).

    Homogeneous pieces follow from the Euler operator; each defining relation
    is then checked separately (this is the integrability of the system).
    """
    data = _GData(D)
    ctx = data.ctx
    zero = ctx.from_dict({})
    G: dict[int, dict] = {0: {(): zero + 1}}
    for d in range(1, D + 1):
        acc: dict = {}
        for m in range(-2, -d - 1, -1):
            fm = data.fvar(-m)
            for k in range(m, -d - 1, -1):
                r = data.R(m, k)
                if r.is_zero():
                    continue
                for word, c in G.get(d + k, {}).items():
                    for w2, c2 in _right_multiply(word, -k).items():
                        term = fm * r * c * (m * c2)
                        acc[w2] = acc[w2] + term if w2 in acc else term
        G[d] = {w: c / d for w, c in acc.items() if not c.is_zero()}
    terms = {w: c for piece in G.values() for w, c in piece.items()}
    env = EnvelopingElement(terms, D, ctx)
    if check:
        for m in range(-2, -D - 1, -1):
            res = defining_relation_residual(env, m, data)
            if any(not c.is_zero() for c in res.values()):
                raise RecursionInconsistency(f"defining relation for f_{m} fails")
    return env


def defining_relation_residual(G: EnvelopingElement, m: int, data: _GData | None = None) -> dict:
    """d/df_m G + sum_k R_{m,k} G L_k, compared through coefficient degree D + m."""
    D = G.degree
    data = data or _GData(D)
    idx = G.ctx.variable_to_index(f"f{-m}")
    limit = D + m
    acc: dict = {}
    for w, c in G.terms.items():
        dc = c.derivative(idx)
        if not dc.is_zero() and sum(w) + m <= limit:
            acc[w] = acc.get(w, 0) + dc
    for k in range(m, -D - 1, -1):
        r = data.R(m, k)
        if r.is_zero():
            continue
        for w, c in G.terms.items():
            # coefficient degree of the product is sum(w) + (m - k)
            if sum(w) + m - k > limit:
                continue
            for w2, c2 in _right_multiply(w, -k).items():
                acc[w2] = acc.get(w2, 0) + r * c * c2
    return {w: c for w, c in acc.items() if not (c == 0)}


def converse_relation_residual(G: EnvelopingElement, k: int) -> dict:
    """G L_k + sum_l Res(z^{-2-l} f^{1+k}) d/df_l G, through coefficient degree D + k."""
    D = G.degree
    data = _GData(D)
    limit = D + k
    acc: dict = {}
    for w, c in G.terms.items():
        if sum(w) > limit:
            continue
        for w2, c2 in _right_multiply(w, -k).items():
            acc[w2] = acc.get(w2, 0) + c * c2
    for l in range(-2, -D - 1, -1):
        p = data.P(l, k)
        if p.is_zero():
            continue
        idx = G.ctx.variable_to_index(f"f{-l}")
        for w, c in G.terms.items():
            dc = c.derivative(idx)
            if dc.is_zero():
                continue
            # resulting coefficient degree: sum(w) + l + (k - l)
            if sum(w) + k > limit:
                continue
            acc[w] = acc.get(w, 0) + p * dc
    return {w: c for w, c in acc.items() if not (c == 0)}


def mixed_partials_commute(G: EnvelopingElement) -> bool:
    for l in range(2, G.degree + 1):
        for m in range(2, l):
            il = G.ctx.variable_to_index(f"f{l}")
            im = G.ctx.variable_to_index(f"f{m}")
            for c in G.terms.values():
                if c.derivative(il).derivative(im) != c.derivative(im).derivative(il):
                    return False
    return True


def apply_enveloping(G: EnvelopingElement, e: FockElement, vs: VariableSet, alpha0: ScalarK = ALPHA_ZERO) -> FockElement:
    """G e with word coefficients mapped into ``vs``; components above e.lmax are dropped."""
    cache: dict = {(): e}

    def act(word):
        hit = cache.get(word)
        if hit is None:
            hit = fock_virasoro(-word[0], act(word[1:]), alpha0, strict=False)
            cache[word] = hit
        return hit

    acc: dict = {}
    conv = _ring_map(G.ctx, vs)
    for word, c in G.terms.items():
        if sum(word) > e.lmax:
            continue
        cf = vs.poly(conv(c))
        for part, val in act(word).coeffs.items():
            term = cf * val
            acc[part] = acc[part] + term if part in acc else term
    return FockElement(e.alpha, acc, e.lmax)


def _ring_map(ctx, vs: VariableSet):
    names = [ctx.names()[i] for i in range(ctx.nvars())]
    idx = [vs.index[n] for n in names]
    nv = len(vs.names)

    def conv(p):
        out = {}
        for exps, c in p.terms():
            full = [0] * nv
            for i, e in zip(idx, exps):
                full[i] = int(e)
            out[tuple(full)] = c
        return vs.ctx.from_dict(out)

    return conv


# SLE states -----------------------------------------------------------------------


def kappa_rho_charges(v: SleVariant) -> tuple[ScalarK, list[ScalarK], ScalarK]:
    """alpha = 1/sqrt(kappa), alpha_K = rho_K / (2 sqrt(kappa)), beta = alpha + sum alpha_K."""
    rhos = [parse_scalar(r) if isinstance(r, str) else r for r in v.params.get("rho", [])]
    t = ScalarK.t()
    alphas = [r / (2 * t) for r in rhos]
    beta = ALPHA
    for a in alphas:
        beta = beta + a
    return ALPHA, alphas, beta


def state_components(v: SleVariant, lmax: int = 4, D: int = 6, G: EnvelopingElement | None = None):
    """Components <a_lambda v_beta^*, G_f U^- v_beta> (the state divided by Z), one per Fock basis vector."""
    alpha, alphas, beta = kappa_rho_charges(v)
    vs = v.vs
    G = G or build_Gf(min(D, lmax))
    charges = [(alpha, vs.var(v.xs[0]))] + [(a, vs.var(y)) for a, y in zip(alphas, v.ys)]
    vac = FockElement.vacuum(beta, lmax, vs.one())
    state = apply_enveloping(G, u_minus_apply(charges, vac), vs)
    out = []
    for level in range(lmax + 1):
        for part in fock_basis(level):
            out.append((part, state.component(part, vs.zero())))
    return out


def state_annihilation_failures(v: SleVariant, comps) -> list:
    bad = []
    for part, comp in comps:
        for xi in v.xs:
            if not apply_A(v, xi, v.Z * comp).is_zero():
                bad.append((part, xi))
    return bad


def screening_vs(N: int, L: int, depth: int = 2) -> tuple[VariableSet, tuple[str, ...], tuple[str, ...]]:
    """Chamber x1 < w1 < x2 < w2 < ... with the remaining x's to the right."""
    xs = tuple(f"x{i + 1}" for i in range(N))
    ws = tuple(f"w{r + 1}" for r in range(L))
    order = []
    for i, x in enumerate(xs):
        order.append(x)
        if i < L:
            order.append(ws[i])
    return VariableSet(order, depth), xs, ws


def screened_integrand(vs: VariableSet, xs: Sequence[str], ws: Sequence[str]) -> Element:
    """prod (x_J - x_I)^{2/kappa} prod (w_S - w_R)^{8/kappa} prod (x_I - w_R)^{-4/kappa}."""
    h = vs.one()
    for i, j in _pairs(len(xs)):
        h = h * vs.difference_power(xs[j], xs[i], 2 / KAPPA)
    for r, s in _pairs(len(ws)):
        h = h * vs.difference_power(ws[s], ws[r], 8 / KAPPA)
    for x in xs:
        for w in ws:
            h = h * vs.difference_power(x, w, -4 / KAPPA)
    return h


def _pairs(n):
    return [(i, j) for j in range(n) for i in range(j)]


def _multiple_variant(vs: VariableSet, xs, Z: Element) -> SleVariant:
    return SleVariant(
        name="multiple",
        vs=vs,
        xs=tuple(xs),
        ys=(),
        kappas={x: KAPPA for x in xs},
        hy={},
        Z=Z,
        Delta=Z.homogeneity_degree(),
        params={"kind": "multiple", "n": len(xs), "screening": True},
    )


def screening_identity(N: int, L: int, I: int = 0) -> Element:
    """D_I h + 2 sum_K d/dw_K (h / (w_K - x_I)); zero means D_I h is a total w-derivative."""
    vs, xs, ws = screening_vs(N, L)
    h = screened_integrand(vs, xs, ws)
    v = _multiple_variant(vs, xs, h)
    xi = xs[I]
    out = null_field_operator(v, xi, h)
    for w in ws:
        out = out + (h * vs.difference_power(w, xi, -1)).derive(w).scale(2)
    return out


def coulomb_null_field_residual(alphas: Sequence[ScalarK]) -> Element:
    """The kappa-rho null-field operator (delta_K = h(alpha_K)) applied to h_{0; alpha, alpha_1, ...}."""
    M = len(alphas)
    ys = ("y",) if M == 1 else tuple(f"y{k + 1}" for k in range(M))
    vs = VariableSet(("x",) + ys, 2)
    alpha = ALPHA
    h = vs.one()
    for a, y in zip(alphas, ys):
        h = h * vs.difference_power(y, "x", 2 * alpha * a)
    for j, k in _pairs(M):
        h = h * vs.difference_power(ys[k], ys[j], 2 * alphas[j] * alphas[k])
    v = SleVariant(
        name="coulomb",
        vs=vs,
        xs=("x",),
        ys=ys,
        kappas={"x": KAPPA},
        hy={y: charge_weight(a) for a, y in zip(alphas, ys)},
        Z=h,
        Delta=None,
    )
    return null_field_operator(v, "x", h)


def multiple_state_residual(N: int = 2, L: int = 1, lmax: int = 3, I: int = 0, D: int | None = None) -> list:
    """Componentwise A_I(h G_f U^- v_beta) + 2 sum_K d/dw_K (h/(w_K - x_I) G_f U^- v_beta).

    Returns the list of nonzero residual components (empty means the
    state's drift is a total derivative in the screening variables).
    """
    vs0, xs, ws = screening_vs(N, L)
    vs = VariableSet(vs0.points, max(lmax, 2) + 2)
    h = screened_integrand(vs, xs, ws)
    v = _multiple_variant(vs, xs, h)
    beta = N * ALPHA + L * ALPHA_MINUS
    G = build_Gf(D or lmax)
    charges = [(ALPHA, vs.var(x)) for x in xs] + [(ALPHA_MINUS, vs.var(w)) for w in ws]
    vac = FockElement.vacuum(beta, lmax, vs.one())
    state = apply_enveloping(G, u_minus_apply(charges, vac), vs)
    xi = xs[I]
    bad = []
    for level in range(lmax + 1):
        for part in fock_basis(level):
            comp = state.component(part, vs.zero())
            full = h * comp
            res = apply_A(v, xi, full)
            for w in ws:
                res = res + (full * vs.difference_power(w, xi, -1)).derive(w).scale(2)
            if not res.is_zero():
                bad.append((part, res))
    return bad


def state_to_json(v: SleVariant, comps) -> dict:
    return {
        "schema": SCHEMA_STATE,
        "variant": v.params,
        "components": [{"partition": list(p), "element": c.to_json()} for p, c in comps],
    }
