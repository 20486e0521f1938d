"""SLE variants, drift operators and the module of local martingales generated by Z."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .algebra.identities import transport_coefficients
from .algebra.mapseries import MapSeries
from .algebra.scalar import KAPPA, ScalarK, central_charge, parse_scalar
from .errors import DepthError, NullFieldError, SpecializationError
from .funcspace import Element, VariableSet
from .virasoro import WeightAssignment, apply_L, q_poly

SCHEMA_MODULE = "slevir.module/1"


def one_leg_weight(kappa_i: ScalarK) -> ScalarK:
    return (6 - kappa_i) / (2 * kappa_i)


def rho_weight(rho: ScalarK, kappa: ScalarK = KAPPA) -> ScalarK:
    return rho * (rho + 4 - kappa) / (4 * kappa)


@dataclass
class SleVariant:
    name: str
    vs: VariableSet
    xs: tuple[str, ...]
    ys: tuple[str, ...]
    kappas: dict[str, ScalarK]
    hy: dict[str, ScalarK]
    Z: Element
    Delta: ScalarK | None
    params: dict = field(default_factory=dict)
    kappa: ScalarK = KAPPA

    @property
    def weights(self) -> WeightAssignment:
        deltas = {x: one_leg_weight(self.kappas[x]) for x in self.xs}
        deltas.update(self.hy)
        ordered = {p: deltas[p] for p in self.vs.points if p in deltas}
        return WeightAssignment.of(ordered, central_charge(self.kappa))

    @property
    def highest_weight(self) -> ScalarK | None:
        if self.Delta is None:
            return None
        w = self.weights
        total = self.Delta
        for _, d in w.deltas:
            total = total + d
        return total

    def D(self, I: int | str, e: Element) -> Element:
        return null_field_operator(self, I, e)

    def A(self, I: int | str, e: Element) -> Element:
        return apply_A(self, I, e)

    def Z_inverse(self) -> Element:
        return self.Z.monomial_inverse()

    def ratio(self, e: Element) -> Element:
        return e * self.Z_inverse()


def _curve(v: SleVariant, I: int | str) -> str:
    if isinstance(I, str):
        if I not in v.xs:
            raise KeyError(f"{I!r} is not a curve variable")
        return I
    return v.xs[I]


@lru_cache(maxsize=None)
def _inv_diff(vs: VariableSet, a: str, b: str, k: int) -> Element:
    return vs.difference_power(a, b, -k)


def null_field_operator(v: SleVariant, I: int | str, e: Element) -> Element:
    """D_I e for the variant's weights and kappas."""
    xi = _curve(v, I)
    vs = e.vs
    pieces = [e.derive(xi).derive(xi).scale(v.kappas[xi] / 2)]
    for xj in v.xs:
        if xj == xi:
            continue
        kj = v.kappas[xj]
        pieces.append(_inv_diff(vs, xj, xi, 1) * e.derive(xj).scale(2))
        pieces.append(_inv_diff(vs, xj, xi, 2) * e.scale((kj - 6) / kj))
    for yk in v.ys:
        pieces.append(_inv_diff(vs, yk, xi, 1) * e.derive(yk).scale(2))
        pieces.append(_inv_diff(vs, yk, xi, 2) * e.scale(-2 * v.hy[yk]))
    return Element.sum(vs, pieces)


# transport polynomials -------------------------------------------------------------


def p_recursive(m: int, f_minus1, f: Mapping[int, object], one=1):
    """p_m from p_{-2} = 1, p_{-j} = -sum_{k=1}^{j-2} f_{-k} p_{-j+k}.

    ``f`` maps k >= 2 to the value of f_{-k}; ``f_minus1`` fills the f_{-1} slot.
    """
    if m > -2:
        raise ValueError("p_m is defined for m <= -2")
    vals = {2: one}
    for j in range(3, -m + 1):
        acc = 0 * one
        for k in range(1, j - 1):
            fk = f_minus1 if k == 1 else f.get(k, 0 * one)
            acc = acc + fk * vals[j - k]
        vals[j] = -acc
    return vals[-m]


def p_poly(m: int, vs: VariableSet, point: str) -> Element:
    """p_m(-x, f_{-2}, f_{-3}, ...) as an Element (recursion)."""
    return vs.poly(_p_poly_cached(vs, m, point))


@lru_cache(maxsize=None)
def _p_poly_cached(vs: VariableSet, m: int, point: str):
    fs = {k: vs.fvar(-k) for k in range(2, min(-m, vs.depth) + 1)}
    return p_recursive(m, -vs.point(point), fs, vs.one_poly)


def p_poly_residue(m: int, vs: VariableSet, point: str) -> Element:
    """p_m(-x, f) as the residue of v^{-2-m} / (f(v) - x)."""
    f = MapSeries({k: vs.fvar(-k) for k in range(2, vs.depth + 1)}, vs.depth, vs.zero_poly)
    return vs.poly(transport_coefficients(f, vs.point(point))[m])


def apply_A(v: SleVariant, I: int | str, e: Element) -> Element:
    """Drift operator A_I = D_I + 2 sum_m p_m(-x_I, f) d/df_m."""
    xi = _curve(v, I)
    vs = e.vs
    pieces = [null_field_operator(v, xi, e)]
    for k in range(2, e.f_support() + 1):
        de = e.derive_f(-k)
        if not de.is_zero():
            pieces.append(p_poly(-k, vs, xi) * de.scale(2))
    return Element.sum(vs, pieces)


def drift_commutator_residual(v: SleVariant, n: int, I: int | str, e: Element) -> Element:
    """([L_n, A_I] - q_n A_I) e."""
    w = v.weights
    xi = _curve(v, I)
    Ae = apply_A(v, xi, e)
    lhs = apply_L(n, w, Ae) - apply_A(v, xi, apply_L(n, w, e))
    return lhs - q_poly(n, e.vs, xi) * Ae


# variants ---------------------------------------------------------------------------


def _scalar(value) -> ScalarK:
    if isinstance(value, str):
        return parse_scalar(value)
    return ScalarK.coerce(value)


def make_variant(
    kind: str,
    *,
    rho: Sequence | None = None,
    n: int | None = None,
    kappas: Sequence | None = None,
    Z: Element | None = None,
    geometry: str = "paired",
    depth: int = 8,
    order: Sequence[str] | None = None,
    hy: Mapping[str, object] | None = None,
    vs: VariableSet | None = None,
    check: bool = True,
) -> SleVariant:
    """Construct and verify an SLE variant.

    kind:
      ``chordal``    one curve, Z = 1;
      ``kappa-rho``  one curve and marked points with exponents rho (ScalarK or strings like "kappa-6");
      ``multiple``   n curves; Z given, or for n = 2 the built-in ``geometry`` "paired" or "unpaired";
      ``custom``     explicit Z over explicit variables (``order``) with ``hy`` weights.
    Construction fails with NullFieldError if some D_I Z is nonzero.
    """
    kappa = KAPPA
    params: dict = {"kind": kind}
    if kind == "chordal":
        xs, ys = ("x",), ()
        vs = vs or VariableSet(order or xs, depth)
        Zf = vs.one()
        hyd: dict = {}
    elif kind == "kappa-rho":
        if not rho:
            raise ValueError("kappa-rho needs at least one rho")
        rhos = [_scalar(r) for r in rho]
        ys = ("y",) if len(rhos) == 1 else tuple(f"y{k + 1}" for k in range(len(rhos)))
        xs = ("x",)
        vs = vs or VariableSet(order or xs + ys, depth)
        Zf = vs.one()
        for y, r in zip(ys, rhos):
            Zf = Zf * vs.difference_power(y, "x", r / kappa)
        for (j, yj), (k, yk) in itertools.combinations(enumerate(ys), 2):
            Zf = Zf * vs.difference_power(yj, yk, rhos[j] * rhos[k] / (2 * kappa))
        hyd = {y: rho_weight(r, kappa) for y, r in zip(ys, rhos)}
        params["rho"] = [str(r) for r in rhos]
    elif kind in ("multiple", "custom"):
        if kind == "multiple":
            if n is None:
                raise ValueError("multiple SLE needs n")
            xs = tuple(f"x{k + 1}" for k in range(n))
            ys = ()
            hyd = {}
        else:
            if order is None or Z is None:
                raise ValueError("custom variants need order and Z")
            xs = tuple(p for p in order if p.startswith("x"))
            ys = tuple(p for p in order if not p.startswith("x"))
            hyd = {k: _scalar(v) for k, v in (hy or {}).items()}
        if Z is not None:
            vs = Z.vs
            Zf = Z
        else:
            if n != 2:
                raise ValueError("built-in partition functions exist for n = 2 only; pass Z")
            vs = vs or VariableSet(order or xs, depth)
            exponent = (kappa - 6) / kappa if geometry == "paired" else 2 / kappa
            Zf = vs.difference_power("x2", "x1", exponent)
            params["geometry"] = geometry
        params["n"] = len(xs)
    else:
        raise ValueError(f"unknown variant kind {kind!r}")

    ks = [_scalar(k) for k in kappas] if kappas else [kappa] * len(xs)
    if len(ks) != len(xs):
        raise ValueError("one kappa per curve")
    for k in ks:
        if k != kappa and k != 16 / kappa:
            raise ValueError("curve kappas must be kappa or 16/kappa")
    v = SleVariant(
        name=kind,
        vs=vs,
        xs=xs,
        ys=ys,
        kappas=dict(zip(xs, ks)),
        hy=hyd,
        Z=Zf,
        Delta=Zf.homogeneity_degree(),
        params=params,
    )
    if check:
        for xi in xs:
            r = null_field_operator(v, xi, Zf)
            if not r.is_zero():
                raise NullFieldError(f"D_{xi} Z = {r} is not zero")
    return v


def zeta_function(v: SleVariant) -> Element:
    """The second two-point solution (y - x)^{2/kappa} of the coordinate-changed chordal variant."""
    a, b = (v.xs + v.ys)[:2]
    return v.vs.difference_power(b, a, 2 / v.kappa)


def translation_residual(v: SleVariant) -> Element:
    vs = v.vs
    return Element.sum(vs, (v.Z.derive(p) for p in v.xs + v.ys))


def mobius_covariance_check(v: SleVariant) -> dict[int, dict]:
    """Apply sum_p (p^{1+n} d/dp + (1+n) delta_p p^n) to Z for n = -1, 0, 1."""
    vs = v.vs
    w = v.weights
    out = {}
    for n in (-1, 0, 1):
        pieces = []
        for name, delta in w.deltas:
            x = vs.var(name)
            pieces.append(x ** (1 + n) * v.Z.derive(name))
            if n >= 0:
                pieces.append(x**n * v.Z * (delta * (1 + n)))
        res = Element.sum(vs, pieces)
        out[n] = {"pass": res.is_zero(), "residual": res}
    return out


def positivity_check(v: SleVariant, kappa0, samples: int = 100, seed: int = 0) -> bool:
    """Sample Z at random chamber points (sorted uniform draws) and check positivity."""
    rng = np.random.default_rng(seed)
    f = v.Z.numeric(float(Fraction(kappa0)))
    pts = np.sort(rng.uniform(-5, 5, size=(samples, len(v.vs.points))), axis=1)
    vals = f({p: pts[:, i] for i, p in enumerate(v.vs.points)})
    return bool(np.all(np.asarray(vals) > 0))


# PBW words and the module ------------------------------------------------------------


def partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of n as non-increasing tuples, in reverse-lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return out


def normal_order_left(a: int, word: tuple[int, ...]) -> dict[tuple[int, ...], int]:
    """L_{-a} times a PBW word (non-increasing indices), rewritten in PBW words."""
    return dict(_left(a, word))


@lru_cache(maxsize=None)
def _left(a: int, word: tuple[int, ...]) -> tuple:
    if not word or a >= word[0]:
        return (((a,) + word, 1),)
    b = word[0]
    rest = word[1:]
    acc: dict = {}
    # L_{-a} L_{-b} = L_{-b} L_{-a} + (b - a) L_{-a-b}
    for w1, c1 in _left(a, rest):
        for w2, c2 in _left(b, w1):
            acc[w2] = acc.get(w2, 0) + c1 * c2
    for w1, c1 in _left(a + b, rest):
        acc[w1] = acc.get(w1, 0) + (b - a) * c1
    return tuple((k, v) for k, v in acc.items() if v)


def normal_order(word: Sequence[int]) -> dict[tuple[int, ...], int]:
    """Any product L_{-w1}...L_{-wk} (w_i > 0) in PBW words."""
    out: dict = {(): 1}
    for a in reversed(tuple(word)):
        nxt: dict = {}
        for w, c in out.items():
            for w2, c2 in _left(a, w):
                nxt[w2] = nxt.get(w2, 0) + c * c2
        out = {k: v for k, v in nxt.items() if v}
    return out


@dataclass
class ModuleBasis:
    variant: SleVariant
    max_level: int
    words: dict[int, list[tuple[int, ...]]]
    elements: dict[tuple[int, ...], Element]
    basis: dict[int, list[tuple[int, ...]]]
    dims: list[int]
    kappa0: Fraction | None = None
    verified: bool = False

    def element(self, word: Sequence[int]) -> Element:
        return self.elements[tuple(word)]

    def to_json(self) -> dict:
        v = self.variant
        levels = []
        for lv in range(self.max_level + 1):
            entries = []
            for word in self.basis[lv]:
                e = self.elements[word]
                entry = {"word": [-a for a in word], "element": e.to_json()}
                try:
                    entry["ratio"] = v.ratio(e).to_json()
                except ValueError:
                    pass
                entries.append(entry)
            levels.append({"level": lv, "dimension": self.dims[lv], "basis": entries})
        return {
            "schema": SCHEMA_MODULE,
            "variant": v.params,
            "kappa": "generic" if self.kappa0 is None else str(self.kappa0),
            "graded_dimensions": self.dims,
            "verified_drift_free": self.verified,
            "levels": levels,
        }


def word_elements(v: SleVariant, max_level: int, cache: dict | None = None) -> dict[tuple[int, ...], Element]:
    """Elements L_{-a1} ... L_{-ak} Z for every PBW word up to max_level."""
    w = v.weights
    cache = {} if cache is None else cache
    cache.setdefault((), v.Z)
    for level in range(1, max_level + 1):
        for word in partitions(level):
            if word in cache:
                continue
            cache[word] = apply_L(-word[0], w, cache[word[1:]])
    return cache


def _specialize_vectors(vectors: list[dict], kappa0) -> list[dict]:
    out = []
    for vec in vectors:
        sv = {}
        for k, c in vec.items():
            val = c.at_kappa(kappa0)
            if val:
                sv[k] = val
        out.append(sv)
    return out


def level_columns(v: SleVariant, words: list, elements: dict, kappa0=None):
    cols = linalg.coordinates([elements[wd] for wd in words])
    if kappa0 is None:
        return cols, ScalarK(1)
    return _specialize_vectors(cols, Fraction(kappa0)), Fraction(1)


def build_module(v: SleVariant, max_level: int, kappa0=None, verify: bool = True) -> ModuleBasis:
    """Graded pieces of U(vir) Z up to max_level with exact ranks.

    Basis words are chosen greedily in reverse-lexicographic order.  With
    ``verify`` every basis element is checked to lie in the kernel of each A_I.
    """
    if max_level > v.vs.depth:
        raise DepthError(f"level {max_level} needs truncation depth >= {max_level}")
    elements = word_elements(v, max_level)
    words, basis, dims = {}, {}, []
    for level in range(max_level + 1):
        ws = partitions(level)
        cols, one = level_columns(v, ws, elements, kappa0)
        piv, _ = linalg.echelon(cols, one)
        words[level] = ws
        basis[level] = [ws[j] for j in piv]
        dims.append(len(piv))
    ok = True
    if verify:
        for level in range(max_level + 1):
            for wd in basis[level]:
                e = elements[wd]
                if kappa0 is not None:
                    e = e.specialize(kappa=Fraction(kappa0))
                for xi in v.xs:
                    if kappa0 is None:
                        r = apply_A(v, xi, e)
                    else:
                        r = _apply_A_at(v, xi, e, Fraction(kappa0))
                    if not r.is_zero():
                        ok = False
        if not ok:
            raise NullFieldError("a module element is not annihilated by the drift operators")
    return ModuleBasis(v, max_level, words, elements, basis, dims, None if kappa0 is None else Fraction(kappa0), verify)


def _apply_A_at(v: SleVariant, xi: str, e: Element, kappa0: Fraction) -> Element:
    # the operator's kappa-dependent coefficients act on a specialized element
    return apply_A(v, xi, e).specialize(kappa=kappa0)


def _combine(elements: dict, words: list, coeffs: list, vs: VariableSet) -> Element:
    parts = []
    for wd, c in zip(words, coeffs):
        if c != 0:
            parts.append(elements[wd].scale(ScalarK.coerce(c)))
    return Element.sum(vs, parts)


def _descendant_vectors(words_hi: list, lower_nulls: dict[int, list], level: int, one) -> list[list]:
    """Coefficient vectors (over words_hi) of PBW descendants of lower null vectors."""
    index = {wd: i for i, wd in enumerate(words_hi)}
    out = []
    for lv, nulls in lower_nulls.items():
        for null_words, coeffs in nulls:
            for prefix in partitions(level - lv):
                vec = [0 * one] * len(words_hi)
                for wd, c in zip(null_words, coeffs):
                    if c == 0:
                        continue
                    for w2, c2 in normal_order(prefix + wd).items():
                        vec[index[w2]] = vec[index[w2]] + c * c2
                if any(x != 0 for x in vec):
                    out.append(vec)
    return out


def find_singular_null(v: SleVariant, level: int, kappa0=None) -> dict:
    """Null vectors (word combinations vanishing as functions, modulo descendants of
    lower ones) and singular vectors (nonzero elements killed by L_1 and L_2) at ``level``."""
    k0 = None if kappa0 is None else Fraction(kappa0)
    if k0 is not None and k0 <= 0:
        raise SpecializationError("kappa must be positive")
    elements = word_elements(v, level)
    w = v.weights
    one = ScalarK(1) if k0 is None else Fraction(1)
    nulls: dict[int, list] = {}
    new_nulls = []
    for lv in range(1, level + 1):
        ws = partitions(lv)
        cols, one = level_columns(v, ws, elements, k0)
        ker = linalg.kernel(cols, one)
        desc = _descendant_vectors(ws, nulls, lv, one)
        fresh = linalg.quotient_basis(ker, desc, one)
        nulls[lv] = [(ws, c) for c in ker]
        if lv == level:
            new_nulls = [(ws, c) for c in fresh]
    ws = partitions(level)
    cols, one = level_columns(v, ws, elements, k0)
    ker = linalg.kernel(cols, one)
    raised = []
    for wd in ws:
        e = elements[wd]
        raised.append((apply_L(1, w, e), apply_L(2, w, e)))
    stacked_elems = [r[0] for r in raised] + [r[1] for r in raised]
    coords = linalg.coordinates(stacked_elems)
    if k0 is not None:
        coords = _specialize_vectors(coords, k0)
    n = len(ws)
    stacked = []
    for j in range(n):
        col = {("L1", k): val for k, val in coords[j].items()}
        col.update({("L2", k): val for k, val in coords[n + j].items()})
        stacked.append(col)
    sing_ker = linalg.kernel(stacked, one)
    singular = linalg.quotient_basis(sing_ker, ker, one)
    vs = v.vs

    def realize(coeffs):
        e = _combine(elements, ws, coeffs, vs)
        return e.specialize(kappa=k0) if k0 is not None else e

    report = {
        "level": level,
        "kappa": "generic" if k0 is None else str(k0),
        "null_vectors": [
            {"words": [[-a for a in wd] for wd in nw], "coefficients": [str(c) for c in cf]} for nw, cf in new_nulls
        ],
        "singular_vectors": [],
    }
    for cf in singular:
        e = realize(cf)
        entry = {
            "words": [[-a for a in wd] for wd in ws],
            "coefficients": [str(c) for c in cf],
            "element": e,
        }
        try:
            entry["ratio"] = e * v.Z_inverse().specialize(kappa=k0) if k0 is not None else v.ratio(e)
        except ValueError:
            pass
        report["singular_vectors"].append(entry)
    return report
