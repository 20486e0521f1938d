"""Difference-power times polynomial functions of points and Loewner coefficients.

An :class:`Element` is a finite sum over exponent classes of

    prod_{pairs} (later - earlier)**e_pair * P(t, points, f) / d(t)

where the pair exponents live in Q(t), P is a polynomial over Q, and d is a
monic polynomial in t.  Within a class the exponents are made unique by
pulling every factor (later - earlier) out of P, and P/d is reduced.  Two
elements are equal exactly when their canonical forms coincide.

The polynomial ring is a flint multivariate ring whose first generator is t
(kappa = t**2); the remaining generators are the point variables in chamber
order followed by f2, f3, ..., fD standing for f_{-2}, ..., f_{-D}.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

import flint
import numpy as np

from .algebra.scalar import ScalarK, _as_fmpq, _to_fraction
from .errors import ChamberError, DepthError, SpecializationError


def exponent_class(e: ScalarK) -> ScalarK:
    """Representative of e modulo the integers."""
    quotient, _ = divmod(e.num, e.den)
    c0 = _to_fraction(quotient[0]) if quotient.degree() >= 0 else Fraction(0)
    k = math.floor(c0)
    return e - k if k else e


def _integer_gap(a: ScalarK, b: ScalarK) -> int:
    d = a - b
    if not d.is_integer():
        raise ValueError("exponents are not in the same class")
    return int(d.constant())


class VariableSet:
    """Point variables in chamber order plus Loewner coefficients f_{-2}..f_{-depth}."""

    def __init__(self, points: Sequence[str], depth: int = 8):
        if len(set(points)) != len(points):
            raise ValueError("duplicate point variable")
        for p in points:
            if p == "t" or (p.startswith("f") and p[1:].isdigit()):
                raise ValueError(f"reserved variable name {p!r}")
        if depth < 1:
            raise ValueError("depth must be at least 1")
        self.points = tuple(points)
        self.depth = depth
        self.fnames = tuple(f"f{k}" for k in range(2, depth + 1))
        self.names = ("t",) + self.points + self.fnames
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "lex")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.gens = self.ctx.gens()
        self.pairs = tuple((i, j) for j in range(len(self.points)) for i in range(j))
        self.pair_index = {pq: k for k, pq in enumerate(self.pairs)}
        self.zero_poly = self.ctx.from_dict({})
        self.one_poly = self.zero_poly + 1
        self._tpoly_cache: dict = {}
        # (later - earlier) for each pair, as polynomials
        self.diffs = tuple(self.point(self.points[j]) - self.point(self.points[i]) for i, j in self.pairs)

    def __eq__(self, other):
        return isinstance(other, VariableSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableSet(points={self.points}, depth={self.depth})"

    # generators ------------------------------------------------------------
    def point(self, name: str):
        if name not in self.points:
            raise KeyError(f"unknown point variable {name!r}")
        return self.gens[self.index[name]]

    def fvar(self, m: int):
        """Generator for f_m (m <= -2)."""
        if m > -2:
            raise ValueError("Loewner coefficients are indexed by m <= -2")
        if -m > self.depth:
            raise DepthError(f"f_{m} exceeds depth {self.depth}")
        return self.gens[self.index[f"f{-m}"]]

    def f_index(self, m: int) -> int:
        if -m > self.depth or m > -2:
            raise DepthError(f"f_{m} outside f_-2..f_-{self.depth}")
        return self.index[f"f{-m}"]

    def tpoly(self, p: flint.fmpq_poly):
        key = tuple(p.coeffs())
        hit = self._tpoly_cache.get(key)
        if hit is None:
            nv = len(self.names)
            hit = self.ctx.from_dict({(i,) + (0,) * (nv - 1): c for i, c in enumerate(p.coeffs()) if c != 0})
            self._tpoly_cache[key] = hit
        return hit

    def order(self, name: str) -> int:
        return self.points.index(name)

    def pair_of(self, a: str, b: str) -> tuple[int, int]:
        i, j = sorted((self.order(a), self.order(b)))
        return i, j

    # element constructors ----------------------------------------------------
    def zero(self) -> "Element":
        return Element(self, {})

    def const(self, c) -> "Element":
        c = ScalarK.coerce(c)
        return Element.from_parts(self, [(self._zero_exps(), self.tpoly(c.num), c.den)])

    def one(self) -> "Element":
        return self.const(1)

    def var(self, name: str) -> "Element":
        if name in self.points:
            g = self.point(name)
        elif name.startswith("f") and name[1:].isdigit():
            g = self.fvar(-int(name[1:]))
        else:
            raise KeyError(f"unknown variable {name!r}")
        return Element.from_parts(self, [(self._zero_exps(), g, _ONE_T)])

    def f(self, m: int) -> "Element":
        return Element.from_parts(self, [(self._zero_exps(), self.fvar(m), _ONE_T)])

    def poly(self, p, coeff=1) -> "Element":
        """Wrap a ring polynomial (optionally times a ScalarK)."""
        c = ScalarK.coerce(coeff)
        return Element.from_parts(self, [(self._zero_exps(), p * self.tpoly(c.num), c.den)])

    def difference_power(self, a: str, b: str, e) -> "Element":
        """(a - b)**e.

        Prefactors are stored with the later point first, so that bases are
        positive on the chamber.  For integer e the sign (-1)**e is kept; for
        non-integer e the constant phase of a reversed base is dropped.
        """
        e = ScalarK.coerce(e)
        i, j = self.pair_of(a, b)
        exps = list(self._zero_exps())
        exps[self.pair_index[(i, j)]] = e
        sign = 1
        if self.order(a) < self.order(b) and e.is_integer() and int(e.constant()) % 2:
            sign = -1
        return Element.from_parts(self, [(tuple(exps), self.one_poly * sign, _ONE_T)])

    def _zero_exps(self):
        return (_ZERO,) * len(self.pairs)

    def parse(self, text: str) -> "Element":
        """Build an Element from a sympy-readable polynomial in the point and f variables and kappa/t."""
        import sympy

        t = sympy.Symbol("t", positive=True)
        kappa = sympy.Symbol("kappa", positive=True)
        syms = {n: sympy.Symbol(n) for n in self.points + self.fnames}
        expr = sympy.expand(sympy.sympify(text, locals={**syms, "t": t, "kappa": kappa}).subs(kappa, t**2))
        num, den = sympy.fraction(sympy.together(expr))
        dpoly = sympy.Poly(den, t)
        npoly = sympy.Poly(num, t, *[syms[n] for n in self.points + self.fnames])
        terms = {}
        for monom, c in npoly.terms():
            terms[monom] = flint.fmpq(int(sympy.Rational(c).p), int(sympy.Rational(c).q))
        p = self.ctx.from_dict(terms)
        dc = [flint.fmpq(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for c in reversed(dpoly.all_coeffs())]
        return Element.from_parts(self, [(self._zero_exps(), p, flint.fmpq_poly(dc))])


_ZERO = ScalarK(0)
_ONE_T = flint.fmpq_poly([1])


class Part:
    """One exponent class: prod diff**exps * num / den with den in Q[t] monic."""

    __slots__ = ("exps", "num", "den")

    def __init__(self, exps: tuple, num, den: flint.fmpq_poly):
        self.exps = exps
        self.num = num
        self.den = den

    def key(self):
        return tuple(exponent_class(e) for e in self.exps)


def _canonical_part(vs: VariableSet, exps: tuple, num, den: flint.fmpq_poly) -> Part | None:
    if num.is_zero():
        return None
    exps = list(exps)
    for k, d in enumerate(vs.diffs):
        while True:
            q, r = divmod(num, d)
            if not r.is_zero():
                break
            num = q
            exps[k] = exps[k] + 1
    if not den.is_one():
        g = num.gcd(vs.tpoly(den))
        if not g.is_one():
            # g depends on t only; divide it out of both
            gt = _mpoly_to_tpoly(vs, g)
            num = num / g
            den = den // gt
        lc = den[den.degree()]
        if lc != 1:
            num = num / lc
            den = den / lc
    return Part(tuple(exps), num, den)


def _mpoly_to_tpoly(vs: VariableSet, p) -> flint.fmpq_poly:
    coeffs: dict[int, flint.fmpq] = {}
    for exps, c in p.to_dict().items():
        if any(exps[1:]):
            raise ValueError("polynomial depends on more than t")
        coeffs[exps[0]] = c
    top = max(coeffs) if coeffs else -1
    return flint.fmpq_poly([coeffs.get(i, 0) for i in range(top + 1)])


def _align(vs: VariableSet, part: Part, target: tuple):
    """Numerator of ``part`` re-expressed over the lower exponents ``target``."""
    num = part.num
    for k, (e, base) in enumerate(zip(part.exps, target)):
        gap = _integer_gap(e, base)
        if gap < 0:
            raise ValueError("target exponent above part exponent")
        if gap:
            num = num * vs.diffs[k] ** gap
    return num


def _merge(vs: VariableSet, parts: Sequence[Part]) -> Part | None:
    """Sum of parts that share an exponent class."""
    if len(parts) == 1:
        p = parts[0]
        return _canonical_part(vs, p.exps, p.num, p.den)
    target = tuple(_min_in_class([p.exps[k] for p in parts]) for k in range(len(vs.pairs)))
    den = parts[0].den
    same = all(p.den == den for p in parts)
    if same:
        num = vs.zero_poly
        for p in parts:
            num = num + _align(vs, p, target)
        return _canonical_part(vs, target, num, den)
    common = reduce(lambda a, b: a * b // a.gcd(b), (p.den for p in parts))
    num = vs.zero_poly
    for p in parts:
        num = num + _align(vs, p, target) * vs.tpoly(common // p.den)
    return _canonical_part(vs, target, num, common)


def _min_in_class(es: Sequence[ScalarK]) -> ScalarK:
    best = es[0]
    for e in es[1:]:
        if _integer_gap(e, best) < 0:
            best = e
    return best


class Element:
    """Immutable finite sum of canonical parts, keyed by exponent class."""

    __slots__ = ("vs", "parts", "__weakref__")

    def __init__(self, vs: VariableSet, parts: dict):
        self.vs = vs
        self.parts = parts

    @classmethod
    def from_parts(cls, vs: VariableSet, raw: Iterable[tuple]) -> "Element":
        groups: dict = {}
        for exps, num, den in raw:
            p = Part(tuple(exps), num, den)
            groups.setdefault(p.key(), []).append(p)
        return cls._from_groups(vs, groups)

    @classmethod
    def _from_groups(cls, vs, groups: dict) -> "Element":
        parts = {}
        for key, plist in groups.items():
            merged = _merge(vs, plist)
            if merged is not None:
                parts[key] = merged
        return cls(vs, parts)

    @classmethod
    def sum(cls, vs: VariableSet, elements: Iterable["Element"]) -> "Element":
        groups: dict = {}
        for e in elements:
            for key, p in e.parts.items():
                groups.setdefault(key, []).append(p)
        return cls._from_groups(vs, groups)

    # predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ScalarK)):
            other = self.vs.const(other)
        if not isinstance(other, Element):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((str(k), str(p.num), str(p.den)) for k, p in self.parts.items())))

    def is_polynomial(self) -> bool:
        """No prefactor, or only nonnegative integer powers of differences."""
        for p in self.parts.values():
            for e in p.exps:
                if not (e.is_integer() and e.constant() >= 0):
                    return False
        return True

    def f_support(self) -> int:
        """Largest k such that f_{-k} occurs (0 if none)."""
        best = 0
        offset = 1 + len(self.vs.points)
        for p in self.parts.values():
            degs = p.num.degrees()
            for i, name in enumerate(self.vs.fnames):
                if degs[offset + i] > 0:
                    best = max(best, int(name[1:]))
        return best

    def variables_used(self) -> set[str]:
        used = set()
        for p in self.parts.values():
            degs = p.num.degrees()
            for i, n in enumerate(self.vs.names):
                if i and degs[i] > 0:
                    used.add(n)
            for k, e in enumerate(p.exps):
                if not e.is_zero():
                    i, j = self.vs.pairs[k]
                    used.add(self.vs.points[i])
                    used.add(self.vs.points[j])
        return used

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.vs is not self.vs and other.vs != self.vs:
                raise ValueError("elements live in different variable sets")
            return other
        if isinstance(other, (int, Fraction, ScalarK, flint.fmpq)):
            return self.vs.const(other)
        raise TypeError(f"cannot combine Element with {type(other).__name__}")

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Element.sum(self.vs, (self, o))

    __radd__ = __add__

    def __neg__(self):
        return Element(self.vs, {k: Part(p.exps, -p.num, p.den) for k, p in self.parts.items()})

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Element.sum(self.vs, (self, -o))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Element":
        c = ScalarK.coerce(c)
        if c.is_zero():
            return self.vs.zero()
        tn = self.vs.tpoly(c.num)
        return Element.from_parts(self.vs, [(p.exps, p.num * tn, p.den * c.den) for p in self.parts.values()])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ScalarK, flint.fmpq)):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        o = self._coerce(other)
        raw = []
        for a in self.parts.values():
            for b in o.parts.values():
                exps = tuple(x + y for x, y in zip(a.exps, b.exps))
                raw.append((exps, a.num * b.num, a.den * b.den))
        return Element.from_parts(self.vs, raw)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, ScalarK, flint.fmpq)):
            return self.scale(1 / ScalarK.coerce(other))
        if isinstance(other, Element):
            return self * other.monomial_inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.monomial_inverse() ** (-n)
        out = self.vs.one()
        for _ in range(n):
            out = out * self
        return out

    def monomial_inverse(self) -> "Element":
        """Inverse of a single prefactor times a nonzero constant."""
        if len(self.parts) != 1:
            raise ValueError("only single-class monomial elements are invertible")
        (p,) = self.parts.values()
        if not p.num.is_constant():
            raise ValueError("only prefactor-times-constant elements are invertible")
        c = p.num.leading_coefficient()
        return Element.from_parts(
            self.vs, [(tuple(-e for e in p.exps), self.vs.one_poly, p.den * flint.fmpq_poly([1 / c]))]
        )

    # calculus ----------------------------------------------------------------
    def derive(self, v: str) -> "Element":
        vs = self.vs
        if v in vs.points:
            return self._derive_point(v)
        if v in vs.fnames:
            idx = vs.index[v]
            return Element.from_parts(vs, [(p.exps, p.num.derivative(idx), p.den) for p in self.parts.values()])
        raise KeyError(f"unknown variable {v!r}")

    def derive_f(self, m: int) -> "Element":
        vs = self.vs
        if -m > vs.depth:
            return vs.zero()
        idx = vs.f_index(m)
        return Element.from_parts(vs, [(p.exps, p.num.derivative(idx), p.den) for p in self.parts.values()])

    def _derive_point(self, v: str) -> "Element":
        vs = self.vs
        o = vs.order(v)
        vidx = vs.index[v]
        raw = []
        for p in self.parts.values():
            touching = [
                (k, 1 if vs.pairs[k][1] == o else -1)
                for k, e in enumerate(p.exps)
                if not e.is_zero() and o in vs.pairs[k]
            ]
            if not touching:
                raw.append((p.exps, p.num.derivative(vidx), p.den))
                continue
            exps = list(p.exps)
            prod_all = vs.one_poly
            for k, _ in touching:
                exps[k] = exps[k] - 1
                prod_all = prod_all * vs.diffs[k]
            num = prod_all * p.num.derivative(vidx)
            den = _ONE_T
            for k, sign in touching:
                others = vs.one_poly
                for k2, _ in touching:
                    if k2 != k:
                        others = others * vs.diffs[k2]
                e = p.exps[k]
                term = vs.tpoly(e.num) * others * p.num * sign
                if e.den.is_one():
                    num = num + term * vs.tpoly(den)
                else:
                    num = num * vs.tpoly(e.den) + term * vs.tpoly(den)
                    den = den * e.den
            raw.append((tuple(exps), num, p.den * den))
        return Element.from_parts(vs, raw)

    # grading -------------------------------------------------------------------
    def homogeneity_degree(self) -> ScalarK | None:
        """Common degree (points 1, f_{-k} k, prefactors their exponent), or None if inhomogeneous."""
        vs = self.vs
        weights = [0] + [1] * len(vs.points) + [int(n[1:]) for n in vs.fnames]
        degree = None
        for p in self.parts.values():
            base = reduce(lambda a, b: a + b, p.exps, _ZERO)
            for exps in p.num.monoms():
                d = base + sum(w * k for w, k in zip(weights, exps))
                if degree is None:
                    degree = d
                elif d != degree:
                    return None
        return degree

    # specialization and evaluation --------------------------------------------
    def _param(self, t0, kappa):
        if (t0 is None) == (kappa is None):
            raise ValueError("give exactly one of t0 or kappa")
        return (lambda s: s.at_t(t0)) if t0 is not None else (lambda s: s.at_kappa(kappa))

    def specialize(self, t0=None, kappa=None) -> "Element":
        """Substitute an exact value of t (or kappa); the result has constant coefficients."""
        at = self._param(t0, kappa)
        vs = self.vs
        raw = []
        for p in self.parts.values():
            exps = tuple(ScalarK(at(e)) for e in p.exps)
            d = at(ScalarK(p.den))
            if d == 0:
                raise SpecializationError("denominator vanishes at the specialization")
            raw.append((exps, _specialize_poly(vs, p.num, at), flint.fmpq_poly([_as_fmpq(d)])))
        return Element.from_parts(vs, raw)

    def evaluate(self, point: Mapping[str, float | Fraction], t0=None, kappa=None) -> float:
        """Real value at a chamber point; unspecified f's are taken as 0."""
        vs = self.vs
        at = self._param(t0, kappa)
        vals = [Fraction(point[n]) if n in point else None for n in vs.points]
        if any(v is None for v in vals):
            raise ValueError("every point variable needs a value")
        for a, b in zip(vals, vals[1:]):
            if not a < b:
                raise ChamberError("point assignment violates the chamber order")
        args = [flint.fmpq(0)]
        args += [_as_fmpq(v) for v in vals]
        args += [_as_fmpq(Fraction(point.get(n, 0))) for n in vs.fnames]
        total = 0.0
        for p in self.parts.values():
            spec = _specialize_poly(vs, p.num, at)
            value = float(_to_fraction(spec(*args))) / float(at(ScalarK(p.den)))
            for k, e in enumerate(p.exps):
                if e.is_zero():
                    continue
                i, j = vs.pairs[k]
                base = float(vals[j] - vals[i])
                value *= base ** float(at(e))
            total += value
        return total

    def numeric(self, kappa: float):
        """Vectorized float evaluator: returns fn(values: dict name -> array) -> array."""
        vs = self.vs
        t0 = math.sqrt(float(kappa))
        compiled = []
        for p in self.parts.values():
            exps = [(vs.pairs[k], e.evalf(t0)) for k, e in enumerate(p.exps) if not e.is_zero()]
            dval = _horner_float(p.den, t0)
            monos: dict[tuple, float] = {}
            for m, c in p.num.terms():
                key = tuple(int(k) for k in m[1:])
                monos[key] = monos.get(key, 0.0) + float(_to_fraction(c)) * t0 ** int(m[0]) / dval
            compiled.append((exps, monos))
        names = vs.names[1:]

        def fn(values: Mapping[str, np.ndarray]):
            out = 0.0
            for exps, monos in compiled:
                acc = 0.0
                for key, c in monos.items():
                    term = c
                    for name, k in zip(names, key):
                        if k:
                            term = term * np.asarray(values[name], dtype=float) ** k
                    acc = acc + term
                for (i, j), e in exps:
                    acc = acc * (np.asarray(values[vs.points[j]]) - np.asarray(values[vs.points[i]])) ** e
                out = out + acc
            return out

        return fn

    # serialization -------------------------------------------------------------
    def terms(self) -> list[tuple[ScalarK, dict, dict]]:
        """(coefficient, prefactor {(later, earlier): exp}, monomial {var: power}) triples."""
        vs = self.vs
        out = []
        for p in self.parts.values():
            pref = {}
            for k, e in enumerate(p.exps):
                if not e.is_zero():
                    i, j = vs.pairs[k]
                    pref[(vs.points[j], vs.points[i])] = e
            groups: dict[tuple, dict[int, flint.fmpq]] = {}
            for m, c in p.num.terms():
                groups.setdefault(tuple(int(k) for k in m[1:]), {})[int(m[0])] = c
            for key, tc in groups.items():
                top = max(tc)
                num = flint.fmpq_poly([tc.get(i, 0) for i in range(top + 1)])
                mono = {vs.names[1 + i]: k for i, k in enumerate(key) if k}
                out.append((ScalarK(num, p.den), pref, mono))
        return out

    def to_json(self) -> dict:
        terms = []
        for coeff, pref, mono in self.terms():
            terms.append(
                {
                    "coeff": coeff.to_json(),
                    "prefactor": [{"pair": list(pair), "exp": e.to_json()} for pair, e in pref.items()],
                    "monomial": dict(sorted(mono.items())),
                }
            )
        terms.sort(key=lambda d: (repr(d["prefactor"]), sorted(d["monomial"].items())))
        return {"points": list(self.vs.points), "depth": self.vs.depth, "text": str(self), "terms": terms}

    @classmethod
    def from_json(cls, data: dict, vs: VariableSet | None = None) -> "Element":
        if vs is None:
            vs = VariableSet(data["points"], data["depth"])
        raw = []
        for term in data["terms"]:
            exps = list(vs._zero_exps())
            for pf in term["prefactor"]:
                later, earlier = pf["pair"]
                exps[vs.pair_index[vs.pair_of(later, earlier)]] = ScalarK.from_json(pf["exp"])
            coeff = ScalarK.from_json(term["coeff"])
            mono = vs.one_poly
            for name, k in term["monomial"].items():
                mono = mono * vs.gens[vs.index[name]] ** int(k)
            raw.append((tuple(exps), mono * vs.tpoly(coeff.num), coeff.den))
        return cls.from_parts(vs, raw)

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        if not self.parts:
            return "0"
        pieces = []
        vs = self.vs
        for p in self.parts.values():
            pref = "".join(
                f"*({vs.points[vs.pairs[k][1]]}-{vs.points[vs.pairs[k][0]]})^({e})"
                for k, e in enumerate(p.exps)
                if not e.is_zero()
            )
            den = "" if p.den.is_one() else f"/({str(p.den).replace('x', 't')})"
            pieces.append(f"({p.num}){den}{pref}")
        return " + ".join(pieces)


def _specialize_poly(vs: VariableSet, num, at):
    """Replace t by its specialization inside a ring polynomial."""
    groups: dict[tuple, dict[int, flint.fmpq]] = {}
    for m, c in num.terms():
        groups.setdefault(tuple(int(k) for k in m[1:]), {})[int(m[0])] = c
    out = {}
    for key, tc in groups.items():
        top = max(tc)
        val = at(ScalarK(flint.fmpq_poly([tc.get(i, 0) for i in range(top + 1)])))
        if val:
            out[(0,) + key] = _as_fmpq(val)
    return vs.ctx.from_dict(out)


def _horner_float(p: flint.fmpq_poly, x: float) -> float:
    acc = 0.0
    for c in reversed(p.coeffs()):
        acc = acc * x + float(_to_fraction(c))
    return acc


def random_element(
    vs: VariableSet,
    rng,
    *,
    f_degree: int = 4,
    point_degree: int = 2,
    n_terms: int = 4,
    exponents: Sequence[ScalarK] | None = None,
    coeff_range: int = 5,
) -> Element:
    """Random polynomial (times an optional prefactor) for randomized identity checks.

    Monomials use f_{-2}..f_{-f_degree} with weighted f-degree at most
    ``f_degree`` and point degree at most ``point_degree``.  Coefficients are
    small rational functions of t.
    """
    fks = [k for k in range(2, min(f_degree, vs.depth) + 1)]
    monos = _weighted_monomials(fks, f_degree)
    raw_num = vs.zero_poly
    t = vs.gens[0]
    for _ in range(n_terms):
        fm = monos[rng.integers(len(monos))]
        term = vs.one_poly
        for k, e in fm.items():
            term = term * vs.fvar(-k) ** e
        for _ in range(int(rng.integers(point_degree + 1))):
            term = term * vs.point(vs.points[int(rng.integers(len(vs.points)))])
        c = int(rng.integers(-coeff_range, coeff_range + 1)) or 1
        c2 = int(rng.integers(-coeff_range, coeff_range + 1))
        raw_num = raw_num + term * (c + c2 * t**2)
    den = flint.fmpq_poly([int(rng.integers(1, 4))] + [0] * int(rng.integers(0, 3)) + [1])
    exps = tuple(exponents) if exponents is not None else vs._zero_exps()
    return Element.from_parts(vs, [(exps, raw_num, den)])


def _weighted_monomials(ks: Sequence[int], budget: int) -> list[dict[int, int]]:
    out: list[dict[int, int]] = [{}]

    def rec(i, left, cur):
        if i == len(ks):
            return
        k = ks[i]
        for e in range(1, left // k + 1):
            nxt = dict(cur)
            nxt[k] = e
            out.append(nxt)
            rec(i + 1, left - k * e, nxt)
        rec(i + 1, left, cur)

    rec(0, budget, {})
    return out
