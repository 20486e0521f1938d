"""The Virasoro representation n -> L_n on the function space.

``apply_L`` evaluates the residue formula: L_n is a multiplication operator
(central Schwarzian part plus one rational part per point) plus first-order
terms in the points and in the Loewner coefficients.  All coefficients are
polynomials read off from truncated expansions at infinity; reading outside a
guaranteed window surfaces as :class:`DepthError`.

``apply_L_explicit`` implements the closed-form operators for n >= -2 and is
kept as an independent cross-check of the residue route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra.mapseries import MapSeries, schwarzian
from .algebra.scalar import ScalarK, central_charge
from .errors import DepthError, WindowError
from .funcspace import Element, VariableSet


@dataclass(frozen=True)
class WeightAssignment:
    """delta per acting point and the central charge.

    Points of the variable set that are not listed are spectators: L_n does
    not differentiate them.
    """

    deltas: tuple[tuple[str, ScalarK], ...]
    c: ScalarK

    @classmethod
    def of(cls, deltas: Mapping[str, object], c=None) -> "WeightAssignment":
        cc = central_charge() if c is None else ScalarK.coerce(c)
        return cls(tuple((k, ScalarK.coerce(v)) for k, v in deltas.items()), cc)

    @property
    def points(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.deltas)

    def delta(self, name: str) -> ScalarK:
        return dict(self.deltas)[name]


class _Coefficients:
    """Polynomial coefficients of L_n read off from the map expansion, per variable set."""

    def __init__(self, vs: VariableSet):
        self.vs = vs
        self.f = MapSeries({k: vs.fvar(-k) for k in range(2, vs.depth + 1)}, vs.depth, vs.zero_poly)
        fp = self.f.derivative()
        self.fp2 = fp.mul(fp)
        self._schwarz = None
        self._prod: dict[int, object] = {}
        self._cache: dict = {}

    def _read(self, series, k):
        try:
            return series.coefficient(k)
        except WindowError as exc:
            raise DepthError(f"truncation depth {self.vs.depth} too small: {exc}") from exc

    def fp2_power(self, k: int, n: int):
        """[u^{n-2}] f'(u)^2 f(u)^k."""
        key = ("fp2", k, n)
        hit = self._cache.get(key)
        if hit is None:
            s = self._prod.get(k)
            if s is None:
                s = self.fp2.mul(self.f.power(k))
                self._prod[k] = s
            hit = self._read(s, n - 2)
            self._cache[key] = hit
        return hit

    def schwarz(self, n: int):
        if self._schwarz is None:
            self._schwarz = schwarzian(self.f)
        return self._read(self._schwarz, n - 2)

    def inverse_power_coeff(self, m: int, l: int):
        """[z^{1+l}] f(z)^{-1-m}."""
        key = ("P", m, l)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._read(self.f.power(-1 - m), 1 + l)
            self._cache[key] = hit
        return hit

    def multiplier(self, n: int):
        """Polynomial coefficients C_m with delta-part sum_m (m+1) x^m C_m."""
        return [self.fp2_power(-2 - m, n) for m in range(0, -n + 1)]

    def point_vector(self, n: int):
        """D_m with d/dx coefficient sum_m x^m D_m."""
        return [self.fp2_power(-1 - m, n) for m in range(0, 2 - n)]

    def f_vector(self, n: int, l: int):
        key = ("df", n, l)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.vs.zero_poly
            for m in range(0, -1 - l):
                hit = hit - self.inverse_power_coeff(m, l) * self.fp2_power(m, n)
            self._cache[key] = hit
        return hit


_COEFF_CACHE: dict[VariableSet, _Coefficients] = {}


def _coefficients(vs: VariableSet) -> _Coefficients:
    hit = _COEFF_CACHE.get(vs)
    if hit is None:
        hit = _Coefficients(vs)
        _COEFF_CACHE[vs] = hit
    return hit


def _horner_in(vs: VariableSet, x, coeffs: Sequence, weights: Iterable[int] | None = None):
    out = vs.zero_poly
    xm = vs.one_poly
    ws = list(weights) if weights is not None else [1] * len(coeffs)
    for c, wgt in zip(coeffs, ws):
        if not c.is_zero():
            out = out + c * xm * wgt
        xm = xm * x
    return out


@dataclass
class _Operator:
    """A first-order operator: multiplier + sum_v a_v d/dv + sum_l b_l d/df_l."""

    mult: list = field(default_factory=list)  # (poly, ScalarK)
    points: dict = field(default_factory=dict)  # name -> poly
    fs: dict = field(default_factory=dict)  # l -> poly

    def apply(self, vs: VariableSet, e: Element) -> Element:
        pieces = []
        if self.mult:
            m = Element.sum(vs, (vs.poly(p, c) for p, c in self.mult if not p.is_zero()))
            if not m.is_zero():
                pieces.append(m * e)
        for name, p in self.points.items():
            if p.is_zero():
                continue
            de = e.derive(name)
            if not de.is_zero():
                pieces.append(vs.poly(p) * de)
        for l, p in self.fs.items():
            if p.is_zero():
                continue
            de = e.derive_f(l)
            if not de.is_zero():
                pieces.append(vs.poly(p) * de)
        return Element.sum(vs, pieces)


def _f_indices(e: Element) -> list[int]:
    return [-k for k in range(2, e.f_support() + 1)]


def _residue_operator(n: int, w: WeightAssignment, vs: VariableSet, ls: Sequence[int]) -> _Operator:
    co = _coefficients(vs)
    op = _Operator()
    s = co.schwarz(n)
    if not s.is_zero():
        op.mult.append((s, w.c / 12))
    cm = co.multiplier(n)
    dm = co.point_vector(n)
    for name, delta in w.deltas:
        x = vs.point(name)
        if cm:
            op.mult.append((_horner_in(vs, x, cm, range(1, len(cm) + 1)), delta))
        if dm:
            op.points[name] = _horner_in(vs, x, dm)
    for l in ls:
        op.fs[l] = co.f_vector(n, l)
    return op


def apply_L(n: int, w: WeightAssignment, e: Element) -> Element:
    """L_n e by the residue formula."""
    vs = e.vs
    if e.is_zero():
        return e
    return _residue_operator(n, w, vs, _f_indices(e)).apply(vs, e)


apply_L_general = apply_L


# closed forms -------------------------------------------------------------------


def _F(vs: VariableSet, k: int):
    if k == 0:
        return vs.one_poly
    if k == -1 or k > 0:
        return vs.zero_poly
    if -k > vs.depth:
        raise DepthError(f"f_{k} is beyond truncation depth {vs.depth}")
    return vs.fvar(k)


def _compositions(total: int, parts: int):
    """Ordered tuples of nonpositive integers (none equal to -1) summing to total."""
    if parts == 1:
        if total <= 0 and total != -1:
            yield (total,)
        return
    for first in range(0, total - 1, -1):
        if first == -1:
            continue
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _explicit_operator(n: int, w: WeightAssignment, vs: VariableSet, ls: Sequence[int]) -> _Operator:
    if n < -2:
        raise ValueError("closed forms exist for n >= -2 only")
    F = lambda k: _F(vs, k)  # noqa: E731
    op = _Operator()
    for l in ls:
        if n >= 2:
            b = -(1 + n + l) * F(n + l) if l <= -n else vs.zero_poly
        elif n == 1:
            b = -(2 + l) * F(1 + l) if l <= -3 else vs.zero_poly
        elif n == 0:
            b = -l * F(l)
        elif n == -1:
            quad = vs.zero_poly
            for m1, m2 in _compositions(l - 1, 2):
                quad = quad + F(m1) * F(m2)
            b = -(l * F(l - 1) - quad)
        else:
            cub = vs.zero_poly
            for m1, m2, m3 in _compositions(l - 2, 3):
                cub = cub + F(m1) * F(m2) * F(m3)
            b = -((l - 1) * F(l - 2) - cub + 4 * F(-2) * F(l))
        op.fs[l] = b
    if n == -2:
        op.mult.append((F(-2), -w.c / 2))
    for name, delta in w.deltas:
        x = vs.point(name)
        if n == 1:
            op.points[name] = vs.one_poly
        elif n == 0:
            op.points[name] = x
            op.mult.append((vs.one_poly, delta))
        elif n == -1:
            op.points[name] = x**2 - 3 * F(-2)
            op.mult.append((2 * x, delta))
        elif n == -2:
            op.points[name] = x**3 - 4 * x * F(-2) - 5 * F(-3)
            op.mult.append((3 * x**2 - 4 * F(-2), delta))
    return op


def apply_L_explicit(n: int, w: WeightAssignment, e: Element) -> Element:
    """L_n e (n >= -2) from the closed-form differential operators."""
    vs = e.vs
    if e.is_zero():
        return e
    return _explicit_operator(n, w, vs, _f_indices(e)).apply(vs, e)


# words, commutators and the Z-conjugated action ------------------------------------


def apply_word(word: Sequence[int], w: WeightAssignment, e: Element) -> Element:
    """L_{n_k} ... L_{n_1} e for word = (n_k, ..., n_1); the rightmost letter acts first."""
    out = e
    for n in reversed(tuple(word)):
        out = apply_L(n, w, out)
    return out


def commutator_residual(n: int, m: int, w: WeightAssignment, e: Element) -> Element:
    """([L_n, L_m] - (n - m) L_{n+m} - (c/12)(n^3 - n) delta_{n+m,0}) e."""
    lhs = apply_L(n, w, apply_L(m, w, e)) - apply_L(m, w, apply_L(n, w, e))
    rhs = apply_L(n + m, w, e).scale(n - m)
    if n + m == 0:
        rhs = rhs + e.scale(w.c * ScalarK(n**3 - n) / 12)
    return lhs - rhs


def log_derivative(Z: Element, name: str) -> Element:
    """(d/dname Z) / Z for a single-prefactor Z."""
    return Z.derive(name) * Z.monomial_inverse()


def apply_L_hat(n: int, w: WeightAssignment, Z: Element, phi: Element, method: str = "formula") -> Element:
    """(L_n (Z phi)) / Z.

    ``method="formula"`` adds the Z-dependent multiplication operator to L_n;
    ``method="divide"`` conjugates directly.  The two must agree.
    """
    if method == "divide":
        return apply_L(n, w, Z * phi) * Z.monomial_inverse()
    if method != "formula":
        raise ValueError("method must be 'formula' or 'divide'")
    vs = phi.vs
    out = apply_L(n, w, phi)
    if n > 1:
        return out
    dm = _coefficients(vs).point_vector(n)
    extra = []
    for name, _ in w.deltas:
        lz = log_derivative(Z, name)
        if lz.is_zero():
            continue
        extra.append(lz * vs.poly(_horner_in(vs, vs.point(name), dm)))
    if not extra:
        return out
    return out + Element.sum(vs, extra) * phi


def q_poly(n: int, vs: VariableSet, point: str) -> Element:
    """q_n(x; f) = -2 [u^{n-2}] f'(u)^2 / (f(u) - x)^2, a polynomial of degree -n (zero for n > 0)."""
    if n > 0:
        return vs.zero()
    cm = _coefficients(vs).multiplier(n)
    return vs.poly(_horner_in(vs, vs.point(point), cm, range(1, len(cm) + 1)), -2)
