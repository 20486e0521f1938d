"""Exact scalars in the rational function field Q(t), with kappa = t**2.

Every weight, charge and central charge used in the package is a rational
function of t = sqrt(kappa), so a single field carries both the kappa-dependent
conformal data and the Coulomb-gas charges 1/sqrt(kappa).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational

import flint

from ..errors import SpecializationError

_Poly = flint.fmpq_poly


def _as_poly(value) -> flint.fmpq_poly:
    if isinstance(value, flint.fmpq_poly):
        return value
    if isinstance(value, Fraction):
        return _Poly([flint.fmpq(value.numerator, value.denominator)])
    if isinstance(value, (int, flint.fmpz, flint.fmpq)):
        return _Poly([value])
    if isinstance(value, (list, tuple)):
        return _Poly([_as_fmpq(c) for c in value])
    raise TypeError(f"cannot build a polynomial in t from {type(value).__name__}")


def _as_fmpq(value) -> flint.fmpq:
    if isinstance(value, flint.fmpq):
        return value
    if isinstance(value, Fraction):
        return flint.fmpq(value.numerator, value.denominator)
    if isinstance(value, (int, flint.fmpz)):
        return flint.fmpq(value)
    if isinstance(value, Rational):
        return flint.fmpq(value.numerator, value.denominator)
    raise TypeError(f"not an exact rational: {value!r}")


def _to_fraction(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class ScalarK:
    """Element of Q(t) kept as num/den with gcd 1 and a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, *, _reduced: bool = False):
        if isinstance(num, ScalarK):
            if den != 1:
                raise TypeError("use division to combine ScalarK values")
            self.num, self.den = num.num, num.den
            return
        n = _as_poly(num)
        d = _as_poly(den)
        if not _reduced:
            if d.is_zero():
                raise ZeroDivisionError("zero denominator in Q(t)")
            if n.is_zero():
                d = _Poly([1])
            else:
                g = n.gcd(d)
                if not g.is_one():
                    n, d = n // g, d // g
                lc = d[d.degree()]
                if lc != 1:
                    n, d = n / lc, d / lc
        self.num, self.den = n, d

    # construction -------------------------------------------------------
    @classmethod
    def coerce(cls, value) -> "ScalarK":
        if isinstance(value, ScalarK):
            return value
        return cls(value)

    @classmethod
    def t(cls) -> "ScalarK":
        return cls(_Poly([0, 1]), _reduced=True)

    @classmethod
    def kappa(cls) -> "ScalarK":
        return cls(_Poly([0, 0, 1]), _reduced=True)

    @classmethod
    def from_kappa_fraction(cls, value) -> "ScalarK":
        """A rational number viewed as a constant (for a specialized kappa)."""
        return cls(_as_poly(Fraction(value)))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return ScalarK(self.num + o.num, self.den)
        return ScalarK(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return ScalarK(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return ScalarK(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero in Q(t)")
        return ScalarK(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are defined in Q(t)")
        if k < 0:
            return (ScalarK(1) / self) ** (-k)
        return ScalarK(self.num**k, self.den**k, _reduced=True)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((tuple(self.num.coeffs()), tuple(self.den.coeffs())))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} depends on t")
        return _to_fraction(self.num[0])

    def is_integer(self) -> bool:
        return self.is_constant() and self.constant().denominator == 1

    def parity(self) -> int | None:
        """+1 if even in t, -1 if odd, None otherwise (0 counts as even)."""
        if self.is_zero():
            return 1
        pn, pd = _poly_parity(self.num), _poly_parity(self.den)
        if pn is None or pd is None:
            return None
        return pn * pd

    # specialization ---------------------------------------------------
    def at_t(self, t0) -> Fraction:
        q = _as_fmpq(Fraction(t0))
        d = self.den(q)
        if d == 0:
            raise SpecializationError(f"{self} has a pole at t = {t0}")
        return _to_fraction(self.num(q) / d)

    def at_kappa(self, kappa0) -> Fraction:
        """Exact value at kappa = kappa0 (t = +sqrt(kappa0)).

        When sqrt(kappa0) is irrational the value is rational only for even
        functions of t, which covers every quantity built from kappa alone.
        """
        k = Fraction(kappa0)
        if k <= 0:
            raise SpecializationError("kappa must be positive")
        root = _rational_sqrt(k)
        if root is not None:
            return self.at_t(root)
        if self.parity() != 1:
            raise SpecializationError(
                f"{self} is not a function of kappa alone; sqrt({k}) is irrational"
            )
        n, d = _even_part_at(self.num, k), _even_part_at(self.den, k)
        if d == 0:
            raise SpecializationError(f"{self} has a pole at kappa = {k}")
        return n / d

    def evalf(self, t0: float) -> float:
        d = _horner(self.den, t0)
        if d == 0.0:
            raise SpecializationError(f"{self} has a pole at t = {t0}")
        return _horner(self.num, t0) / d

    def evalf_kappa(self, kappa0: float) -> float:
        return self.evalf(math.sqrt(float(kappa0)))

    def __float__(self):
        return float(self.constant())

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        """Integer coefficient arrays (low degree first), content 1, positive leading den."""
        nc = [_to_fraction(c) for c in self.num.coeffs()] or [Fraction(0)]
        dc = [_to_fraction(c) for c in self.den.coeffs()]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in nc + dc), 1)
        ni = [int(c * lcm) for c in nc]
        di = [int(c * lcm) for c in dc]
        g = reduce(math.gcd, (abs(c) for c in ni + di if c), 0) or 1
        return {"num": [c // g for c in ni], "den": [c // g for c in di]}

    @classmethod
    def from_json(cls, data: dict) -> "ScalarK":
        return cls(_as_poly([int(c) for c in data["num"]]), _as_poly([int(c) for c in data["den"]]))

    def to_sympy(self, symbol=None):
        import sympy

        t = symbol if symbol is not None else sympy.Symbol("t", positive=True)
        n = sum(sympy.Rational(int(c.p), int(c.q)) * t**i for i, c in enumerate(self.num.coeffs()))
        d = sum(sympy.Rational(int(c.p), int(c.q)) * t**i for i, c in enumerate(self.den.coeffs()))
        return n / d

    @classmethod
    def from_sympy(cls, expr, t_symbol=None, kappa_symbol=None) -> "ScalarK":
        """Convert a sympy rational expression in t and/or kappa (kappa = t**2)."""
        import sympy

        t = t_symbol if t_symbol is not None else sympy.Symbol("t", positive=True)
        expr = sympy.sympify(expr)
        if kappa_symbol is not None:
            expr = expr.subs(kappa_symbol, t**2)
        free = expr.free_symbols - {t}
        if free:
            raise ValueError(f"unexpected symbols {free}")
        n, d = sympy.fraction(sympy.cancel(sympy.together(expr)))
        pn = sympy.Poly(n, t)
        pd = sympy.Poly(d, t)
        to_list = lambda p: [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]
        return cls(_as_poly(to_list(pn)), _as_poly(to_list(pd)))

    def __repr__(self):
        return f"ScalarK({self})"

    def __str__(self):
        ns = _poly_str(self.num)
        if self.den.is_one():
            return ns
        return f"({ns})/({_poly_str(self.den)})"


def _coerce_or_none(value):
    if isinstance(value, ScalarK):
        return value
    if isinstance(value, (int, Fraction, flint.fmpq, flint.fmpz, flint.fmpq_poly)):
        return ScalarK(value)
    return None


def _poly_parity(p: flint.fmpq_poly) -> int | None:
    coeffs = p.coeffs()
    even = all(c == 0 for c in coeffs[1::2])
    odd = all(c == 0 for c in coeffs[0::2])
    if even:
        return 1
    if odd:
        return -1
    return None


def _even_part_at(p: flint.fmpq_poly, k: Fraction) -> Fraction:
    total = Fraction(0)
    for i, c in enumerate(p.coeffs()[0::2]):
        total += _to_fraction(c) * k**i
    return total


def _rational_sqrt(k: Fraction) -> Fraction | None:
    a, b = k.numerator, k.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def _horner(p: flint.fmpq_poly, x: float) -> float:
    acc = 0.0
    for c in reversed(p.coeffs()):
        acc = acc * x + float(_to_fraction(c))
    return acc


def _poly_str(p: flint.fmpq_poly) -> str:
    return str(p).replace("x", "t") if not p.is_zero() else "0"


# common constants ------------------------------------------------------------
T = ScalarK.t()
KAPPA = ScalarK.kappa()
ONE = ScalarK(1)
ZERO = ScalarK(0)


def central_charge(kappa: ScalarK = KAPPA) -> ScalarK:
    """c(kappa) = (6 - kappa)(3 kappa - 8) / (2 kappa)."""
    return (6 - kappa) * (3 * kappa - 8) / (2 * kappa)


def h12(kappa: ScalarK = KAPPA) -> ScalarK:
    """Boundary weight (6 - kappa)/(2 kappa) of an SLE curve endpoint."""
    return (6 - kappa) / (2 * kappa)


def dual_kappa(kappa: ScalarK = KAPPA) -> ScalarK:
    return 16 / kappa


# Coulomb-gas charges, all in Q(t).
ALPHA = 1 / T
ALPHA_PLUS = T / 2
ALPHA_MINUS = -2 / T
ALPHA_ZERO = (ALPHA_PLUS + ALPHA_MINUS) / 2


def charge_weight(alpha: ScalarK, alpha0: ScalarK = ALPHA_ZERO) -> ScalarK:
    """h(alpha) = alpha^2 - 2 alpha_0 alpha."""
    return alpha * alpha - 2 * alpha0 * alpha


def parse_scalar(text: str) -> ScalarK:
    """Parse an exact expression in ``kappa`` and/or ``t`` such as ``"kappa-6"`` or ``"8/3"``."""
    import sympy

    t = sympy.Symbol("t", positive=True)
    kappa = sympy.Symbol("kappa", positive=True)
    expr = sympy.sympify(text, locals={"t": t, "kappa": kappa, "k": kappa})
    return ScalarK.from_sympy(expr, t_symbol=t, kappa_symbol=kappa)
