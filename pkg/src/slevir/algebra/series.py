"""Truncated Laurent series at infinity with explicit guaranteed windows.

A :class:`LaurentSeries` stores the coefficients of z**k for k in a window
``[lo, hi]``.  Coefficients above ``hi`` are exactly zero; coefficients below
``lo`` are unknown and reading them raises :class:`WindowError`.  ``lo=None``
marks a series whose every coefficient is known (a Laurent polynomial).

The coefficient ring is left to the caller: anything closed under ``+``, ``-``
and ``*`` works, including flint multivariate polynomials, ScalarK values, and
other LaurentSeries (used for two-variable expansions).
"""

from __future__ import annotations

from math import comb
from typing import Any, Callable, Iterable

from ..errors import WindowError

# ``hi`` of the exact zero series.
EMPTY = -(1 << 40)


def _is_zero(c) -> bool:
    if isinstance(c, LaurentSeries):
        return c.is_exact_zero()
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


def _max_lo(*los):
    known = [x for x in los if x is not None]
    return max(known) if known else None


class LaurentSeries:
    __slots__ = ("coeffs", "hi", "lo", "zero")

    def __init__(self, coeffs: dict[int, Any], hi: int | None = None, lo: int | None = None, zero: Any = 0):
        self.zero = zero
        self.lo = lo
        clean = {k: v for k, v in coeffs.items() if (lo is None or k >= lo) and not _is_zero(v)}
        if clean:
            # every exponent >= lo is known, so the top nonzero one is exact
            top = max(clean)
            if hi is not None and top > hi:
                raise ValueError("coefficient above declared top exponent")
            hi = top
        elif lo is None:
            hi = EMPTY
        elif hi is None or hi >= lo:
            hi = lo - 1
        self.coeffs = clean
        self.hi = hi

    # constructors --------------------------------------------------------
    @classmethod
    def monomial(cls, k: int, coeff: Any = 1, zero: Any = 0) -> "LaurentSeries":
        return cls({k: coeff}, zero=zero)

    @classmethod
    def constant(cls, c: Any, zero: Any = 0) -> "LaurentSeries":
        return cls({0: c}, zero=zero)

    def _like(self, coeffs, hi=None, lo=None) -> "LaurentSeries":
        return LaurentSeries(coeffs, hi, lo, self.zero)

    # access ----------------------------------------------------------------
    @property
    def one(self):
        return self.zero + 1

    def is_exact(self) -> bool:
        return self.lo is None

    def is_exact_zero(self) -> bool:
        return self.lo is None and not self.coeffs

    def coefficient(self, k: int):
        if self.lo is not None and k < self.lo:
            raise WindowError(f"coefficient of z^{k} requested; series known only down to z^{self.lo}")
        return self.coeffs.get(k, self.zero)

    def residue(self):
        return self.coefficient(-1)

    def window(self) -> tuple[int | None, int]:
        return self.lo, self.hi

    def items(self) -> Iterable[tuple[int, Any]]:
        return sorted(self.coeffs.items(), reverse=True)

    def known_exponents(self, floor: int) -> range:
        """Exponents with guaranteed coefficients, not below ``floor``."""
        lo = floor if self.lo is None else max(self.lo, floor)
        return range(self.hi, lo - 1, -1)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return other
        return LaurentSeries({0: other}, zero=self.zero)

    def __add__(self, other):
        o = self._coerce(other)
        lo = _max_lo(self.lo, o.lo)
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return self._like(out, max(self.hi, o.hi), lo)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -v for k, v in self.coeffs.items()}, self.hi, self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "LaurentSeries":
        return self._like({k: c * v for k, v in self.coeffs.items()}, self.hi, self.lo)

    def mul(self, other: "LaurentSeries", floor: int | None = None) -> "LaurentSeries":
        """Product; ``floor`` discards exponents below it (raising the window)."""
        o = self._coerce(other)
        hi = self.hi + o.hi
        cand = []
        if self.lo is not None:
            cand.append(self.lo + o.hi)
        if o.lo is not None:
            cand.append(o.lo + self.hi)
        lo = max(cand) if cand else None
        if floor is not None:
            lo = floor if lo is None else max(lo, floor)
        out: dict[int, Any] = {}
        for i, a in self.coeffs.items():
            for j, b in o.coeffs.items():
                k = i + j
                if lo is not None and k < lo:
                    continue
                p = a * b
                out[k] = out[k] + p if k in out else p
        return self._like(out, hi, lo)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def shift(self, m: int) -> "LaurentSeries":
        """Multiply by z**m."""
        lo = None if self.lo is None else self.lo + m
        return self._like({k + m: v for k, v in self.coeffs.items()}, self.hi + m, lo)

    def derivative(self) -> "LaurentSeries":
        lo = None if self.lo is None else self.lo - 1
        out = {k - 1: k * v for k, v in self.coeffs.items() if k != 0}
        return self._like(out, self.hi - 1, lo)

    def map(self, fn: Callable[[Any], Any], zero: Any | None = None) -> "LaurentSeries":
        """Apply ``fn`` to each coefficient (e.g. a partial derivative in the f's)."""
        z = self.zero if zero is None else zero
        return LaurentSeries({k: fn(v) for k, v in self.coeffs.items()}, self.hi, self.lo, z)

    def truncate(self, floor: int) -> "LaurentSeries":
        lo = floor if self.lo is None else max(self.lo, floor)
        return self._like({k: v for k, v in self.coeffs.items() if k >= lo}, self.hi, lo)

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero series has no leading term")
        top = max(self.coeffs)
        if top != self.hi:
            raise ValueError("leading exponent not certified")
        return top, self.coeffs[top]

    def inverse(self, floor: int | None = None, lead_inverse: Any = None) -> "LaurentSeries":
        """Multiplicative inverse; the leading coefficient must be a unit.

        For an exact input the result is infinite and ``floor`` must be given.
        """
        h, c = self.leading()
        inv_c = lead_inverse if lead_inverse is not None else _unit_inverse(c, self.one)
        depth = None if self.lo is None else h - self.lo
        lo = None if depth is None else -h - depth
        if floor is not None:
            lo = floor if lo is None else max(lo, floor)
        if lo is None:
            raise WindowError("inverse of an exact series needs an explicit floor")
        n_terms = -h - lo + 1
        rel = [self.coeffs.get(h - i, self.zero) for i in range(n_terms)]
        b = [inv_c]
        for j in range(1, n_terms):
            acc = self.zero
            for i in range(1, j + 1):
                if not _is_zero(rel[i]):
                    acc = acc + rel[i] * b[j - i]
            b.append(-(inv_c * acc))
        return self._like({-h - j: b[j] for j in range(n_terms)}, -h, lo)

    def __pow__(self, n: int):
        return self.power(n)

    def power(self, n: int, floor: int | None = None) -> "LaurentSeries":
        """n-th power; with ``floor`` only exponents >= floor are produced."""
        if n == 0:
            return LaurentSeries({0: self.one}, zero=self.zero)
        if n < 0:
            k = -n
            inv_floor = None if floor is None else floor + (k - 1) * (-self.hi)
            return self.inverse(floor=inv_floor).power(k, floor)
        result = self
        if floor is not None:
            result = result.truncate(floor - (n - 1) * self.hi)
        for k in range(2, n + 1):
            step_floor = None if floor is None else floor - (n - k) * self.hi
            result = result.mul(self, step_floor)
        return result

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equality on the common guaranteed window."""
        lo = _max_lo(self.lo, other.lo)
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            if lo is not None and k < lo:
                continue
            if not _is_zero(self.coeffs.get(k, self.zero) - other.coeffs.get(k, other.zero)):
                return False
        return True

    def is_zero_on_window(self) -> bool:
        return is_zero_on_window(self)

    def __repr__(self):
        terms = " + ".join(f"({v})*z^{k}" for k, v in self.items()) or "0"
        tail = "" if self.lo is None else f" + O(z^{self.lo - 1})"
        return f"LaurentSeries[{terms}{tail}]"


def _unit_inverse(c, one):
    if c == one:
        return one
    if c == -one:
        return -one
    try:
        return one / c
    except Exception as exc:  # noqa: BLE001
        raise ValueError(f"leading coefficient {c} is not invertible") from exc


def inverse_power_large_f(F: LaurentSeries, x: Any, p: int, floor: int) -> LaurentSeries:
    """Expansion of 1/(F - x)**p in the region |F| > |x|, kept down to z**floor.

    ``F`` must have leading term z (as f(z) does); the result is
    sum_m C(m+p-1, p-1) x**m F**(-p-m).  ``x`` may itself be a series in
    another variable, which yields a two-variable expansion.
    """
    if p < 1:
        raise ValueError("p must be positive")
    h, lead = F.leading()
    if h != 1 or lead != F.one:
        raise ValueError("F must start with z")
    total = LaurentSeries({}, hi=-p, lo=floor, zero=F.zero)
    if -p < floor:
        return total
    inv = F.inverse(floor=floor + p - 1)
    power = inv.power(p, floor=floor)
    xm = None
    for m in range(0, -p - floor + 1):
        if m:
            power = power.mul(inv, floor=floor)
            xm = x if xm is None else xm * x
            total = total + power.scale(comb(m + p - 1, p - 1) * xm)
        else:
            total = total + power
    if total.lo is not None and total.lo > floor:
        raise WindowError(f"depth too small: expansion known only down to z^{total.lo}")
    return total


def is_zero_on_window(s: LaurentSeries) -> bool:
    """True when every guaranteed coefficient vanishes (recursing into nested series)."""
    for v in s.coeffs.values():
        if isinstance(v, LaurentSeries):
            if not is_zero_on_window(v):
                return False
        elif not _is_zero(v):
            return False
    return True


def count_known(s: LaurentSeries, floor: int) -> int:
    return len(s.known_exponents(floor))
