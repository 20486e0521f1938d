"""Expansions at infinity of a hydrodynamically normalized map f(z) = z + sum f_{-k} z^{1-k}."""

from __future__ import annotations

from functools import lru_cache
from typing import Any, Sequence

import flint

from ..errors import WindowError
from .series import LaurentSeries, inverse_power_large_f


class MapSeries:
    """f(z) = z + f_{-2} z^{-1} + ... + f_{-D} z^{1-D} with coefficients in a caller ring.

    ``coeffs[k]`` is the value of f_{-k} for k = 2..D.  Everything beyond
    f_{-D} is unknown, so f itself is guaranteed down to z**(1-D).
    """

    def __init__(self, coeffs: dict[int, Any], depth: int, zero: Any = 0):
        if depth < 2:
            raise ValueError("depth must be at least 2")
        self.depth = depth
        self.zero = zero
        self.one = zero + 1
        self.values = {k: coeffs.get(k, zero) for k in range(2, depth + 1)}
        self._powers: dict[int, LaurentSeries] = {}
        self._f = LaurentSeries(
            {1: self.one, **{1 - k: v for k, v in self.values.items()}}, hi=1, lo=1 - depth, zero=zero
        )

    @classmethod
    def symbolic(cls, depth: int, ctx=None, prefix: str = "f") -> "MapSeries":
        """Generic map whose coefficients are the generators of a flint polynomial ring."""
        if ctx is None:
            ctx = flint.fmpq_mpoly_ctx.get(tuple(f"{prefix}{k}" for k in range(2, depth + 1)), "lex")
        gens = {k: ctx.gen(ctx.variable_to_index(f"{prefix}{k}")) for k in range(2, depth + 1)}
        return cls(gens, depth, ctx.from_dict({}))

    def series(self) -> LaurentSeries:
        return self._f

    def derivative(self) -> LaurentSeries:
        return self._f.derivative()

    def power(self, n: int, floor: int | None = None) -> LaurentSeries:
        """f(z)**n, guaranteed down to z**(n - depth) (or ``floor`` if higher)."""
        natural = n - self.depth
        if floor is None or floor < natural:
            floor = natural
        key = n
        cached = self._powers.get(key)
        if cached is not None and (cached.lo is None or cached.lo <= floor):
            return cached.truncate(floor)
        if n == 0:
            result = LaurentSeries({0: self.one}, zero=self.zero)
        elif n > 0:
            result = self._f.power(n, floor=natural)
        else:
            result = self._f.power(n, floor=natural)
        self._powers[key] = result
        return result.truncate(floor)


def series_power(f: MapSeries, n: int, window: tuple[int, int] | None = None) -> LaurentSeries:
    """f(z)**n restricted to ``window = (lo, hi)``; errors if the depth cannot support ``lo``."""
    if window is None:
        return f.power(n)
    lo, hi = window
    if hi > n:
        hi = n
    if lo < n - f.depth:
        raise WindowError(f"f^{n} is only known down to z^{n - f.depth} at depth {f.depth}")
    s = f.power(n, floor=lo)
    return LaurentSeries({k: v for k, v in s.coeffs.items() if lo <= k <= hi}, hi=s.hi, lo=lo, zero=s.zero)


def schwarzian(f: MapSeries, window_low: int | None = None) -> LaurentSeries:
    """Sf = f'''/f' - (3/2) (f''/f')**2."""
    d1 = f.derivative()
    d2 = d1.derivative()
    d3 = d2.derivative()
    low = -(f.depth + 2)
    if window_low is not None:
        if window_low < low:
            raise WindowError(f"Schwarzian known only down to z^{low} at depth {f.depth}")
        low = window_low
    inv = d1.inverse()
    a = d3.mul(inv, floor=low)
    b = d2.mul(inv, floor=low + 1)
    s = a - b.mul(b, floor=low).map(lambda v: 3 * v / 2)
    return s.truncate(low)


def residue(s: LaurentSeries):
    return s.residue()


def expand_inverse_power(f: MapSeries, x: Any, p: int, floor: int) -> LaurentSeries:
    """(1/(f(z) - x)**p) expanded where |f(z)| > |x|, down to z**floor."""
    if floor < -p - (f.depth - 1):
        raise WindowError(f"1/(f-x)^{p} known only down to z^{-p - (f.depth - 1)} at depth {f.depth}")
    return inverse_power_large_f(f.series(), x, p, floor)
