"""Residuals of the transport identities behind the drift-operator commutators.

Each identity has the shape  sum_m p_m(r) d/df_m (X) = Y, where
p_m(r) = Res_v v^{-2-m} 1/(f(v) - r) and X, Y are expansions at infinity in
one or two variables.  ``transport_identity_residual`` returns X-side minus
Y-side as a series; it vanishes on its guaranteed window.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

import flint

from .mapseries import MapSeries, expand_inverse_power, schwarzian
from .series import LaurentSeries

CASES = ("A1a", "A1b", "A1c", "A2")


def _ring(depth: int):
    names = ("r", "s") + tuple(f"f{k}" for k in range(2, depth + 1))
    return flint.fmpq_mpoly_ctx.get(names, "lex")


def transport_coefficients(f: MapSeries, r: Any) -> dict[int, Any]:
    """p_m(r) for m = -2..-depth, read off as residues of the expansion of 1/(f(v) - r)."""
    floor = 1 - f.depth
    e = expand_inverse_power(f, r, 1, floor)
    return {m: e.coefficient(1 + m) for m in range(-2, -f.depth - 1, -1)}


def _transport(series: LaurentSeries, p: dict[int, Any], ctx) -> LaurentSeries:
    """sum_m p_m d/df_m applied coefficientwise (recursing into nested series)."""

    def apply(c):
        if isinstance(c, LaurentSeries):
            return _transport(c, p, ctx)
        out = ctx.from_dict({})
        for m, pm in p.items():
            out += pm * c.derivative(ctx.variable_to_index(f"f{-m}"))
        return out

    return series.map(apply)


def _lift(c, zero):
    return c if isinstance(c, LaurentSeries) else LaurentSeries({0: c}, zero=zero)


def transport_identity_residual(
    case: str,
    depth: int = 8,
    p: int = 1,
    r: Any = None,
    s: Any = None,
    floor: int | None = None,
    identity_map: bool = False,
    sides: bool = False,
):
    """LHS - RHS of one of the transport identities.

    ``case``: ``A1a`` (1/(f(w)-s)^p), ``A1b`` (f'(w)^2/(f(w)-s)^p),
    ``A1c`` (f'(z)^2/(f(w)-f(z))^p, a series in w with z-series
    coefficients) or ``A2`` (Schwarzian).  ``r`` and ``s`` default to ring
    symbols; pass rationals for randomized numeric instances.
    ``identity_map`` sets every f_m to zero after the computation, which
    reduces each identity to rational calculus.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; choose from {CASES}")
    if depth < 6:
        raise ValueError("truncation depth must be at least 6")
    ctx = _ring(depth)
    zero = ctx.from_dict({})
    rv = ctx.gen(0) if r is None else zero + _q(r)
    sv = ctx.gen(1) if s is None else zero + _q(s)
    f = MapSeries.symbolic(depth, ctx)
    pm = transport_coefficients(f, rv)
    fp = f.derivative()

    def inv(x, k):
        # 1/(f - x)^k at the full depth the truncation supports
        return expand_inverse_power(f, x, k, -k - depth + 1)

    if case == "A1a":
        lo = -p - depth + 1 if floor is None else floor
        lhs = _transport(expand_inverse_power(f, sv, p, lo), pm, ctx)
        rhs = inv(rv, 1).mul(inv(sv, p + 1), floor=lo).scale(-p)
    elif case == "A1b":
        lo = -p - depth + 1 if floor is None else floor
        fp2 = fp.mul(fp)
        lhs = _transport(fp2.mul(expand_inverse_power(f, sv, p, lo), floor=lo), pm, ctx)
        t1 = inv(rv, 1).mul(inv(sv, p + 1), floor=lo).scale(-p)
        t2 = inv(rv, 2).mul(inv(sv, p), floor=lo).scale(-2)
        rhs = fp2.mul(t1 + t2, floor=lo)
    elif case == "A1c":
        lo = -p - 3 if floor is None else floor
        fz = f.series()
        fpz2 = fp.mul(fp)
        core = expand_inverse_power(f, fz, p, lo).map(lambda c: _lift(c, zero))
        lhs = _transport(core.map(lambda c: c.mul(fpz2)), pm, ctx)
        cz1 = inv(rv, 1)
        cz2 = inv(rv, 2)
        aw = inv(rv, 1)
        first = aw.mul(core, floor=lo).map(lambda c: _lift(c, zero).mul(cz1.mul(fpz2)).scale(p))
        second = core.map(lambda c: c.mul(cz2.mul(fpz2)).scale(-2))
        rhs = first + second
    else:
        lo = -depth - 2 if floor is None else floor
        lhs = _transport(schwarzian(f, lo), pm, ctx)
        rhs = fp.mul(fp).mul(inv(rv, 4), floor=lo).scale(-6)
    if sides:
        return lhs, rhs
    res = lhs - rhs

    if identity_map:
        at_identity = lambda c: _at_identity(c, ctx, depth)
        res = res.map(at_identity)
    return res


def _at_identity(c, ctx, depth):
    if isinstance(c, LaurentSeries):
        return c.map(lambda v: _at_identity(v, ctx, depth))
    keep = {}
    for exps, coeff in c.to_dict().items():
        if all(e == 0 for e in exps[2:]):
            keep[exps] = coeff
    return ctx.from_dict(keep)


def _q(v) -> flint.fmpq:
    fr = Fraction(v)
    return flint.fmpq(fr.numerator, fr.denominator)


def checked_coefficients(side: LaurentSeries) -> int:
    """Number of guaranteed, nonzero coefficients of one side (nested series: summed)."""
    total = 0
    for c in side.coeffs.values():
        if isinstance(c, LaurentSeries):
            total += checked_coefficients(c)
        else:
            total += 1
    return total


lemma_identity_residual = transport_identity_residual
