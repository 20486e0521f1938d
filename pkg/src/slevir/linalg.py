"""Exact Gaussian elimination over any field whose elements support + - * / and == 0.

Vectors are sparse dicts {coordinate: value}; matrices are lists of column
vectors.  Used with ScalarK (generic kappa) and Fraction (specialized kappa).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Sequence

from .funcspace import Element, _align, _min_in_class


def _nz(v) -> bool:
    return not (v == 0)


def coordinates(elements: Sequence[Element]) -> list[dict]:
    """Coefficient vectors of elements over a shared monomial basis.

    Parts of the same exponent class are re-expressed over the lowest
    prefactor exponents occurring among all elements so that coordinates
    are comparable.
    """
    from .algebra.scalar import ScalarK
    import flint

    if not elements:
        return []
    vs = elements[0].vs
    lows: dict = {}
    for e in elements:
        for key, p in e.parts.items():
            lows.setdefault(key, []).append(p.exps)
    target = {
        key: tuple(_min_in_class([ex[k] for ex in exps]) for k in range(len(vs.pairs)))
        for key, exps in lows.items()
    }
    out = []
    for e in elements:
        vec: dict = {}
        for key, p in e.parts.items():
            num = _align(vs, p, target[key])
            groups: dict[tuple, dict[int, object]] = {}
            for m, c in num.terms():
                groups.setdefault(tuple(int(k) for k in m[1:]), {})[int(m[0])] = c
            for mono, tc in groups.items():
                top = max(tc)
                coeff = ScalarK(flint.fmpq_poly([tc.get(i, 0) for i in range(top + 1)]), p.den)
                vec[(key, mono)] = coeff
        out.append(vec)
    return out


def echelon(columns: Sequence[dict], one=Fraction(1)):
    """Column echelon data: returns (pivot rows, reduced kernel basis).

    The kernel basis consists of coefficient lists c with sum_j c_j columns[j] = 0,
    one per non-pivot column, normalized with c_j = 1 at that column.
    """
    ncol = len(columns)
    # row-reduce the transpose view: process columns one by one against a pivot table
    basis: list[tuple[Hashable, dict, list]] = []  # (pivot row, reduced vector, combination)
    kernel = []
    pivots = []
    for j, col in enumerate(columns):
        vec = dict(col)
        comb = [0] * ncol
        comb[j] = one
        for prow, pvec, pcomb in basis:
            a = vec.get(prow)
            if a is None or not _nz(a):
                continue
            for r, v in pvec.items():
                nv = vec.get(r, 0) - a * v
                if _nz(nv):
                    vec[r] = nv
                else:
                    vec.pop(r, None)
            for k in range(ncol):
                if _nz(pcomb[k]):
                    comb[k] = comb[k] - a * pcomb[k]
        vec = {r: v for r, v in vec.items() if _nz(v)}
        if not vec:
            kernel.append(comb)
            continue
        prow = min(vec, key=repr)
        lead = vec[prow]
        vec = {r: v / lead for r, v in vec.items()}
        comb = [c / lead if _nz(c) else c for c in comb]
        basis.append((prow, vec, comb))
        pivots.append(j)
    return pivots, kernel


def rank(columns: Sequence[dict], one=Fraction(1)) -> int:
    return len(echelon(columns, one)[0])


def kernel(columns: Sequence[dict], one=Fraction(1)) -> list[list]:
    return echelon(columns, one)[1]


def quotient_basis(vectors: Sequence[list], sub: Sequence[list], one=Fraction(1)) -> list[list]:
    """Vectors (coefficient lists) completing a basis of span(sub) to span(sub + vectors)."""
    cols = [dict(enumerate(v)) for v in sub]
    start = rank(cols, one) if cols else 0
    out = []
    for v in vectors:
        trial = cols + [dict(enumerate(v))]
        r = rank(trial, one)
        if r > start:
            cols = trial
            start = r
            out.append(list(v))
    return out
