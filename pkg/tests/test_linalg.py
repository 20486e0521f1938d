"""Exact elimination: rank and kernel against sympy matrices."""

from fractions import Fraction

import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from slevir.algebra import KAPPA, ScalarK
from slevir.linalg import kernel, quotient_basis, rank

entries = st.integers(-3, 3)
matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(lambda c: st.lists(st.lists(entries, min_size=r, max_size=r), min_size=c, max_size=c))
)


def _cols(cols):
    return [{i: Fraction(v) for i, v in enumerate(col) if v} for col in cols]


@given(matrices)
def test_rank_matches_sympy(cols):
    M = sp.Matrix(cols).T
    assert rank(_cols(cols)) == M.rank()


@given(matrices)
def test_kernel_vectors_annihilate_and_span(cols):
    M = sp.Matrix(cols).T
    ker = kernel(_cols(cols))
    assert len(ker) == len(M.nullspace())
    for k in ker:
        assert M * sp.Matrix([sp.Rational(str(c)) for c in k]) == sp.zeros(M.rows, 1)


def test_rank_over_rational_functions():
    # columns (1, kappa) and (kappa, kappa^2) are dependent; (1, 1) is not
    cols = [{0: ScalarK(1), 1: KAPPA}, {0: KAPPA, 1: KAPPA * KAPPA}, {0: ScalarK(1), 1: ScalarK(1)}]
    assert rank(cols, ScalarK(1)) == 2
    (k,) = kernel(cols, ScalarK(1))
    assert k[1] == 1 and k[0] == -KAPPA and k[2] == 0


def test_quotient_basis():
    sub = [[1, 0, 0]]
    vecs = [[2, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]]
    assert quotient_basis(vecs, sub) == [[0, 1, 0], [0, 0, 1]]
