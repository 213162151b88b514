from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conjcert.field import zeta
from conjcert.linalg import (
    LinalgError,
    Matrix,
    finite_order_spectrum,
    intersect_spans,
    inverse,
    joint_eigenspace,
    kernel,
    rank,
    rref,
    same_span,
    solve,
    span_rank,
)

small = st.integers(-4, 4).map(Fraction)


@st.composite
def matrices(draw, rows=None, cols=None):
    r = rows or draw(st.integers(1, 5))
    c = cols or draw(st.integers(1, 5))
    return Matrix([[draw(small) for _ in range(c)] for _ in range(r)], c)


def to_sympy(M):
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in M.rows])


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_and_rref_match_sympy(M):
    R, piv = rref(M)
    SR, spiv = to_sympy(M).rref()
    assert list(piv) == list(spiv)
    assert [list(r) for r in R.rows] == [[x for x in SR.row(i)] for i in range(len(spiv))]
    assert rank(M) == to_sympy(M).rank()


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_kernel_vectors_are_killed(M):
    K = kernel(M)
    assert len(K) == M.ncols - rank(M)
    for v in K:
        assert all(x == 0 for x in M.apply(v))


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4))
def test_inverse_or_singular(M):
    if rank(M) < 4:
        with pytest.raises(LinalgError):
            inverse(M)
    else:
        assert (inverse(M) @ M).is_identity()


@settings(max_examples=60, deadline=None)
@given(matrices(4, 3), st.lists(small, min_size=3, max_size=3))
def test_solve_consistent_systems(M, x):
    b = M.apply(x)
    y = solve(M, b)
    assert y is not None and M.apply(y) == b


def test_solve_inconsistent_returns_none():
    M = Matrix([[1, 0], [1, 0]])
    assert solve(M, [1, 2]) is None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=3),
       st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=3))
def test_intersection_dimension_formula(a, b):
    inter = intersect_spans(a, b, 4)
    assert len(inter) == span_rank(a, 4) + span_rank(b, 4) - span_rank(a + b, 4)
    for v in inter:
        assert span_rank(a + [v], 4) == span_rank(a, 4)
        assert span_rank(b + [v], 4) == span_rank(b, 4)


def test_same_span_ignores_basis_choice():
    assert same_span([(1, 1, 0), (0, 1, 1)], [(1, 2, 1), (1, 0, -1)], 3)
    assert not same_span([(1, 0, 0)], [(0, 1, 0)], 3)


@pytest.mark.parametrize("m", [3, 4, 5, 7])
def test_cyclic_permutation_spectrum_is_regular(m):
    P = Matrix([[1 if (i - j) % m == 1 else 0 for j in range(m)] for i in range(m)])
    assert finite_order_spectrum(P, m) == {k: 1 for k in range(m)}


def test_spectrum_rejects_wrong_order():
    P = Matrix([[0, 1], [1, 0]])
    with pytest.raises(LinalgError):
        finite_order_spectrum(P, 3)


def test_joint_eigenspace_over_cyclotomics():
    i = zeta(4)
    A = Matrix([[0, 1], [-1, 0]])
    B = Matrix([[-1, 0], [0, -1]])
    E = joint_eigenspace([A, B], [i, -1])
    assert len(E) == 1
    v = E[0]
    assert A.apply(v) == tuple(i * x for x in v)
