from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from entcoh.linalg import Matrix, RowEchelon, block_matrix, image, kernel, quotient_dim, rank, solve

entries = st.integers(-4, 4)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    data = [[draw(entries) for _ in range(c)] for _ in range(r)]
    return Matrix.from_dense(data), data


@given(matrices())
def test_rank_matches_sympy(mdata):
    m, data = mdata
    assert rank(m) == sympy.Matrix(data).rank()


@given(matrices())
def test_rank_nullity(mdata):
    m, _ = mdata
    assert rank(m) + kernel(m).dim == m.ncols


@given(matrices())
def test_kernel_vectors_are_annihilated(mdata):
    m, _ = mdata
    for v in kernel(m).basis:
        assert m.apply(v) == {}


@given(matrices(), st.lists(entries, min_size=6, max_size=6))
def test_solve_consistent_systems(mdata, xs):
    m, _ = mdata
    x = {i: Fraction(v) for i, v in enumerate(xs[: m.ncols]) if v}
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None
    assert m.apply(sol) == b


def test_solve_detects_inconsistency():
    m = Matrix.from_dense([[1, 1], [2, 2]])
    assert solve(m, {0: Fraction(1), 1: Fraction(3)}) is None


def test_exact_fractions_survive():
    m = Matrix.from_dense([[Fraction(1, 3), Fraction(2, 7)], [Fraction(5, 11), Fraction(1, 13)]])
    sol = solve(m, {0: Fraction(1)})
    assert m.apply(sol) == {0: Fraction(1)}
    assert all(isinstance(x, Fraction) for x in sol.values())


@given(matrices(4, 4), matrices(4, 4))
def test_matmul_matches_dense(a, b):
    (ma, da), (mb, db) = a, b
    if ma.ncols != mb.nrows:
        return
    expected = (sympy.Matrix(da) * sympy.Matrix(db)).tolist()
    assert (ma @ mb).to_dense() == [[Fraction(int(x)) for x in row] for row in expected]


def test_block_matrix_layout():
    a = Matrix.from_dense([[1, 2]])
    b = Matrix.from_dense([[3], [4]])
    m = block_matrix([1, 2], [2, 1], {(0, 0): a, (1, 1): b})
    assert m.to_dense() == [[1, 2, 0], [0, 0, 3], [0, 0, 4]]


def test_block_matrix_rejects_wrong_shape():
    with pytest.raises(Exception):
        block_matrix([1], [1], {(0, 0): Matrix.from_dense([[1, 2]])})


def test_row_echelon_membership():
    ech = RowEchelon(3)
    assert ech.add({0: Fraction(1), 1: Fraction(1)})
    assert not ech.add({0: Fraction(2), 1: Fraction(2)})
    assert ech.contains({0: Fraction(-3), 1: Fraction(-3)})
    assert not ech.contains({2: Fraction(1)})
    assert ech.rank == 1


def test_quotient_dimension():
    m = Matrix.from_dense([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert quotient_dim(kernel(m), image(Matrix.from_dense([[0], [1], [0]]))) == 1
