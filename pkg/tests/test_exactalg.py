"""Exact linear algebra: ranks, kernels, certified modular primitives."""

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from syzygies.errors import MalformedInputError
from syzygies.exactalg import (QQ, FpElement, Matrix, PrimeField, SpanSolver,
                               certified_kernel_selection,
                               certified_span_selection, cokernel_dim,
                               kernel_basis, kernel_columns_certified, rank)


def dense(rows, field=QQ):
    nr, nc = len(rows), len(rows[0]) if rows else 0
    return Matrix.from_triplets(nr, nc, field,
                                [(r, c, v) for r, row in enumerate(rows)
                                 for c, v in enumerate(row)])


def test_rank_empty_matrix():
    assert rank(Matrix(0, 0, QQ)) == 0


def test_rank_identity():
    assert rank(Matrix.identity(5, QQ)) == 5


def test_rank_proportional_rows():
    assert rank(dense([[1, 2, 3], [2, 4, 6]])) == 1


def test_kernel_identity_injective():
    assert kernel_basis(Matrix.identity(3, QQ)).ncols == 0


def test_kernel_zero_matrix_full():
    k = kernel_basis(Matrix(2, 2, QQ))
    assert k.ncols == 2


def test_kernel_one_relation():
    k = kernel_basis(dense([[1, 1]]))
    assert k.ncols == 1
    col = k.column(0)
    assert col[0] == -col[1]


def test_cokernel_identity():
    assert cokernel_dim(Matrix.identity(4, QQ)) == 0


def test_cokernel_zero_3x5():
    assert cokernel_dim(Matrix(3, 5, QQ)) == 3


def test_mixed_field_entries_rejected():
    with pytest.raises(MalformedInputError):
        Matrix.from_triplets(1, 1, QQ, [(0, 0, FpElement(3, 7))])
    with pytest.raises(MalformedInputError):
        Matrix.from_triplets(1, 1, PrimeField(7), [(0, 0, FpElement(3, 11))])


def test_prime_field_validation():
    with pytest.raises(MalformedInputError):
        PrimeField(15)
    f = PrimeField(7)
    assert f.coerce(mpq(1, 2)) == 4  # 1/2 = 4 mod 7
    with pytest.raises(MalformedInputError):
        f.coerce(mpq(1, 7))


def random_matrix(seed, nr, nc, field=QQ, density=0.6):
    rng = random.Random(seed)
    trip = []
    for r in range(nr):
        for c in range(nc):
            if rng.random() < density:
                trip.append((r, c, rng.randint(-9, 9)))
    return Matrix.from_triplets(nr, nc, field, trip)


@given(st.integers(0, 10_000), st.integers(1, 7), st.integers(1, 7))
@settings(max_examples=40, deadline=None)
def test_rank_equals_rank_of_transpose(seed, nr, nc):
    m = random_matrix(seed, nr, nc)
    assert rank(m) == rank(m.transpose())


@given(st.integers(0, 10_000), st.integers(1, 7), st.integers(1, 7))
@settings(max_examples=40, deadline=None)
def test_kernel_dimension_formula(seed, nr, nc):
    m = random_matrix(seed, nr, nc)
    k = kernel_basis(m)
    assert k.ncols + rank(m) == m.ncols
    # every column really lies in the kernel
    rows = m.rows()
    for j in range(k.ncols):
        col = k.column(j)
        for row in rows:
            assert sum((row.get(c, mpq(0)) * v for c, v in col.items()),
                       mpq(0)) == 0


@given(st.integers(0, 10_000), st.integers(1, 8), st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_modular_rank_bounded_by_rational(seed, nr, nc):
    m = random_matrix(seed, nr, nc)
    mp = Matrix.from_triplets(nr, nc, PrimeField(32003),
                              [(r, c, int(v)) for (r, c), v in m.entries.items()])
    assert rank(mp) <= rank(m)


def test_dense_modp_rank_matches_sparse():
    f = PrimeField(32003)
    m = random_matrix(77, 40, 55, field=f, density=0.3)
    by_dense = rank(m)  # size triggers the numpy path
    by_sparse = len(__import__("syzygies.exactalg", fromlist=["triangularize"])
                    .triangularize(m.rows(), f))
    assert by_dense == by_sparse


@given(st.integers(0, 5_000))
@settings(max_examples=25, deadline=None)
def test_certified_kernel_matches_exact(seed):
    m = random_matrix(seed, 6, 9, density=0.7)
    exact_dim = kernel_basis(m).ncols
    vecs = kernel_columns_certified(m)
    assert len(vecs) == exact_dim


def test_certified_kernel_selection_counts():
    # kernel of [[1,1,1]] is 2-dimensional; giving one kernel vector as
    # "old" leaves exactly one new generator
    cols = [{0: mpq(1)}, {0: mpq(1)}, {0: mpq(1)}]
    old = [{0: mpq(1), 1: mpq(-1)}]
    n, vecs = certified_kernel_selection(cols, 1, 2, old, QQ)
    assert n == 1 and len(vecs) == 1
    n2, vecs2 = certified_kernel_selection(cols, 1, 2, old, QQ, lift=False)
    assert n2 == 1 and vecs2 is None


def test_certified_span_selection_basic():
    old = [{0: mpq(1)}]
    cands = [{0: mpq(2)}, {1: mpq(1)}, {0: mpq(1), 1: mpq(1)}]
    sel = certified_span_selection(2, QQ, old, cands, 2)
    assert sel == [1]


def test_span_solver_coordinates():
    # columns (1,1) and (0,1)
    solver = SpanSolver(dense([[1, 0], [1, 1]]))
    coords = solver.coordinates({0: mpq(3), 1: mpq(5)})
    assert coords[0] == 3 and coords.get(1, 0) == 2
    with pytest.raises(MalformedInputError):
        SpanSolver(dense([[1], [0]])).coordinates({1: mpq(1)})
