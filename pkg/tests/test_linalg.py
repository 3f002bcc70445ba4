"""Tests for exact linear algebra over small finite fields."""

import pytest
from hypothesis import given, settings, strategies as st

from smallbase.errors import DimensionMismatch, EmptyInput
from smallbase.gf import field_create
from smallbase.linalg import (
    AffineSolution,
    MatrixFq,
    SubspaceFq,
    algebra_closure,
    all_matrices,
    image_under,
    nullspace,
    rref,
    solve_linear,
    stabilizing_algebra,
    stabilizing_algebra_bruteforce,
    subspace_contains,
    subspace_equals,
    subspace_intersect,
    subspace_ops,
    subspace_sum,
)

F2 = field_create(2, 1)
F3 = field_create(3, 1)
F4 = field_create(2, 2)
F5 = field_create(5, 1)


# -- frozen examples ---------------------------------------------------------


def test_rref_frozen_example_f2():
    m = MatrixFq.from_rows(F2, [[1, 1, 0], [0, 1, 1]])
    red, rank, pivots = rref(m)
    assert red.row_list() == [[1, 0, 1], [0, 1, 1]]
    assert rank == 2
    assert pivots == (0, 1)


def test_solve_frozen_example_f2():
    a = MatrixFq.from_rows(F2, [[1, 1]])
    sol = solve_linear(a, [1])
    assert sol is not None
    assert sol.particular == (1, 0)
    assert sol.kernel_basis == ((1, 1),)


def test_solve_inconsistent():
    a = MatrixFq.from_rows(F3, [[1, 0], [1, 0]])
    assert solve_linear(a, [1, 2]) is None


def test_intersection_frozen_example():
    u = SubspaceFq.from_vectors(F2, 3, [(1, 0, 0), (0, 1, 0)])
    w = SubspaceFq.from_vectors(F2, 3, [(0, 1, 0), (0, 0, 1)])
    x = subspace_intersect(u, w)
    assert x.dim == 1
    assert x.basis_vectors() == [(0, 1, 0)]


def test_stabilizing_algebra_empty_input_full_algebra():
    alg = stabilizing_algebra([], field=F2, dim=2)
    assert alg.dim == 4
    assert alg.is_full


def test_stabilizing_algebra_empty_without_ambient_raises():
    with pytest.raises(EmptyInput):
        stabilizing_algebra([])


def test_stabilizing_algebra_three_lines_f3_scalars():
    lines = [
        SubspaceFq.from_vectors(F3, 2, [(1, 0)]),
        SubspaceFq.from_vectors(F3, 2, [(0, 1)]),
        SubspaceFq.from_vectors(F3, 2, [(1, 1)]),
    ]
    alg = stabilizing_algebra(lines)
    assert alg.dim == 1
    assert alg.is_scalars_only


def test_stabilizing_algebra_one_line_f2_dim3():
    lines = [SubspaceFq.from_vectors(F2, 2, [(1, 0)])]
    alg = stabilizing_algebra(lines)
    assert alg.dim == 3


def test_algebra_closure_identity_only():
    alg = algebra_closure([MatrixFq.identity(F5, 3)])
    assert alg.dim == 1
    assert alg.is_scalars_only


def test_algebra_closure_e11_and_path_full():
    # E11 together with the adjacency matrix of the 3-path generates
    # the full 9-dimensional algebra over F3
    e11 = MatrixFq.elementary(F3, 3, 0, 0)
    path = MatrixFq.from_rows(F3, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    alg = algebra_closure([e11, path])
    assert alg.dim == 9
    assert alg.is_full


def test_algebra_closure_diagonal_f5():
    d = MatrixFq.diagonal(F5, [1, 2])
    alg = algebra_closure([d])
    assert alg.dim == 2


# -- matrix basics ----------------------------------------------------------


def test_matrix_mul_identity_and_inverse():
    m = MatrixFq.from_rows(F5, [[1, 2], [3, 4]])
    i2 = MatrixFq.identity(F5, 2)
    assert m.mul(i2) == m
    inv = m.inverse()
    assert m.mul(inv) == i2
    assert inv.mul(m) == i2


def test_matrix_det_and_singular():
    m = MatrixFq.from_rows(F5, [[1, 2], [3, 4]])
    assert m.det() == (1 * 4 - 2 * 3) % 5
    s = MatrixFq.from_rows(F5, [[1, 2], [2, 4]])
    assert s.det() == 0
    with pytest.raises(ZeroDivisionError):
        s.inverse()


def test_matrix_det_f4():
    # over F4 with codes: 2 is x, 3 is x+1, x*x = x+1
    m = MatrixFq.from_rows(F4, [[2, 0], [0, 2]])
    assert m.det() == 3


def test_matrix_pow():
    m = MatrixFq.from_rows(F3, [[1, 1], [0, 1]])
    assert m.pow(3) == MatrixFq.identity(F3, 2)
    assert m.pow(0) == MatrixFq.identity(F3, 2)
    assert m.pow(-1) == m.pow(2)


def test_matrix_transpose_and_trace():
    m = MatrixFq.from_rows(F5, [[1, 2], [3, 4]])
    assert m.transpose().row_list() == [[1, 3], [2, 4]]
    assert m.trace() == 0  # 1 + 4 = 5 = 0 mod 5


def test_matrix_json_roundtrip():
    m = MatrixFq.from_rows(F4, [[0, 1], [2, 3]])
    d = m.to_json()
    assert d == {"p": 2, "e": 2, "rows": 2, "cols": 2, "entries": [0, 1, 2, 3]}
    assert MatrixFq.from_json(d) == m


def test_matrix_apply_column_convention():
    m = MatrixFq.from_rows(F5, [[0, 1], [0, 0]])
    assert m.apply((0, 1)) == (1, 0)
    assert m.apply((1, 0)) == (0, 0)


def test_shape_mismatch_raises():
    a = MatrixFq.from_rows(F2, [[1, 0]])
    b = MatrixFq.from_rows(F2, [[1, 0]])
    with pytest.raises(DimensionMismatch):
        a.mul(b)
    with pytest.raises(DimensionMismatch):
        a + MatrixFq.from_rows(F2, [[1], [0]])


def test_entrywise_frobenius_f4():
    m = MatrixFq.from_rows(F4, [[2, 3], [1, 0]])
    f = m.entrywise_frobenius()
    # frobenius swaps x and x+1 over F4
    assert f.row_list() == [[3, 2], [1, 0]]
    assert f.entrywise_frobenius() == m


# -- subspaces ---------------------------------------------------------------


def test_subspace_canonical_rref_equality():
    u1 = SubspaceFq.from_vectors(F3, 3, [(1, 1, 0), (0, 1, 1)])
    u2 = SubspaceFq.from_vectors(F3, 3, [(1, 2, 1), (2, 0, 1)])
    # same span given by different spanning sets
    assert subspace_equals(u1, u2)
    assert hash(u1) == hash(u2)
    assert u1.encode() == u2.encode()


def test_subspace_sum_and_dim_formula():
    u = SubspaceFq.from_vectors(F2, 4, [(1, 0, 0, 0), (0, 1, 0, 0)])
    w = SubspaceFq.from_vectors(F2, 4, [(0, 1, 0, 0), (0, 0, 1, 0)])
    s = subspace_sum(u, w)
    x = subspace_intersect(u, w)
    assert s.dim == 3
    assert x.dim == 1
    assert s.dim + x.dim == u.dim + w.dim


def test_subspace_contains():
    u = SubspaceFq.from_vectors(F2, 3, [(1, 0, 0), (0, 1, 0)])
    w = SubspaceFq.from_vectors(F2, 3, [(1, 1, 0)])
    assert subspace_contains(u, w)
    assert not subspace_contains(w, u)
    assert u.contains_vector((1, 1, 0))
    assert not u.contains_vector((0, 0, 1))


def test_subspace_image_under():
    u = SubspaceFq.from_vectors(F3, 2, [(1, 0)])
    g = MatrixFq.from_rows(F3, [[0, 1], [1, 0]])
    v = image_under(u, g)
    assert v.basis_vectors() == [(0, 1)]


def test_subspace_ops_dispatch():
    u = SubspaceFq.from_vectors(F2, 2, [(1, 0)])
    w = SubspaceFq.from_vectors(F2, 2, [(0, 1)])
    assert subspace_ops("sum", u, w).dim == 2
    assert subspace_ops("intersect", u, w).dim == 0
    assert subspace_ops("contains", u, w) is False
    assert subspace_ops("equals", u, u) is True
    g = MatrixFq.identity(F2, 2)
    assert subspace_ops("image_under", u, g) == u


def test_subspace_mixed_ambient_raises():
    u = SubspaceFq.from_vectors(F2, 2, [(1, 0)])
    w = SubspaceFq.from_vectors(F2, 3, [(1, 0, 0)])
    with pytest.raises(DimensionMismatch):
        subspace_sum(u, w)


def test_subspace_all_vectors():
    u = SubspaceFq.from_vectors(F3, 3, [(1, 0, 0), (0, 1, 0)])
    vecs = set(u.all_vectors())
    assert len(vecs) == 9
    assert (0, 0, 0) in vecs
    assert all(v[2] == 0 for v in vecs)


def test_subspace_json_roundtrip():
    u = SubspaceFq.from_vectors(F4, 3, [(1, 2, 0), (0, 0, 1)])
    assert SubspaceFq.from_json(u.to_json()) == u


# -- stabilizing algebra cross-checks ---------------------------------------


def _bruteforce_dim(subspaces, field, d):
    mats = stabilizing_algebra_bruteforce(subspaces, field, d)
    rows = MatrixFq(field, len(mats), d * d, [x for m in mats for x in m.entries])
    _, rank, _ = rref(rows)
    return rank, len(mats)


@pytest.mark.parametrize(
    "field,d,spans",
    [
        (F2, 2, []),
        (F2, 2, [[(1, 0)]]),
        (F2, 2, [[(1, 0)], [(0, 1)]]),
        (F3, 2, [[(1, 0)], [(0, 1)], [(1, 1)]]),
        (F2, 3, [[(1, 0, 0), (0, 1, 0)]]),
        (F2, 3, [[(1, 1, 0)], [(0, 1, 1)]]),
        (F3, 2, [[(1, 2)]]),
    ],
)
def test_stabilizing_algebra_matches_bruteforce(field, d, spans):
    subspaces = [SubspaceFq.from_vectors(field, d, vs) for vs in spans]
    alg = stabilizing_algebra(subspaces, field=field, dim=d)
    bf_rank, bf_count = _bruteforce_dim(subspaces, field, d)
    assert alg.dim == bf_rank
    # the algebra is literally the set of stabilizing matrices, so counts match
    assert field.q ** alg.dim == bf_count
    assert alg.verify_closed()
    # every basis member stabilizes every subspace
    for m in alg.basis:
        for u in subspaces:
            for v in u.basis_vectors():
                assert u.contains_vector(m.apply(v))


def test_algebra_closure_verify_closed():
    e12 = MatrixFq.elementary(F2, 2, 0, 1)
    alg = algebra_closure([e12])
    assert alg.verify_closed()
    assert alg.dim == 2  # span{I, E12} is closed since E12^2 = 0


def test_all_matrices_count():
    assert sum(1 for _ in all_matrices(F2, 2)) == 16


# -- property tests -----------------------------------------------------------


small_fields = st.sampled_from([F2, F3, F4, F5])


@st.composite
def field_matrix(draw, max_dim=3, square=False):
    f = draw(small_fields)
    r = draw(st.integers(1, max_dim))
    c = r if square else draw(st.integers(1, max_dim))
    ent = draw(st.lists(st.integers(0, f.q - 1), min_size=r * c, max_size=r * c))
    return MatrixFq(f, r, c, ent)


@given(field_matrix())
@settings(max_examples=60, deadline=None)
def test_rref_idempotent(m):
    red, rank, piv = rref(m)
    red2, rank2, piv2 = rref(red)
    assert red2 == red
    assert rank2 == rank
    assert piv2 == piv


@given(field_matrix())
@settings(max_examples=60, deadline=None)
def test_nullspace_rank_nullity(m):
    _, rank, _ = rref(m)
    kern = nullspace(m)
    assert rank + len(kern) == m.cols
    for v in kern:
        assert m.apply(v) == tuple([0] * m.rows)


@given(field_matrix(square=True))
@settings(max_examples=60, deadline=None)
def test_det_multiplicative(m):
    f = m.field
    ent2 = [(x * 7 + 1) % f.q for x in m.entries]
    m2 = MatrixFq(f, m.rows, m.cols, ent2)
    assert m.mul(m2).det() == f.mul_c(m.det(), m2.det())


@st.composite
def two_subspaces(draw, max_dim=4):
    f = draw(small_fields)
    d = draw(st.integers(1, max_dim))
    nv = draw(st.integers(0, 3))
    nw = draw(st.integers(0, 3))
    vecs_u = [
        tuple(draw(st.integers(0, f.q - 1)) for _ in range(d)) for _ in range(nv)
    ]
    vecs_w = [
        tuple(draw(st.integers(0, f.q - 1)) for _ in range(d)) for _ in range(nw)
    ]
    return (
        SubspaceFq.from_vectors(f, d, vecs_u),
        SubspaceFq.from_vectors(f, d, vecs_w),
    )


@given(two_subspaces())
@settings(max_examples=60, deadline=None)
def test_modular_dim_formula(uw):
    u, w = uw
    s = subspace_sum(u, w)
    x = subspace_intersect(u, w)
    assert s.dim + x.dim == u.dim + w.dim
    assert subspace_contains(s, u) and subspace_contains(s, w)
    assert subspace_contains(u, x) and subspace_contains(w, x)


@given(two_subspaces(max_dim=3))
@settings(max_examples=30, deadline=None)
def test_stabilizing_algebra_members_stabilize(uw):
    u, w = uw
    alg = stabilizing_algebra([u, w])
    assert alg.dim >= 1
    ident = MatrixFq.identity(u.field, u.ambient_dim)
    assert alg.contains(ident)
    for m in alg.basis:
        for sp in (u, w):
            for v in sp.basis_vectors():
                assert sp.contains_vector(m.apply(v))
