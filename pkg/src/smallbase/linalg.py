"""Exact dense linear algebra over small finite fields.

Matrices store entries as integer field codes (row major).  Vectors are
tuples of codes.  Subspaces are kept in reduced row echelon form so that
equal subspaces compare equal and hash alike, which the orbit machinery
relies on for deterministic point ordering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .errors import DimensionMismatch, EmptyInput, SizeCapExceeded
from .gf import FiniteField, field_create

Vector = tuple  # tuple of int codes


class MatrixFq:
    """Immutable matrix over a finite field, entries as int codes."""

    __slots__ = ("field", "rows", "cols", "entries", "_hash")

    def __init__(self, field: FiniteField, rows: int, cols: int, entries: Sequence[int]):
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(
                f"expected {rows}x{cols}={rows * cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("MatrixFq is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rows(field: FiniteField, row_list: Sequence[Sequence[int]]) -> "MatrixFq":
        if not row_list:
            raise EmptyInput("from_rows needs at least one row")
        cols = len(row_list[0])
        flat = []
        for r in row_list:
            if len(r) != cols:
                raise DimensionMismatch("ragged rows")
            flat.extend(int(x) for x in r)
        return MatrixFq(field, len(row_list), cols, flat)

    @staticmethod
    def identity(field: FiniteField, n: int) -> "MatrixFq":
        ent = [0] * (n * n)
        for i in range(n):
            ent[i * n + i] = 1
        return MatrixFq(field, n, n, ent)

    @staticmethod
    def zero(field: FiniteField, rows: int, cols: int) -> "MatrixFq":
        return MatrixFq(field, rows, cols, [0] * (rows * cols))

    @staticmethod
    def elementary(field: FiniteField, n: int, i: int, j: int, c: int = 1) -> "MatrixFq":
        """c times the matrix unit E_ij (n x n, 0-indexed)."""
        ent = [0] * (n * n)
        ent[i * n + j] = c
        return MatrixFq(field, n, n, ent)

    @staticmethod
    def diagonal(field: FiniteField, diag: Sequence[int]) -> "MatrixFq":
        n = len(diag)
        ent = [0] * (n * n)
        for i, c in enumerate(diag):
            ent[i * n + i] = int(c)
        return MatrixFq(field, n, n, ent)

    # -- element access ------------------------------------------------

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        c = self.cols
        return self.entries[i * c : (i + 1) * c]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "MatrixFq") -> "MatrixFq":
        self._check_same_shape(other)
        add = self.field.add_c
        ent = [add(a, b) for a, b in zip(self.entries, other.entries)]
        return MatrixFq(self.field, self.rows, self.cols, ent)

    def __sub__(self, other: "MatrixFq") -> "MatrixFq":
        self._check_same_shape(other)
        sub = self.field.sub_c
        ent = [sub(a, b) for a, b in zip(self.entries, other.entries)]
        return MatrixFq(self.field, self.rows, self.cols, ent)

    def __neg__(self) -> "MatrixFq":
        neg = self.field.neg_c
        return MatrixFq(self.field, self.rows, self.cols, [neg(a) for a in self.entries])

    def scale(self, c: int) -> "MatrixFq":
        mul = self.field.mul_c
        return MatrixFq(self.field, self.rows, self.cols, [mul(c, a) for a in self.entries])

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        return self.mul(other)

    def mul(self, other: "MatrixFq") -> "MatrixFq":
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        f = self.field
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [0] * (n * m)
        if f.e == 1:
            p = f.p
            for i in range(n):
                arow = a[i * k : (i + 1) * k]
                base = i * m
                for j in range(m):
                    s = 0
                    for t in range(k):
                        s += arow[t] * b[t * m + j]
                    out[base + j] = s % p
        else:
            fmul = f.mul_c
            fadd = f.add_c
            for i in range(n):
                arow = a[i * k : (i + 1) * k]
                base = i * m
                for j in range(m):
                    s = 0
                    for t in range(k):
                        av = arow[t]
                        if av:
                            bv = b[t * m + j]
                            if bv:
                                s = fadd(s, fmul(av, bv))
                    out[base + j] = s
        return MatrixFq(self.field, n, m, out)

    def apply(self, v: Sequence[int]) -> Vector:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise DimensionMismatch("vector length does not match column count")
        f = self.field
        out = []
        if f.e == 1:
            p = f.p
            for i in range(self.rows):
                row = self.row(i)
                out.append(sum(row[t] * v[t] for t in range(self.cols)) % p)
        else:
            fmul, fadd = f.mul_c, f.add_c
            for i in range(self.rows):
                s = 0
                row = self.row(i)
                for t in range(self.cols):
                    if row[t] and v[t]:
                        s = fadd(s, fmul(row[t], v[t]))
                out.append(s)
        return tuple(out)

    def transpose(self) -> "MatrixFq":
        r, c = self.rows, self.cols
        ent = [self.entries[i * c + j] for j in range(c) for i in range(r)]
        return MatrixFq(self.field, c, r, ent)

    def entrywise_frobenius(self, power: int = 1) -> "MatrixFq":
        frob = self.field.frobenius_c
        ent = list(self.entries)
        for _ in range(power % max(self.field.e, 1)):
            ent = [frob(a) for a in ent]
        return MatrixFq(self.field, self.rows, self.cols, ent)

    def trace(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatch("trace needs a square matrix")
        add = self.field.add_c
        s = 0
        for i in range(self.rows):
            s = add(s, self.at(i, i))
        return s

    def det(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatch("det needs a square matrix")
        f = self.field
        n = self.rows
        m = [list(self.row(i)) for i in range(n)]
        det = 1
        mul, inv, sub, neg = f.mul_c, f.inv_c, f.sub_c, f.neg_c
        for col in range(n):
            piv = None
            for r in range(col, n):
                if m[r][col]:
                    piv = r
                    break
            if piv is None:
                return 0
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = neg(det)
            pv = m[col][col]
            det = mul(det, pv)
            pvi = inv(pv)
            for r in range(col + 1, n):
                if m[r][col]:
                    factor = mul(m[r][col], pvi)
                    for c2 in range(col, n):
                        m[r][c2] = sub(m[r][c2], mul(factor, m[col][c2]))
        return det

    def inverse(self) -> "MatrixFq":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse needs a square matrix")
        n = self.rows
        f = self.field
        aug = []
        for i in range(n):
            row = list(self.row(i)) + [0] * n
            row[n + i] = 1
            aug.append(row)
        mat = MatrixFq(f, n, 2 * n, [x for row in aug for x in row])
        red, rank, pivots = rref(mat)
        if pivots[:n] != tuple(range(n)):
            raise ZeroDivisionError("matrix is singular")
        ent = []
        for i in range(n):
            ent.extend(red.entries[i * 2 * n + n : i * 2 * n + 2 * n])
        return MatrixFq(f, n, n, ent)

    def pow(self, k: int) -> "MatrixFq":
        if self.rows != self.cols:
            raise DimensionMismatch("pow needs a square matrix")
        if k < 0:
            return self.inverse().pow(-k)
        result = MatrixFq.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base)
            k >>= 1
        return result

    def is_scalar(self) -> bool:
        if self.rows != self.cols:
            return False
        c = self.at(0, 0)
        for i in range(self.rows):
            for j in range(self.cols):
                want = c if i == j else 0
                if self.at(i, j) != want:
                    return False
        return True

    def is_identity(self) -> bool:
        return self.is_scalar() and self.at(0, 0) == 1

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    # -- identity/compare ----------------------------------------------

    def _check_same_shape(self, other: "MatrixFq"):
        if self.rows != other.rows or self.cols != other.cols or self.field != other.field:
            raise DimensionMismatch("shape or field mismatch")

    def __eq__(self, other):
        return (
            isinstance(other, MatrixFq)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.field.p, self.field.e, self.rows, self.cols, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"MatrixFq(q={self.field.q}, {self.rows}x{self.cols}, {self.row_list()})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "e": self.field.e,
            "rows": self.rows,
            "cols": self.cols,
            "entries": list(self.entries),
        }

    @staticmethod
    def from_json(data) -> "MatrixFq":
        if isinstance(data, str):
            data = json.loads(data)
        field = field_create(int(data["p"]), int(data["e"]))
        return MatrixFq(field, int(data["rows"]), int(data["cols"]), data["entries"])


def rref(m: MatrixFq):
    """Reduced row echelon form.  Returns (matrix, rank, pivot columns)."""
    f = m.field
    rows = [list(m.row(i)) for i in range(m.rows)]
    nr, nc = m.rows, m.cols
    mul, inv, sub = f.mul_c, f.inv_c, f.sub_c
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        if pv != 1:
            pvi = inv(pv)
            rows[r] = [mul(pvi, x) for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                ri, rr = rows[i], rows[r]
                for c2 in range(c, nc):
                    if rr[c2]:
                        ri[c2] = sub(ri[c2], mul(factor, rr[c2]))
        pivots.append(c)
        r += 1
        if r == nr:
            break
    flat = [x for row in rows for x in row]
    return MatrixFq(f, nr, nc, flat), r, tuple(pivots)


@dataclass(frozen=True)
class AffineSolution:
    """Solution set x0 + span(kernel) of a consistent linear system."""

    particular: tuple
    kernel_basis: tuple  # tuple of tuples

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_basis)


def nullspace(m: MatrixFq) -> list:
    """Basis (list of code tuples) for the right kernel of m."""
    red, rank, pivots = rref(m)
    f = m.field
    nc = m.cols
    pivot_set = set(pivots)
    free = [c for c in range(nc) if c not in pivot_set]
    basis = []
    neg = f.neg_c
    for fc in free:
        vec = [0] * nc
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = neg(red.at(r, fc))
        basis.append(tuple(vec))
    return basis


def solve_linear(a: MatrixFq, b: Sequence[int]) -> Optional[AffineSolution]:
    """Solve a x = b.  Returns None when inconsistent."""
    if len(b) != a.rows:
        raise DimensionMismatch("rhs length does not match row count")
    f = a.field
    nc = a.cols
    aug_rows = []
    for i in range(a.rows):
        aug_rows.append(list(a.row(i)) + [int(b[i])])
    aug = MatrixFq(f, a.rows, nc + 1, [x for row in aug_rows for x in row])
    red, rank, pivots = rref(aug)
    if pivots and pivots[-1] == nc:
        return None
    particular = [0] * nc
    for r, pc in enumerate(pivots):
        particular[pc] = red.at(r, nc)
    kern = nullspace(a)
    return AffineSolution(tuple(particular), tuple(kern))


class SubspaceFq:
    """Subspace of F_q^d held as an RREF basis (no zero rows)."""

    __slots__ = ("field", "ambient_dim", "basis", "_hash")

    def __init__(self, field: FiniteField, ambient_dim: int, basis: MatrixFq):
        # callers must pass an RREF basis; use from_vectors otherwise
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("SubspaceFq is immutable")

    @staticmethod
    def from_vectors(field: FiniteField, ambient_dim: int, vectors: Iterable[Sequence[int]]) -> "SubspaceFq":
        vecs = [tuple(int(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionMismatch("vector length does not match ambient dimension")
        if not vecs:
            basis = MatrixFq(field, 0, ambient_dim, [])
            return SubspaceFq(field, ambient_dim, basis)
        m = MatrixFq.from_rows(field, vecs)
        red, rank, _ = rref(m)
        basis = MatrixFq(field, rank, ambient_dim, red.entries[: rank * ambient_dim])
        return SubspaceFq(field, ambient_dim, basis)

    @staticmethod
    def full(field: FiniteField, ambient_dim: int) -> "SubspaceFq":
        return SubspaceFq(field, ambient_dim, MatrixFq.identity(field, ambient_dim))

    @staticmethod
    def zero(field: FiniteField, ambient_dim: int) -> "SubspaceFq":
        return SubspaceFq(field, ambient_dim, MatrixFq(field, 0, ambient_dim, []))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def basis_vectors(self) -> list:
        return [self.basis.row(i) for i in range(self.basis.rows)]

    def contains_vector(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        return all(x == 0 for x in self.reduce_vector(v))

    def reduce_vector(self, v: Sequence[int]) -> Vector:
        """Residual of v after removing its component in this subspace."""
        f = self.field
        sub, mul = f.sub_c, f.mul_c
        w = list(int(x) for x in v)
        for r in range(self.basis.rows):
            row = self.basis.row(r)
            pc = next(i for i, x in enumerate(row) if x)
            coeff = w[pc]
            if coeff:
                for c in range(pc, self.ambient_dim):
                    if row[c]:
                        w[c] = sub(w[c], mul(coeff, row[c]))
        return tuple(w)

    def all_vectors(self):
        """Iterate every vector of the subspace (q^dim of them)."""
        f = self.field
        k = self.dim
        if f.q ** k > 2 ** 22:
            raise SizeCapExceeded("subspace too large to enumerate")
        rows = self.basis_vectors()
        add, mul = f.add_c, f.mul_c
        codes = list(range(f.q))

        def rec(i, acc):
            if i == k:
                yield tuple(acc)
                return
            for c in codes:
                if c == 0:
                    yield from rec(i + 1, acc)
                else:
                    acc2 = [add(a, mul(c, b)) for a, b in zip(acc, rows[i])]
                    yield from rec(i + 1, acc2)

        yield from rec(0, [0] * self.ambient_dim)

    def encode(self) -> tuple:
        """Canonical sortable encoding (dim, RREF entries)."""
        return (self.basis.rows, self.basis.entries)

    def __eq__(self, other):
        return (
            isinstance(other, SubspaceFq)
            and self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.basis.entries == other.basis.entries
            and self.basis.rows == other.basis.rows
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.field.p, self.field.e, self.ambient_dim, self.basis.rows, self.basis.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"SubspaceFq(q={self.field.q}, dim {self.dim} of {self.ambient_dim}, {self.basis.row_list()})"

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "e": self.field.e,
            "ambient_dim": self.ambient_dim,
            "basis": [list(r) for r in self.basis_vectors()],
        }

    @staticmethod
    def from_json(data) -> "SubspaceFq":
        if isinstance(data, str):
            data = json.loads(data)
        field = field_create(int(data["p"]), int(data["e"]))
        return SubspaceFq.from_vectors(field, int(data["ambient_dim"]), data["basis"])


def subspace_sum(u: SubspaceFq, w: SubspaceFq) -> SubspaceFq:
    _check_compatible(u, w)
    return SubspaceFq.from_vectors(
        u.field, u.ambient_dim, list(u.basis_vectors()) + list(w.basis_vectors())
    )


def subspace_intersect(u: SubspaceFq, w: SubspaceFq) -> SubspaceFq:
    _check_compatible(u, w)
    f = u.field
    d = u.ambient_dim
    ku, kw = u.dim, w.dim
    if ku == 0 or kw == 0:
        return SubspaceFq.zero(f, d)
    # columns: coefficients on u-basis then w-basis; rows: ambient coords
    neg = f.neg_c
    rows = []
    ub, wb = u.basis_vectors(), w.basis_vectors()
    for coord in range(d):
        row = [ub[i][coord] for i in range(ku)] + [neg(wb[j][coord]) for j in range(kw)]
        rows.append(row)
    m = MatrixFq.from_rows(f, rows)
    kern = nullspace(m)
    vecs = []
    add, mul = f.add_c, f.mul_c
    for kv in kern:
        v = [0] * d
        for i in range(ku):
            c = kv[i]
            if c:
                for t in range(d):
                    if ub[i][t]:
                        v[t] = add(v[t], mul(c, ub[i][t]))
        vecs.append(tuple(v))
    return SubspaceFq.from_vectors(f, d, vecs)


def subspace_contains(u: SubspaceFq, w: SubspaceFq) -> bool:
    """True when w is a subspace of u."""
    _check_compatible(u, w)
    return all(u.contains_vector(v) for v in w.basis_vectors())


def subspace_equals(u: SubspaceFq, w: SubspaceFq) -> bool:
    _check_compatible(u, w)
    return u == w


def image_under(u: SubspaceFq, g: MatrixFq) -> SubspaceFq:
    """Image g(u) treating vectors as columns (v maps to g @ v)."""
    if g.cols != u.ambient_dim or g.rows != g.cols or g.field != u.field:
        raise DimensionMismatch("matrix does not act on the ambient space")
    vecs = [g.apply(v) for v in u.basis_vectors()]
    return SubspaceFq.from_vectors(u.field, u.ambient_dim, vecs)


def subspace_ops(op: str, u: SubspaceFq, w=None):
    if op == "sum":
        return subspace_sum(u, w)
    if op == "intersect":
        return subspace_intersect(u, w)
    if op == "contains":
        return subspace_contains(u, w)
    if op == "equals":
        return subspace_equals(u, w)
    if op == "image_under":
        return image_under(u, w)
    raise ValueError(f"unknown subspace op {op!r}")


def _check_compatible(u: SubspaceFq, w: SubspaceFq):
    if u.field != w.field or u.ambient_dim != w.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")


class MatrixAlgebra:
    """Span of matrices, closed under multiplication and containing I."""

    __slots__ = ("field", "n", "basis", "_rref", "_pivots")

    def __init__(self, field: FiniteField, n: int, basis: Sequence[MatrixFq]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "basis", tuple(basis))
        if basis:
            flat = MatrixFq(field, len(basis), n * n, [x for m in basis for x in m.entries])
            red, rank, piv = rref(flat)
            if rank != len(basis):
                raise ValueError("algebra basis must be linearly independent")
            object.__setattr__(self, "_rref", red)
            object.__setattr__(self, "_pivots", piv)
        else:
            object.__setattr__(self, "_rref", None)
            object.__setattr__(self, "_pivots", ())

    def __setattr__(self, name, value):
        raise AttributeError("MatrixAlgebra is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_full(self) -> bool:
        return self.dim == self.n * self.n

    @property
    def is_scalars_only(self) -> bool:
        return self.dim == 1 and self.basis[0].is_scalar()

    def contains(self, m: MatrixFq) -> bool:
        if self._rref is None:
            return m.is_zero()
        f = self.field
        sub, mul = f.sub_c, f.mul_c
        w = list(m.entries)
        nn = self.n * self.n
        for r, pc in enumerate(self._pivots):
            coeff = w[pc]
            if coeff:
                for c in range(pc, nn):
                    x = self._rref.at(r, c)
                    if x:
                        w[c] = sub(w[c], mul(coeff, x))
        return all(x == 0 for x in w)

    def verify_closed(self) -> bool:
        """Check products of basis pairs stay in the span and I is present."""
        ident = MatrixFq.identity(self.field, self.n)
        if not self.contains(ident):
            return False
        for a in self.basis:
            for b in self.basis:
                if not self.contains(a.mul(b)):
                    return False
        return True


def _span_rows_to_algebra(field: FiniteField, n: int, row_matrix: MatrixFq) -> MatrixAlgebra:
    red, rank, _ = rref(row_matrix)
    basis = [
        MatrixFq(field, n, n, red.entries[i * n * n : (i + 1) * n * n]) for i in range(rank)
    ]
    return MatrixAlgebra(field, n, basis)


def stabilizing_algebra(
    subspaces: Sequence[SubspaceFq],
    field: FiniteField = None,
    dim: int = None,
) -> MatrixAlgebra:
    """All matrices x with x(U) inside U for every listed subspace U.

    The empty collection is legal only with explicit field and dim, and
    then yields the full matrix algebra.
    """
    subspaces = list(subspaces)
    if not subspaces:
        if field is None or dim is None:
            raise EmptyInput("no subspaces given and no ambient field/dim to fall back on")
        d = dim
        f = field
    else:
        f = subspaces[0].field
        d = subspaces[0].ambient_dim
        for u in subspaces:
            if u.field != f or u.ambient_dim != d:
                raise DimensionMismatch("subspaces live in different ambient spaces")
        if field is not None and field != f:
            raise DimensionMismatch("explicit field disagrees with subspaces")
        if dim is not None and dim != d:
            raise DimensionMismatch("explicit dim disagrees with subspaces")
    # unknowns: x entries, row major, d*d of them
    # constraint per (subspace U, basis vector u, ambient coord t):
    #   (x u)_t minus its U-component must vanish
    nn = d * d
    rows = []
    neg, mul, add, sub_ = f.neg_c, f.mul_c, f.add_c, f.sub_c
    for space in subspaces:
        if space.dim == 0 or space.dim == d:
            continue
        bvecs = space.basis_vectors()
        piv_cols = [next(i for i, x in enumerate(r) if x) for r in bvecs]
        for u in bvecs:
            # w = x u has w_t = sum_s x[t,s] u[s]; express w in U-coords via
            # pivots: w in U iff w == sum_r w[p_r] * b_r
            # coefficient of x[t,s]: u[s] * (delta part) minus correction
            for t in range(d):
                row = [0] * nn
                # + w_t
                for s in range(d):
                    if u[s]:
                        row[t * d + s] = add(row[t * d + s], u[s])
                # minus sum over basis rows r: b_r[t] * w[p_r]
                for r, pv in enumerate(piv_cols):
                    brt = bvecs[r][t]
                    if brt:
                        for s in range(d):
                            if u[s]:
                                row[pv * d + s] = sub_(row[pv * d + s], mul(brt, u[s]))
                if any(row):
                    rows.append(row)
    if not rows:
        full = [MatrixFq.elementary(f, d, i, j) for i in range(d) for j in range(d)]
        return MatrixAlgebra(f, d, full)
    m = MatrixFq.from_rows(f, rows)
    kern = nullspace(m)
    if not kern:
        raise ValueError("stabilizing algebra lost the identity, which is impossible")
    flat = MatrixFq(f, len(kern), nn, [x for v in kern for x in v])
    alg = _span_rows_to_algebra(f, d, flat)
    return alg


def algebra_closure(seeds: Sequence[MatrixFq], field: FiniteField = None, n: int = None) -> MatrixAlgebra:
    """Smallest algebra with identity containing the seed matrices."""
    seeds = list(seeds)
    if seeds:
        f = seeds[0].field
        d = seeds[0].rows
        for s in seeds:
            if s.field != f or s.rows != d or s.cols != d:
                raise DimensionMismatch("seeds must be square matrices over one field")
    else:
        if field is None or n is None:
            raise EmptyInput("no seeds given and no ambient field/dim to fall back on")
        f, d = field, n
    nn = d * d
    basis: list[MatrixFq] = []
    # rref rows maintained incrementally for membership tests
    red_rows: list[list[int]] = []
    piv_cols: list[int] = []
    sub_, mul, inv = f.sub_c, f.mul_c, f.inv_c

    def reduce(vec):
        w = list(vec)
        for r, pc in enumerate(piv_cols):
            coeff = w[pc]
            if coeff:
                rr = red_rows[r]
                for c in range(pc, nn):
                    if rr[c]:
                        w[c] = sub_(w[c], mul(coeff, rr[c]))
        return w

    def try_add(m: MatrixFq) -> bool:
        w = reduce(m.entries)
        pc = next((i for i, x in enumerate(w) if x), None)
        if pc is None:
            return False
        pvi = inv(w[pc])
        w = [mul(pvi, x) for x in w]
        # eliminate this pivot from existing rows to stay fully reduced
        for r in range(len(red_rows)):
            coeff = red_rows[r][pc]
            if coeff:
                rr = red_rows[r]
                for c in range(pc, nn):
                    if w[c]:
                        rr[c] = sub_(rr[c], mul(coeff, w[c]))
        idx = 0
        while idx < len(piv_cols) and piv_cols[idx] < pc:
            idx += 1
        red_rows.insert(idx, w)
        piv_cols.insert(idx, pc)
        basis.append(m)
        return True

    try_add(MatrixFq.identity(f, d))
    queue = list(seeds)
    for s in queue:
        try_add(s)
    # close under products; every new member multiplies with all members
    changed = True
    while changed:
        changed = False
        snapshot = list(basis)
        for a in snapshot:
            for b in snapshot:
                prod = a.mul(b)
                if try_add(prod):
                    changed = True
            if len(basis) == nn:
                changed = False
                break
        if len(basis) == nn:
            break
    # rebuild in canonical RREF form for deterministic basis
    flat = MatrixFq(f, len(basis), nn, [x for m in basis for x in m.entries])
    return _span_rows_to_algebra(f, d, flat)


def all_matrices(field: FiniteField, n: int):
    """Iterate every n x n matrix over the field (q^(n*n) of them)."""
    q = field.q
    total = q ** (n * n)
    if total > 2 ** 20:
        raise SizeCapExceeded("matrix space too large to enumerate")
    nn = n * n
    ent = [0] * nn
    for code in range(total):
        x = code
        for i in range(nn):
            ent[i] = x % q
            x //= q
        yield MatrixFq(field, n, n, tuple(ent))


def stabilizing_algebra_bruteforce(
    subspaces: Sequence[SubspaceFq], field: FiniteField, dim: int
) -> list:
    """Every matrix stabilizing all the subspaces, by full enumeration."""
    out = []
    for m in all_matrices(field, dim):
        ok = True
        for u in subspaces:
            for v in u.basis_vectors():
                if not u.contains_vector(m.apply(v)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(m)
    return out
