"""Classical forms on F_q^d and Witt decomposition.

A form value holds the Gram matrix of the bilinear or sesquilinear
pairing and, for quadratic kind, the upper-triangular coefficient
vector of Q.  Q is first-class data, never recovered from the Gram
matrix, so characteristic 2 works the same as odd characteristic.

Conventions: vectors pair as [u, v] = u^T G sigma(v) with sigma the
identity except in the unitary case, where sigma is the order-2 field
automorphism a -> a^sqrt(q).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .errors import (
    DegenerateRestriction,
    DimensionMismatch,
    IncompatibleParameters,
    KindMismatch,
    NoneExists,
    SearchBudgetExceeded,
    SizeCapExceeded,
)
from .gf import FiniteField, field_create
from .linalg import MatrixFq, SubspaceFq, nullspace, rref

_EXHAUSTIVE_CAP = 1 << 18
_RANDOM_TRIAL_CAP = 10 ** 6

KINDS = ("none", "symplectic", "unitary", "quadratic")
SIGNS = ("+", "-", "o")


def quad_index(d: int, i: int, j: int) -> int:
    """Index of coefficient (i, j), i <= j, in the packed upper triangle."""
    if i > j:
        i, j = j, i
    return i * d - (i * (i - 1)) // 2 + (j - i)


@dataclass(frozen=True)
class FormData:
    kind: str
    field: FiniteField
    d: int
    gram: MatrixFq
    quad: Optional[tuple] = None
    sign: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise IncompatibleParameters(f"unknown form kind {self.kind!r}")
        if self.gram.rows != self.d or self.gram.cols != self.d:
            raise DimensionMismatch("gram matrix shape does not match d")
        if self.gram.field != self.field:
            raise DimensionMismatch("gram matrix field mismatch")
        f = self.field
        if self.kind == "none":
            return
        if self.kind == "symplectic":
            neg = f.neg_c
            for i in range(self.d):
                if self.gram.at(i, i) != 0:
                    raise IncompatibleParameters("symplectic gram needs zero diagonal")
                for j in range(self.d):
                    if self.gram.at(i, j) != neg(self.gram.at(j, i)):
                        raise IncompatibleParameters("symplectic gram must be alternating")
            if self.gram.det() == 0:
                raise IncompatibleParameters("symplectic gram is degenerate")
        elif self.kind == "unitary":
            if f.e % 2 != 0:
                raise IncompatibleParameters("unitary forms need a square field order")
            for i in range(self.d):
                for j in range(self.d):
                    if self.gram.at(i, j) != self.sigma_c(self.gram.at(j, i)):
                        raise IncompatibleParameters("unitary gram must be sigma-hermitian")
            if self.gram.det() == 0:
                raise IncompatibleParameters("unitary gram is degenerate")
        elif self.kind == "quadratic":
            if self.quad is None or len(self.quad) != self.d * (self.d + 1) // 2:
                raise IncompatibleParameters("quadratic kind needs d(d+1)/2 coefficients")
            if self.sign is not None and self.sign not in SIGNS:
                raise IncompatibleParameters(f"unknown quadratic sign {self.sign!r}")
            # polarization of quad must match gram
            add, mul = f.add_c, f.mul_c
            two = f.add_c(1, 1)
            for i in range(self.d):
                for j in range(self.d):
                    if i == j:
                        want = mul(two, self.quad[quad_index(self.d, i, i)])
                    else:
                        want = self.quad[quad_index(self.d, i, j)]
                    if self.gram.at(i, j) != want:
                        raise IncompatibleParameters("gram does not polarize quad")
            if self.gram.det() == 0:
                raise IncompatibleParameters("polar form is degenerate")

    # -- field automorphism used on the second pairing slot ------------

    @property
    def sigma_power(self) -> int:
        return self.field.e // 2 if self.kind == "unitary" else 0

    def sigma_c(self, a: int) -> int:
        out = a
        for _ in range(self.sigma_power):
            out = self.field.frobenius_c(out)
        return out

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "sign": self.sign,
            "gram": self.gram.to_json(),
            "quad": list(self.quad) if self.quad is not None else None,
        }

    @staticmethod
    def from_json(data) -> "FormData":
        if isinstance(data, str):
            data = json.loads(data)
        gram = MatrixFq.from_json(data["gram"])
        quad = tuple(data["quad"]) if data.get("quad") is not None else None
        return FormData(
            kind=data["kind"],
            field=gram.field,
            d=gram.rows,
            gram=gram,
            quad=quad,
            sign=data.get("sign"),
        )


def _dot(f: FiniteField, u: Sequence[int], w: Sequence[int]) -> int:
    if f.e == 1:
        return sum(a * b for a, b in zip(u, w)) % f.p
    add, mul = f.add_c, f.mul_c
    s = 0
    for a, b in zip(u, w):
        if a and b:
            s = add(s, mul(a, b))
    return s


def evaluate(form: FormData, u: Sequence[int], v: Sequence[int]) -> int:
    """[u, v] = u^T G sigma(v)."""
    if len(u) != form.d or len(v) != form.d:
        raise DimensionMismatch("vector length does not match form dimension")
    if form.sigma_power:
        v = tuple(form.sigma_c(x) for x in v)
    return _dot(form.field, u, form.gram.apply(v))


def q_eval(form: FormData, v: Sequence[int]) -> int:
    if form.kind != "quadratic":
        raise KindMismatch("q_eval needs a quadratic form")
    if len(v) != form.d:
        raise DimensionMismatch("vector length does not match form dimension")
    f = form.field
    add, mul = f.add_c, f.mul_c
    s = 0
    idx = 0
    d = form.d
    for i in range(d):
        vi = v[i]
        for j in range(i, d):
            c = form.quad[idx]
            idx += 1
            if c and vi and v[j]:
                s = add(s, mul(c, mul(vi, v[j])))
    return s


def is_singular_vector(form: FormData, v: Sequence[int]) -> bool:
    """Singular (quadratic) or isotropic (other kinds) test."""
    if form.kind == "quadratic":
        return q_eval(form, v) == 0
    if form.kind == "symplectic":
        return True
    return evaluate(form, v, v) == 0


def find_anisotropic_alpha(field: FiniteField) -> int:
    """Least code alpha with t^2 + t + alpha rootless over the field."""
    add, mul = field.add_c, field.mul_c
    for alpha in range(field.q):
        if all(add(add(mul(t, t), t), alpha) != 0 for t in range(field.q)):
            return alpha
    raise NoneExists("every monic quadratic splits, which cannot happen")


def standard_form(kind: str, d: int, field: FiniteField, sign: str = None) -> FormData:
    f = field
    if kind == "none":
        return FormData("none", f, d, MatrixFq.zero(f, d, d))
    if kind == "symplectic":
        if d % 2 != 0 or d <= 0:
            raise IncompatibleParameters("symplectic dimension must be even")
        ent = [0] * (d * d)
        neg1 = f.neg_c(1)
        for t in range(d // 2):
            ent[(2 * t) * d + 2 * t + 1] = 1
            ent[(2 * t + 1) * d + 2 * t] = neg1
        return FormData("symplectic", f, d, MatrixFq(f, d, d, ent))
    if kind == "unitary":
        if f.e % 2 != 0:
            raise IncompatibleParameters("unitary forms need a square field order")
        if d <= 0:
            raise IncompatibleParameters("dimension must be positive")
        return FormData("unitary", f, d, MatrixFq.identity(f, d))
    if kind == "quadratic":
        ncoef = d * (d + 1) // 2
        quad = [0] * ncoef
        if sign == "+":
            if d % 2 != 0 or d <= 0:
                raise IncompatibleParameters("plus type needs even dimension")
            for t in range(d // 2):
                quad[quad_index(d, 2 * t, 2 * t + 1)] = 1
        elif sign == "-":
            if d % 2 != 0 or d < 2:
                raise IncompatibleParameters("minus type needs even dimension")
            for t in range(d // 2 - 1):
                quad[quad_index(d, 2 * t, 2 * t + 1)] = 1
            alpha = find_anisotropic_alpha(f)
            quad[quad_index(d, d - 2, d - 2)] = 1
            quad[quad_index(d, d - 2, d - 1)] = 1
            quad[quad_index(d, d - 1, d - 1)] = alpha
        elif sign == "o":
            if d % 2 != 1 or f.p == 2:
                raise IncompatibleParameters("odd type needs odd dimension and odd characteristic")
            for t in range((d - 1) // 2):
                quad[quad_index(d, 2 * t, 2 * t + 1)] = 1
            quad[quad_index(d, d - 1, d - 1)] = 1
        else:
            raise IncompatibleParameters(f"quadratic forms need a sign, got {sign!r}")
        gram = _polarize(f, d, quad)
        return FormData("quadratic", f, d, gram, tuple(quad), sign)
    raise IncompatibleParameters(f"unknown form kind {kind!r}")


def _polarize(f: FiniteField, d: int, quad: Sequence[int]) -> MatrixFq:
    mul = f.mul_c
    two = f.add_c(1, 1)
    ent = [0] * (d * d)
    for i in range(d):
        for j in range(d):
            if i == j:
                ent[i * d + i] = mul(two, quad[quad_index(d, i, i)])
            else:
                ent[i * d + j] = quad[quad_index(d, i, j)]
    return MatrixFq(f, d, d, ent)


def form_from_quad(f: FiniteField, d: int, quad: Sequence[int], sign: str = None) -> FormData:
    quad = tuple(int(x) for x in quad)
    return FormData("quadratic", f, d, _polarize(f, d, quad), quad, sign)


def preserves(form: FormData, g: MatrixFq) -> bool:
    if g.rows != form.d or g.cols != form.d:
        raise DimensionMismatch("matrix size does not match form dimension")
    if form.kind == "none":
        return True
    gs = g.entrywise_frobenius(form.sigma_power) if form.sigma_power else g
    if g.transpose().mul(form.gram).mul(gs) != form.gram:
        return False
    if form.kind == "quadratic":
        d = form.d
        basis = [tuple(1 if t == i else 0 for t in range(d)) for i in range(d)]
        images = [g.apply(v) for v in basis]
        add = form.field.add_c
        for i in range(d):
            if q_eval(form, images[i]) != q_eval(form, basis[i]):
                return False
        for i in range(d):
            for j in range(i + 1, d):
                s = tuple(add(a, b) for a, b in zip(basis[i], basis[j]))
                si = tuple(add(a, b) for a, b in zip(images[i], images[j]))
                if q_eval(form, si) != q_eval(form, s):
                    return False
    return True


def perp(form: FormData, u: SubspaceFq) -> SubspaceFq:
    """All v with [v, w] = 0 for every w in u."""
    if u.ambient_dim != form.d or u.field != form.field:
        raise DimensionMismatch("subspace does not match form")
    if u.dim == 0:
        return SubspaceFq.full(form.field, form.d)
    rows = []
    for w in u.basis_vectors():
        ws = tuple(form.sigma_c(x) for x in w) if form.sigma_power else w
        rows.append(list(form.gram.apply(ws)))
    m = MatrixFq.from_rows(form.field, rows)
    kern = nullspace(m)
    return SubspaceFq.from_vectors(form.field, form.d, kern)


def restricted_gram(form: FormData, basis: Sequence[Sequence[int]]) -> MatrixFq:
    k = len(basis)
    ent = []
    for u in basis:
        for w in basis:
            ent.append(evaluate(form, u, w))
    return MatrixFq(form.field, k, k, ent)


def radical_dim(form: FormData, within: SubspaceFq) -> int:
    basis = within.basis_vectors()
    if not basis:
        return 0
    gr = restricted_gram(form, basis)
    _, rank, _ = rref(gr)
    return len(basis) - rank


@dataclass(frozen=True)
class WittDecomposition:
    witt_index: int
    witt_defect: int
    hyperbolic_pairs: tuple  # of (x, y) vector pairs
    anisotropic_basis: tuple  # of vectors

    @property
    def dim(self) -> int:
        return 2 * self.witt_index + self.witt_defect


def _projective_tuples(q: int, k: int):
    """Coefficient tuples with first nonzero entry 1, lex order."""
    for lead in range(k):
        # positions before `lead` are zero, position lead is 1
        tail = k - lead - 1
        total = q ** tail
        for code in range(total):
            out = [0] * k
            out[lead] = 1
            x = code
            for t in range(tail):
                out[lead + 1 + t] = x % q
                x //= q
            yield tuple(out)


def _combine(f: FiniteField, coeffs: Sequence[int], basis: Sequence[Sequence[int]]):
    add, mul = f.add_c, f.mul_c
    n = len(basis[0])
    v = [0] * n
    for c, b in zip(coeffs, basis):
        if c:
            for t in range(n):
                if b[t]:
                    v[t] = add(v[t], mul(c, b[t]))
    return tuple(v)


def _find_singular_in_span(form: FormData, basis: Sequence[Sequence[int]], seed: int):
    """First singular nonzero vector in the span, or None if anisotropic.

    With a nonzero seed, random candidates are tried first so repeated
    calls can steer later constructions; the exhaustive projective scan
    still runs afterwards so anisotropy is always detected when the
    space is small enough to scan.
    """
    f = form.field
    k = len(basis)
    if k == 0:
        return None
    if form.kind == "symplectic":
        if seed:
            rng = random.Random(seed * 1000003 + k)
            coeffs = [rng.randrange(f.q) for _ in range(k)]
            if any(coeffs):
                return _combine(f, coeffs, basis)
        return tuple(basis[0])
    proj_count = (f.q ** k - 1) // (f.q - 1)
    if seed:
        rng = random.Random(seed * 1000003 + k)
        for _ in range(4096):
            coeffs = [rng.randrange(f.q) for _ in range(k)]
            if not any(coeffs):
                continue
            v = _combine(f, coeffs, basis)
            if is_singular_vector(form, v):
                return v
    if proj_count <= _EXHAUSTIVE_CAP:
        for coeffs in _projective_tuples(f.q, k):
            v = _combine(f, coeffs, basis)
            if is_singular_vector(form, v):
                return v
        return None
    rng = random.Random(seed * 1000003 + 7 * k + 1)
    for _ in range(_RANDOM_TRIAL_CAP):
        coeffs = [rng.randrange(f.q) for _ in range(k)]
        if not any(coeffs):
            continue
        v = _combine(f, coeffs, basis)
        if is_singular_vector(form, v):
            return v
    raise SearchBudgetExceeded(
        "no singular vector found within the trial budget on a space too large to scan"
    )


def _hyperbolic_partner(form: FormData, x, basis):
    """Vector y in span(basis) with [x, y] = 1 and y singular."""
    f = form.field
    w = None
    for b in basis:
        c = evaluate(form, x, b)
        if c != 0:
            ci = f.inv_c(c)
            lam = form.sigma_c(ci) if form.sigma_power else ci
            w = tuple(f.mul_c(lam, t) for t in b)
            break
    if w is None:
        raise DegenerateRestriction("singular vector pairs to zero with the whole space")
    if form.kind == "symplectic":
        return w
    if form.kind == "quadratic":
        c = f.neg_c(q_eval(form, w))
        return tuple(f.add_c(a, f.mul_c(c, b)) for a, b in zip(w, x))
    # unitary: shift by c x with trace(c) = -[w, w]
    target = f.neg_c(evaluate(form, w, w))
    for c in range(f.q):
        if f.add_c(c, form.sigma_c(c)) == target:
            return tuple(f.add_c(a, f.mul_c(c, b)) for a, b in zip(w, x))
    raise NoneExists("field trace is onto the fixed field, so this cannot happen")


def _perp_within(form: FormData, vectors, basis):
    """Basis of {v in span(basis) : [v, u] = 0 for u in vectors}."""
    f = form.field
    k = len(basis)
    rows = []
    for u in vectors:
        rows.append([evaluate(form, b, u) for b in basis])
    m = MatrixFq.from_rows(f, rows)
    kern = nullspace(m)
    return [_combine(f, kv, basis) for kv in kern]


def witt_decompose(form: FormData, within: Optional[SubspaceFq] = None, seed: int = 0) -> WittDecomposition:
    f = form.field
    if within is None:
        within = SubspaceFq.full(f, form.d)
    basis = [tuple(v) for v in within.basis_vectors()]
    if basis:
        gr = restricted_gram(form, basis)
        if gr.det() == 0:
            raise DegenerateRestriction("form restricts degenerately to the given subspace")
    pairs = []
    current = basis
    while current:
        x = _find_singular_in_span(form, current, seed)
        if x is None:
            break
        y = _hyperbolic_partner(form, x, current)
        pairs.append((x, y))
        current = _perp_within(form, [x, y], current)
    decomp = WittDecomposition(
        witt_index=len(pairs),
        witt_defect=len(current),
        hyperbolic_pairs=tuple(pairs),
        anisotropic_basis=tuple(tuple(v) for v in current),
    )
    verify_witt(form, decomp)
    return decomp


def verify_witt(form: FormData, decomp: WittDecomposition):
    """Re-check every pairing equation and anisotropy of the leftover part."""
    f = form.field
    pairs = decomp.hyperbolic_pairs
    vecs = [v for pair in pairs for v in pair] + list(decomp.anisotropic_basis)
    if vecs:
        m = MatrixFq.from_rows(f, [list(v) for v in vecs])
        _, rank, _ = rref(m)
        if rank != len(vecs):
            raise DegenerateRestriction("decomposition vectors are dependent")
    for i, (x, y) in enumerate(pairs):
        if evaluate(form, x, y) != 1:
            raise DegenerateRestriction("hyperbolic pair fails [x, y] = 1")
        if form.kind == "quadratic":
            if q_eval(form, x) != 0 or q_eval(form, y) != 0:
                raise DegenerateRestriction("hyperbolic pair vector is not singular")
        elif evaluate(form, x, x) != 0 or evaluate(form, y, y) != 0:
            raise DegenerateRestriction("hyperbolic pair vector is not isotropic")
        for j, (x2, y2) in enumerate(pairs):
            if i == j:
                continue
            for a in (x, y):
                for b in (x2, y2):
                    if evaluate(form, a, b) != 0:
                        raise DegenerateRestriction("hyperbolic pairs are not orthogonal")
        for b in decomp.anisotropic_basis:
            if evaluate(form, x, b) != 0 or evaluate(form, y, b) != 0:
                raise DegenerateRestriction("anisotropic part not orthogonal to pairs")
    # leftover part carries no nonzero singular vector
    k = len(decomp.anisotropic_basis)
    if k:
        proj_count = (f.q ** k - 1) // (f.q - 1)
        if proj_count > _EXHAUSTIVE_CAP:
            raise SizeCapExceeded("anisotropic part too large to certify")
        for coeffs in _projective_tuples(f.q, k):
            v = _combine(f, coeffs, decomp.anisotropic_basis)
            if is_singular_vector(form, v):
                raise DegenerateRestriction("claimed anisotropic part has a singular vector")


def space_type(form: FormData, within: Optional[SubspaceFq] = None):
    """Isometry type of a nondegenerate subspace, an orbit invariant.

    Returns (kind, dim, sign_tag).  For quadratic forms the tag is the
    sign for even dimension; odd dimension in odd characteristic uses
    the square class of the restricted discriminant.
    """
    f = form.field
    if within is None:
        within = SubspaceFq.full(f, form.d)
    k = within.dim
    if form.kind in ("none",):
        return ("none", k, None)
    if form.kind in ("symplectic", "unitary"):
        if radical_dim(form, within) > 0:
            raise DegenerateRestriction(
                "form restricts degenerately to the given subspace"
            )
        return (form.kind, k, None)
    dec = witt_decompose(form, within)
    if k % 2 == 0:
        tag = {0: "+", 2: "-"}[dec.witt_defect]
    else:
        gr = restricted_gram(form, within.basis_vectors())
        det = gr.det()
        tag = ("o", _is_square(f, det))
    return ("quadratic", k, tag)


def _is_square(f: FiniteField, a: int) -> bool:
    if a == 0:
        return True
    if f.p == 2:
        return True
    return f.pow_c(a, (f.q - 1) // 2) == 1


def totally_singular(form: FormData, u: SubspaceFq) -> bool:
    """True when the form vanishes identically on u."""
    basis = u.basis_vectors()
    for i, a in enumerate(basis):
        if form.kind == "quadratic" and q_eval(form, a) != 0:
            return False
        if form.kind != "quadratic" and evaluate(form, a, a) != 0:
            return False
        for b in basis[i:]:
            if evaluate(form, a, b) != 0:
                return False
    return True
