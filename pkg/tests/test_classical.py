"""Tests for classical matrix groups: orders, generators, certificates."""

import json

import pytest
from hypothesis import given, settings, strategies as st

from smallbase.classical import (
    FAMILIES,
    MatGroupSpec,
    antisymmetric_pair,
    all_vector_digits,
    bulk_matvec,
    bulk_q_values,
    bulk_self_pairing,
    endo_generating_pair,
    enumerate_group_elements,
    exhaustive_closure_order,
    exhaustive_closure_elements,
    full_algebra_symmetric_pair,
    generator_certificate,
    generators,
    group_scalars,
    log2_big,
    make_spec,
    order,
    orthogonal_reflection,
    sl_generating_pair,
    sl_pair_certificate,
    symplectic_transvection,
    unitary_transvection,
    vector_orbit_codes,
)
from smallbase.errors import (
    FormulaInapplicable,
    GenerationFailed,
    IncompatibleParameters,
)
from smallbase.forms import preserves, q_eval, standard_form
from smallbase.gf import field_create
from smallbase.linalg import MatrixFq, algebra_closure

F2 = field_create(2, 1)
F3 = field_create(3, 1)
F4 = field_create(2, 2)
F5 = field_create(5, 1)
F9 = field_create(3, 2)


# -- frozen orders ---------------------------------------------------------

KNOWN_ORDERS = [
    ("SL", 2, F2, 6),
    ("SL", 2, F3, 24),
    ("SL", 3, F2, 168),
    ("SL", 2, F4, 60),
    ("SL", 2, F5, 120),
    ("SL", 3, F3, 5616),
    ("GL", 2, F2, 6),
    ("GL", 2, F3, 48),
    ("GL", 3, F2, 168),
    ("GL", 1, F5, 4),
    ("GL", 4, F2, 20160),
    ("Sp", 2, F2, 6),
    ("Sp", 2, F3, 24),
    ("Sp", 4, F2, 720),
    ("Sp", 4, F3, 51840),
    ("Sp", 6, F2, 1451520),
    ("SU", 2, F4, 6),
    ("SU", 3, F4, 216),
    ("SU", 4, F4, 25920),
    ("SU", 2, F9, 24),
    ("OmegaPlus", 2, F2, 2),
    ("OmegaPlus", 2, F3, 4),
    ("OmegaPlus", 4, F2, 72),
    ("OmegaPlus", 4, F3, 1152),
    ("OmegaPlus", 6, F2, 40320),
    ("OmegaMinus", 2, F2, 6),
    ("OmegaMinus", 2, F3, 8),
    ("OmegaMinus", 4, F2, 120),
    ("OmegaMinus", 4, F3, 1440),
    ("OmegaMinus", 6, F2, 51840),
    ("OmegaOdd", 1, F3, 2),
    ("OmegaOdd", 3, F3, 48),
    ("OmegaOdd", 5, F3, 103680),
    ("OmegaOdd", 3, F5, 240),
]


@pytest.mark.parametrize("family,d,f,expected", KNOWN_ORDERS)
def test_known_orders(family, d, f, expected):
    n, lg = order(make_spec(family, d, f))
    assert n == expected
    assert abs(lg - log2_big(expected)) < 1e-9


def test_order_counts_match_matrix_scan():
    # the order formula against a raw scan of the ambient matrix space
    for family, d, f in [
        ("SL", 2, F3),
        ("GL", 2, F4),
        ("Sp", 2, F5),
        ("SU", 2, F4),
        ("OmegaPlus", 2, F3),
        ("OmegaMinus", 2, F4),
        ("OmegaOdd", 3, F3),
    ]:
        spec = make_spec(family, d, f)
        assert len(enumerate_group_elements(spec)) == order(spec)[0]


def test_log2_big_huge_integer():
    n = order(make_spec("SL", 8, F5))[0]
    lg = log2_big(n)
    assert 2 ** int(lg) <= n < 2 ** (int(lg) + 2)


# -- spec construction and serialization ------------------------------------


def test_make_spec_validation():
    with pytest.raises(IncompatibleParameters):
        make_spec("XX", 2, F2)
    with pytest.raises(IncompatibleParameters):
        make_spec("Sp", 3, F2)  # odd dimension
    with pytest.raises(IncompatibleParameters):
        make_spec("SU", 2, F3)  # field without the order-2 automorphism
    with pytest.raises(IncompatibleParameters):
        make_spec("OmegaOdd", 4, F3)  # even dimension
    with pytest.raises(IncompatibleParameters):
        make_spec("OmegaOdd", 3, F2)  # characteristic 2 odd dimension


def test_spec_json_roundtrip():
    for spec in [
        make_spec("SL", 3, F4),
        make_spec("Sp", 4, F3, projective=True),
        make_spec("OmegaMinus", 4, F2, restrict=True),
    ]:
        blob = json.dumps(spec.to_json())
        back = MatGroupSpec.from_json(blob)
        assert back == spec


def test_q0_fixed_field():
    assert make_spec("SU", 3, F4).q0 == 2
    assert make_spec("SU", 2, F9).q0 == 3
    assert make_spec("SL", 2, F4).q0 == 4


# -- scalars -----------------------------------------------------------------


def test_group_scalars():
    assert group_scalars(make_spec("GL", 2, F5)) == (1, 2, 3, 4)
    assert group_scalars(make_spec("SL", 2, F3)) == (1, 2)
    assert group_scalars(make_spec("SL", 3, F4)) == (1, 2, 3)
    assert group_scalars(make_spec("SL", 3, F2)) == (1,)
    assert group_scalars(make_spec("Sp", 2, F3)) == (1, 2)
    assert group_scalars(make_spec("Sp", 2, F2)) == (1,)
    assert group_scalars(make_spec("OmegaPlus", 4, F3)) == (1, 2)
    # unitary: norm one and determinant one
    assert group_scalars(make_spec("SU", 3, F4)) == (1, 2, 3)
    assert group_scalars(make_spec("SU", 2, F4)) == (1,)


def test_projective_order():
    spec = make_spec("SL", 2, F3, projective=True)
    assert order(spec)[0] == 12  # 24 / |{1,-1}|
    spec = make_spec("SL", 3, F4, projective=True)
    assert order(spec)[0] == order(make_spec("SL", 3, F4))[0] // 3


# -- transvections and reflections -------------------------------------------


def test_symplectic_transvection_preserves_form():
    form = standard_form("symplectic", 4, F3)
    for v in [(1, 0, 0, 0), (1, 2, 0, 1), (0, 0, 1, 1)]:
        for lam in (1, 2):
            t = symplectic_transvection(form, v, lam)
            assert preserves(form, t)
            assert t.det() == 1


def test_unitary_transvection_preserves_form():
    form = standard_form("unitary", 3, F4)
    v = (1, 1, 0)  # isotropic: norms add to 1 + 1 = 0 over this field
    t = unitary_transvection(form, v, 1)  # 1 has absolute trace zero here
    assert preserves(form, t)
    assert t.det() == 1
    # scalars with nonzero trace break the form, so the helper must not
    # silently fix them up
    bad = unitary_transvection(form, v, 2)
    assert not preserves(form, bad)


def test_orthogonal_reflection_involutive():
    form = standard_form("quadratic", 3, F3, "o")
    v = (1, 1, 1)
    assert q_eval(form, v) != 0
    r = orthogonal_reflection(form, v)
    assert preserves(form, r)
    assert r.mul(r).is_identity()


def test_reflection_rejects_singular_vector():
    form = standard_form("quadratic", 2, F2, "+")
    with pytest.raises(IncompatibleParameters):
        orthogonal_reflection(form, (1, 0))


# -- generator certification ---------------------------------------------------

EXACT_GRID = [
    ("SL", 2, F2),
    ("SL", 2, F3),
    ("SL", 3, F2),
    ("SL", 2, F4),
    ("GL", 2, F3),
    ("GL", 3, F2),
    ("Sp", 2, F2),
    ("Sp", 2, F3),
    ("Sp", 4, F2),
    ("Sp", 4, F3),
    ("SU", 2, F4),
    ("SU", 3, F4),
    ("SU", 4, F4),
    ("OmegaPlus", 2, F3),
    ("OmegaPlus", 4, F2),
    ("OmegaPlus", 4, F3),
    ("OmegaMinus", 2, F2),
    ("OmegaMinus", 4, F2),
    ("OmegaMinus", 4, F3),
    ("OmegaOdd", 3, F3),
    ("OmegaOdd", 3, F5),
]


@pytest.mark.parametrize("family,d,f", EXACT_GRID)
def test_generators_certified_exactly(family, d, f):
    spec = make_spec(family, d, f)
    gens = generators(spec)
    cert = generator_certificate(spec)
    assert cert["certified"] in ("orbit", "exhaustive")
    for g in gens:
        assert preserves(spec.form, g)
        if family in ("SL", "SU"):
            assert g.det() == 1


@pytest.mark.parametrize(
    "family,d,f",
    [
        ("SL", 2, F2),
        ("SL", 2, F3),
        ("GL", 2, F3),
        ("Sp", 4, F2),
        ("SU", 3, F4),
        ("OmegaPlus", 4, F2),
        ("OmegaMinus", 4, F3),
        ("OmegaOdd", 3, F3),
    ],
)
def test_closure_count_equals_order(family, d, f):
    spec = make_spec(family, d, f)
    n = order(spec)[0]
    assert exhaustive_closure_order(f, d, generators(spec), n + 1) == n


def test_sp2_equals_sl2_as_matrix_sets():
    # in dimension 2 the symplectic and special linear groups coincide
    for f in (F2, F3, F4):
        sl = exhaustive_closure_elements(f, 2, generators(make_spec("SL", 2, f)), 10**6)
        sp = exhaustive_closure_elements(f, 2, generators(make_spec("Sp", 2, f)), 10**6)
        assert sl == sp


def test_large_flagged_generators_span_full_envelope():
    spec = make_spec("SL", 4, F3)
    cert = generator_certificate(spec)
    assert cert["certified"] == "small-case only"
    assert cert["envelope_full"]
    assert algebra_closure(list(generators(spec))).is_full


def test_order_lower_bound_grid():
    # |G| > q^(d^2/t - d) with t=1 for linear and t=2 otherwise
    grid = [
        ("SL", 3, F3, 1),
        ("SL", 4, F2, 1),
        ("Sp", 4, F3, 2),
        ("Sp", 6, F2, 2),
        ("SU", 4, F4, 2),
        ("OmegaPlus", 6, F2, 2),
        ("OmegaMinus", 4, F3, 2),
        ("OmegaOdd", 5, F3, 2),
    ]
    for family, d, f, t in grid:
        n = order(make_spec(family, d, f))[0]
        # compare n > q^(d^2/t - d) exactly: n^t > q^(d^2 - t d)
        assert n ** t > f.q ** (d * d - t * d)


def test_restricted_derived_subgroups():
    # the 4-dimensional minus-type isometry group over 2 elements is the
    # symmetric group on 5 letters; its derived subgroup is alternating
    spec = make_spec("OmegaMinus", 4, F2, restrict=True)
    assert order(spec)[0] == 60
    cert = generator_certificate(spec)
    assert cert["index_in_full"] == 2
    # odd-type in dimension 3 over 3 elements: full group C2 x Sym(4),
    # derived subgroup Alt(4)
    spec = make_spec("OmegaOdd", 3, F3, restrict=True)
    assert order(spec)[0] == 12
    for g in generators(spec):
        assert preserves(spec.form, g)


def test_restricted_cap():
    with pytest.raises(FormulaInapplicable):
        generators(make_spec("Sp", 6, F3, restrict=True))


# -- vector orbit machinery ---------------------------------------------------


def test_vector_orbit_full_space_under_sl():
    spec = make_spec("SL", 3, F2)
    mask = vector_orbit_codes(F2, generators(spec), (1, 0, 0))
    assert int(mask.sum()) == 7  # all nonzero vectors


def test_bulk_matvec_matches_apply():
    spec = make_spec("Sp", 4, F3)
    g = generators(spec)[0]
    digits = all_vector_digits(3, 4)
    img = bulk_matvec(F3, g, digits)
    for code in (0, 1, 17, 80):
        v = tuple(int(x) for x in digits[code])
        assert tuple(int(x) for x in img[code]) == g.apply(v)


def test_bulk_q_values_match_q_eval():
    form = standard_form("quadratic", 4, F3, "-")
    digits = all_vector_digits(3, 4)
    vals = bulk_q_values(form, digits)
    for code in (0, 1, 5, 33, 80):
        v = tuple(int(x) for x in digits[code])
        assert int(vals[code]) == q_eval(form, v)


def test_bulk_self_pairing_matches_evaluate():
    from smallbase.forms import evaluate

    form = standard_form("unitary", 2, F4)
    digits = all_vector_digits(4, 2)
    vals = bulk_self_pairing(form, digits)
    for code in range(16):
        v = tuple(int(x) for x in digits[code])
        assert int(vals[code]) == evaluate(form, v, v)


# -- generating pairs ----------------------------------------------------------


@pytest.mark.parametrize("k,f", [(1, F2), (2, F2), (2, F3), (3, F2), (2, F4), (3, F3)])
def test_sl_generating_pair_exact(k, f):
    pair = sl_generating_pair(k, f)
    assert len(pair) == 2
    assert all(g.det() == 1 for g in pair)
    cert = sl_pair_certificate(k, f)
    assert cert["certified"] == "exhaustive"
    n = order(make_spec("SL", k, f))[0]
    assert exhaustive_closure_order(f, k, list(pair), n + 1) == n


@pytest.mark.parametrize(
    "k,f", [(1, F2), (2, F2), (3, F2), (2, F3), (3, F3), (4, F2), (4, F3), (2, F4)]
)
def test_symmetric_pair_spans_everything(k, f):
    c, d_m = full_algebra_symmetric_pair(k, f)
    assert c.transpose() == c
    assert d_m.transpose() == d_m
    assert algebra_closure([c, d_m]).dim == k * k


@pytest.mark.parametrize("k,f", [(1, F2), (2, F2), (3, F3), (4, F2), (3, F5)])
def test_endo_pair_spans_everything(k, f):
    phi, psi = endo_generating_pair(k, f)
    assert algebra_closure([phi, psi]).dim == k * k


def test_endo_pair_small_case_shape():
    phi, psi = endo_generating_pair(2, F2)
    assert phi == MatrixFq.from_rows(F2, [[0, 1], [1, 0]])
    assert psi == MatrixFq.from_rows(F2, [[1, 0], [0, 0]])


def test_antisymmetric_pair_shapes():
    c, d_m = antisymmetric_pair(4, F3)
    assert c.transpose() == -c
    assert d_m.transpose() == -d_m
    assert c == MatrixFq.from_rows(F3, [[0, 1, 0, 0], [2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    with pytest.raises(IncompatibleParameters):
        antisymmetric_pair(1, F3)


# -- property tests -------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(EXACT_GRID), st.data())
def test_generator_products_stay_in_group(case, data):
    family, d, f = case
    spec = make_spec(family, d, f)
    gens = generators(spec)
    idx = data.draw(st.lists(st.integers(0, len(gens) - 1), min_size=1, max_size=5))
    g = gens[idx[0]]
    for i in idx[1:]:
        g = g.mul(gens[i])
    assert preserves(spec.form, g)
    if family in ("SL", "SU"):
        assert g.det() == 1


@settings(max_examples=20, deadline=None)
@given(
    st.sampled_from([(2, F3), (3, F2), (4, F2), (3, F3)]),
    st.integers(0, 10**6),
)
def test_orbit_union_is_invariant(case, seed_int):
    k, f = case
    spec = make_spec("SL", k, f)
    gens = generators(spec)
    seed = tuple((seed_int >> (3 * i)) % f.q for i in range(k))
    if not any(seed):
        seed = (1,) + (0,) * (k - 1)
    mask = vector_orbit_codes(f, gens, seed)
    digits = all_vector_digits(f.q, k)
    import numpy as np

    codes = np.nonzero(mask)[0]
    powers = np.array([f.q**i for i in range(k)], dtype=np.int64)
    for g in gens:
        img = bulk_matvec(f, g, digits[codes])
        assert mask[img @ powers].all()
