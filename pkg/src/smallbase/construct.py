"""Explicit small-base constructions for the supported primitive actions.

Each public function returns a BaseCandidate: a concrete list of domain
elements (point subsets, partitions, subspaces, or vectors) together with
the claimed size bound and a step log.  Candidates never certify
themselves; the engines in `verify` re-derive every claim independently.
"""

from dataclasses import dataclass, field as dc_field
from math import comb, factorial
import json

from .errors import (
    IncompatibleParameters,
    IndependenceViolated,
    NoneExists,
    NotADivisor,
    OrbitEmpty,
    ProofCaseInapplicable,
    RadicalNotFound,
    SearchBudgetExceeded,
)
from .gf import FiniteField
from .linalg import (
    MatrixFq,
    SubspaceFq,
    image_under,
    nullspace,
    rref,
    stabilizing_algebra,
    subspace_intersect,
    subspace_sum,
)
from .forms import (
    FormData,
    evaluate,
    is_singular_vector,
    perp,
    q_eval,
    space_type,
    totally_singular,
    witt_decompose,
)
from .classical import (
    MatGroupSpec,
    antisymmetric_pair,
    endo_generating_pair,
    full_algebra_symmetric_pair,
    generators as group_generators,
    make_spec,
    sl_generating_pair,
)
from . import permgrp
from .permgrp import ActionSpec, canonical_partition

SUBSET_REPAIR_BUDGET = 20000
PARTITION_SEARCH_BUDGET = 2000
PARTITION_BRANCH = 8
PARTITION_EXACT_CAP = 5000
FALLBACK_INDUCE_CAP = 800
FALLBACK_POOL_CAP = 512
PRIMED_SEED_TRIES = 64


# -- action descriptors ----------------------------------------------------------


@dataclass(frozen=True)
class SubsetActionSpec:
    """Sym(m) acting on all k-element subsets of {0..m-1}."""

    m: int
    k: int

    def __post_init__(self):
        if not (2 <= self.k and 2 * self.k <= self.m):
            raise IncompatibleParameters("need 2 <= k <= m/2")

    @property
    def degree(self) -> int:
        return comb(self.m, self.k)

    def action(self) -> ActionSpec:
        return ActionSpec("k_subsets", m=self.m, k=self.k)


@dataclass(frozen=True)
class PartitionActionSpec:
    """Sym(a*b) acting on partitions into a parts of size b."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 2 or self.b < 2:
            raise IncompatibleParameters("need a, b >= 2")

    @property
    def m(self) -> int:
        return self.a * self.b

    @property
    def degree(self) -> int:
        return factorial(self.m) // (factorial(self.b) ** self.a * factorial(self.a))

    def action(self) -> ActionSpec:
        return ActionSpec("partitions", a=self.a, b=self.b)


@dataclass
class BaseCandidate:
    """A proposed base: domain elements plus the claimed size bound."""

    action: object  # ActionSpec or a plain dict descriptor
    elements: list
    claimed_bound: int
    bound_ref: str
    seed: int = 0
    construction_log: list = dc_field(default_factory=list)

    def __post_init__(self):
        if len(self.elements) > self.claimed_bound:
            raise SearchBudgetExceeded(
                f"emitted {len(self.elements)} elements, above the claimed "
                f"bound {self.claimed_bound} ({self.bound_ref})"
            )

    def size(self) -> int:
        return len(self.elements)

    def to_json(self) -> dict:
        if hasattr(self.action, "to_json"):
            act = self.action.to_json()
        else:
            act = dict(self.action)
        elems = []
        for e in self.elements:
            if isinstance(e, SubspaceFq):
                elems.append({"subspace": e.to_json()})
            elif isinstance(e, frozenset):
                elems.append(sorted(e))
            elif isinstance(e, tuple) and e and isinstance(e[0], tuple):
                elems.append([list(part) for part in e])
            else:
                elems.append(list(e))
        return {
            "action": act,
            "elements": elems,
            "claimed_bound": self.claimed_bound,
            "bound_ref": self.bound_ref,
            "seed": self.seed,
            "log": list(self.construction_log),
        }

    @staticmethod
    def from_json(data) -> "BaseCandidate":
        if isinstance(data, str):
            data = json.loads(data)
        act = data["action"]
        kind = act.get("kind")
        elems = []
        for e in data["elements"]:
            if isinstance(e, dict) and "subspace" in e:
                elems.append(SubspaceFq.from_json(e["subspace"]))
            elif kind == "k_subsets":
                elems.append(frozenset(int(x) for x in e))
            elif kind == "partitions":
                elems.append(canonical_partition(tuple(tuple(p) for p in e)))
            else:
                elems.append(tuple(int(x) for x in e))
        action = act
        if kind in ("k_subsets", "partitions", "subspace_orbit", "vectors"):
            action = ActionSpec.from_json(act)
        return BaseCandidate(
            action=action,
            elements=elems,
            claimed_bound=int(data["claimed_bound"]),
            bound_ref=data["bound_ref"],
            seed=int(data.get("seed", 0)),
            construction_log=list(data.get("log", [])),
        )


# -- subsets ---------------------------------------------------------------------


def subset_exact_size(m: int, k: int) -> int:
    """Exact minimal family size in the k*k <= m regime."""
    return -((2 * m - 2) // -(k + 1))


def _havel_hakimi(degrees):
    """Simple graph realizing the degree sequence, as sorted edge pairs.

    Bucket variant: highest residual degree first, partners drawn from the
    next-highest buckets, so the classical realizability argument applies.
    """
    maxd = max(degrees, default=0)
    if maxd == 0:
        return []
    buckets = [[] for _ in range(maxd + 1)]
    for v, d in enumerate(degrees):
        buckets[d].append(v)
    edges = []
    hi = maxd
    while True:
        while hi > 0 and not buckets[hi]:
            hi -= 1
        if hi == 0:
            break
        v = buckets[hi].pop()
        need = hi
        partners = []
        h = hi
        while len(partners) < need:
            while h > 0 and not buckets[h]:
                h -= 1
            if h == 0:
                raise SearchBudgetExceeded("degree sequence is not graphical")
            partners.append((buckets[h].pop(), h))
        for u, hu in partners:
            edges.append((min(u, v), max(u, v)))
            buckets[hu - 1].append(u)
    return sorted(edges)


def _membership_patterns(m, family):
    pats = [[] for _ in range(m)]
    for i, s in enumerate(family):
        for p in s:
            pats[p].append(i)
    return [tuple(x) for x in pats]


def _patterns_distinct(m, family) -> bool:
    return len(set(_membership_patterns(m, family))) == m


def _subset_base_exact(m: int, k: int, log: list):
    """Family of exactly subset_exact_size(m,k) subsets, distinct patterns.

    Shape: one uncovered point, one private point per subset, the rest of
    the slots filled by points shared between exactly two subsets (edges of
    a near-regular graph), plus at most one high-multiplicity point soaking
    up the rounding slack.
    """
    bsize = subset_exact_size(m, k)
    slack = bsize * (k + 1) - (2 * m - 2)
    if slack == 0:
        hub_width = 0
        n_edges = m - 1 - bsize
    else:
        hub_width = slack + 2
        n_edges = m - 2 - bsize
    if n_edges < 0 or hub_width > bsize:
        raise SearchBudgetExceeded("parameters leave no room for the shared-point graph")
    degrees = [k - 1 - (1 if i < hub_width else 0) for i in range(bsize)]
    if any(d < 0 for d in degrees) or sum(degrees) != 2 * n_edges:
        raise SearchBudgetExceeded("slot accounting failed for the exact-size family")
    edges = _havel_hakimi(degrees)
    # point layout: privates 0..bsize-1, edge points next, hub next, spare last
    sets = [set([i]) for i in range(bsize)]
    for idx, (u, v) in enumerate(edges):
        p = bsize + idx
        sets[u].add(p)
        sets[v].add(p)
    if hub_width:
        hub = bsize + n_edges
        for i in range(hub_width):
            sets[i].add(hub)
    family = [frozenset(s) for s in sets]
    if any(len(s) != k for s in family):
        raise SearchBudgetExceeded("exact-size family has a wrong subset size")
    if not _patterns_distinct(m, family):
        raise SearchBudgetExceeded("exact-size family failed the pattern check")
    log.append(
        f"exact-size family: {bsize} private points, {n_edges} pair points, "
        f"hub width {hub_width}, 1 uncovered point"
    )
    return family


def _digit_subsets(m: int, k: int, log: list):
    """Digit-class family rebalanced until every class has size exactly k.

    Points start with their natural digit membership patterns, which are
    distinct but give unequal class sizes.  Rebalancing edits one point's
    pattern at a time (move a membership between classes, or add/remove
    one) and only accepts an edit when the new pattern is still unused,
    so distinctness is an invariant and termination follows from the
    strictly shrinking size imbalance.
    """
    c = max(2, -(m // -k))  # ceil(m/k)
    length = 1
    while c**length < m:
        length += 1
    ncls = length * (c - 1)
    patterns = []
    for p in range(m):
        mem = set()
        for pos in range(length):
            dig = (p // c**pos) % c
            if dig:
                mem.add(pos * (c - 1) + dig - 1)
        patterns.append(frozenset(mem))
    used = set(patterns)
    col = [0] * ncls
    for s in patterns:
        for i in s:
            col[i] += 1
    log.append(f"digit classes: radix {c}, {length} positions, {ncls} sets")

    budget = SUBSET_REPAIR_BUDGET

    def apply(p, new):
        used.discard(patterns[p])
        for i in patterns[p]:
            col[i] -= 1
        patterns[p] = new
        used.add(new)
        for i in new:
            col[i] += 1

    while True:
        budget -= 1
        if budget < 0:
            raise SearchBudgetExceeded("digit-class rebalancing budget exhausted")
        deficits = [i for i in range(ncls) if col[i] < k]
        excesses = [i for i in range(ncls) if col[i] > k]
        if not deficits and not excesses:
            break
        done = False
        if deficits:
            j = deficits[0]
            for i in excesses:
                for p in range(m):
                    if i in patterns[p] and j not in patterns[p]:
                        new = patterns[p] - {i} | {j}
                        if new not in used:
                            apply(p, new)
                            done = True
                            break
                if done:
                    break
            if not done:
                for p in range(m):
                    if j not in patterns[p]:
                        new = patterns[p] | {j}
                        if new not in used:
                            apply(p, new)
                            done = True
                            break
        else:
            i = excesses[0]
            for p in range(m):
                if i in patterns[p]:
                    new = patterns[p] - {i}
                    if new not in used:
                        apply(p, new)
                        done = True
                        break
        if not done:
            raise SearchBudgetExceeded("digit-class rebalancing found no usable edit")

    log.append("rebalanced every class to size exactly k")
    family = [frozenset(p for p in range(m) if i in patterns[p]) for i in range(ncls)]
    return family, ncls


def subset_base(m: int, k: int, seed: int = 0) -> BaseCandidate:
    """Small base for the action on k-element subsets of {0..m-1}."""
    spec = SubsetActionSpec(m, k)
    log = [f"m={m} k={k}"]
    if k * k <= m:
        family = _subset_base_exact(m, k, log)
        return BaseCandidate(
            action=spec.action(),
            elements=family,
            claimed_bound=subset_exact_size(m, k),
            bound_ref="subset/exact_ceil",
            seed=seed,
            construction_log=log,
        )
    family, bound = _digit_subsets(m, k, log)
    return BaseCandidate(
        action=spec.action(),
        elements=family,
        claimed_bound=bound,
        bound_ref="subset/digit_product",
        seed=seed,
        construction_log=log,
    )


# -- partitions ------------------------------------------------------------------


def _chunk_partition(order, b):
    parts = tuple(tuple(sorted(order[i : i + b])) for i in range(0, len(order), b))
    return canonical_partition(parts)


def _partition_pool(a: int, b: int, seed: int):
    """Deterministic, seed-shuffled pool of candidate partitions."""
    m = a * b
    pool = []
    seen = set()

    def push(p):
        if p not in seen:
            seen.add(p)
            pool.append(p)

    push(_chunk_partition(list(range(m)), b))
    for s in range(1, m):
        for o in range(min(b, 3)):
            order = sorted(range(m), key=lambda p: ((p * s + o) % m, p))
            push(_chunk_partition(order, b))
    state = (seed * 2654435761 + 1) % (2**32)
    order = list(range(m))
    for _ in range(64):
        state = (state * 1664525 + 1013904223) % (2**32)
        i = state % m
        state = (state * 1664525 + 1013904223) % (2**32)
        j = state % m
        order[i], order[j] = order[j], order[i]
        push(_chunk_partition(list(order), b))
    if PartitionActionSpec(a, b).degree <= 1500:
        for p in permgrp.partition_domain(a, b):
            push(p)
    return pool


def partition_search_witness(m: int, parts_list):
    """Non-identity permutation of {0..m-1} preserving every listed partition.

    Returns None when only the identity preserves them all.  Backtracking
    over point images with per-partition block-matching constraints.
    """
    colorings = []
    for parts in parts_list:
        col = [0] * m
        for bi, blk in enumerate(parts):
            for p in blk:
                col[p] = bi
        colorings.append(col)
    n_parts = len(parts_list)

    def search(first_moved):
        img = [-1] * m
        used = [False] * m
        block_map = [dict() for _ in range(n_parts)]
        block_rev = [set() for _ in range(n_parts)]
        block_cnt = [dict() for _ in range(n_parts)]

        def try_assign(p, q):
            done = []
            ok = True
            for t in range(n_parts):
                bp, bq = colorings[t][p], colorings[t][q]
                got = block_map[t].get(bp)
                if got is None:
                    if bq in block_rev[t]:
                        ok = False
                        break
                    block_map[t][bp] = bq
                    block_rev[t].add(bq)
                    block_cnt[t][bp] = 1
                    done.append((t, True))
                elif got == bq:
                    block_cnt[t][bp] += 1
                    done.append((t, False))
                else:
                    ok = False
                    break
            if ok:
                img[p] = q
                used[q] = True
                return True
            for t, created in reversed(done):
                bp = colorings[t][p]
                if created:
                    bq = block_map[t].pop(bp)
                    block_rev[t].discard(bq)
                    block_cnt[t].pop(bp, None)
                else:
                    block_cnt[t][bp] -= 1
            return False

        def unassign(p):
            q = img[p]
            img[p] = -1
            used[q] = False
            for t in range(n_parts):
                bp = colorings[t][p]
                block_cnt[t][bp] -= 1
                if block_cnt[t][bp] == 0:
                    bq = block_map[t].pop(bp)
                    block_rev[t].discard(bq)
                    block_cnt[t].pop(bp)

        def dfs(p):
            if p == m:
                return True
            if p < first_moved:
                choices = (p,)
            elif p == first_moved:
                choices = tuple(q for q in range(first_moved + 1, m) if not used[q])
            else:
                choices = tuple(q for q in range(m) if not used[q])
            for q in choices:
                if try_assign(p, q):
                    if dfs(p + 1):
                        return True
                    unassign(p)
            return False

        if dfs(0):
            return tuple(img)
        return None

    for first in range(m - 1):
        got = search(first)
        if got is not None:
            return got
    return None


def _moved_partition(witness, parts):
    return canonical_partition(
        tuple(tuple(sorted(witness[p] for p in blk)) for blk in parts)
    )


def _witness_moves_some_partition(m, a, b, witness):
    """Faithfulness guard: does the witness move any (a,b)-partition at all?"""
    if (a, b) != (2, 2):
        return True  # the action is faithful for every other supported shape
    for parts in permgrp.partition_domain(a, b):
        if _moved_partition(witness, parts) != parts:
            return True
    return False


def _partition_dfs(m, a, b, chosen, pool, bound, budget):
    """Depth-first extension: refute each surviving preserver with a moved
    partition, branching over the first few candidates."""
    budget[0] -= 1
    if budget[0] < 0:
        raise SearchBudgetExceeded("partition witness-search budget exhausted")
    witness = partition_search_witness(m, chosen)
    if witness is not None and not _witness_moves_some_partition(m, a, b, witness):
        witness = None  # kernel element: invisible to the whole domain
    if witness is None:
        return chosen
    if len(chosen) >= bound:
        return None
    moved = [
        cand
        for cand in pool
        if cand not in chosen and _moved_partition(witness, cand) != cand
    ]
    for cand in moved[:PARTITION_BRANCH]:
        got = _partition_dfs(m, a, b, chosen + [cand], pool, bound, budget)
        if got is not None:
            return got
    return None


def _partition_exact(a, b, bound, log):
    """Exhaustive fallback on small domains: settle attainability outright.

    Returns a family within the bound, or raises NoneExists when the true
    minimum (computed by complete search) exceeds the bound."""
    act = permgrp.ActionSpec("partitions", a=a, b=b)
    if act.expected_degree() > PARTITION_EXACT_CAP:
        return None
    m = a * b
    ind = permgrp.induce(permgrp.symmetric_group_spec(m), act)
    true_min, witness = permgrp.min_base_bruteforce(ind)
    if true_min > bound:
        raise NoneExists(
            f"no {bound} partitions of shape ({a},{b}) form a base; "
            f"exhaustive search puts the minimum at {true_min}"
        )
    dom = permgrp.partition_domain(a, b)
    log.append(f"recovered a minimum family of {true_min} by exhaustive search")
    return [dom[i] for i in witness]


def partition_base(a: int, b: int, seed: int = 0) -> BaseCandidate:
    """Small base for the action on partitions into a parts of size b."""
    spec = PartitionActionSpec(a, b)
    m = spec.m
    if b == 2:
        bound, ref = 3, "partition/pairs_three"
    elif a >= b:
        bound, ref = 6, "partition/six"
    else:
        t, power = 0, 1
        while power * a <= b:
            power *= a
            t += 1
        bound, ref = t + 4, "partition/log_plus_4"
    log = [f"a={a} b={b} m={m} bound={bound}"]
    pool = _partition_pool(a, b, seed)
    budget = [PARTITION_SEARCH_BUDGET]
    chosen = _partition_dfs(m, a, b, [pool[0]], pool, bound, budget)
    if chosen is None:
        chosen = _partition_exact(a, b, bound, log)
    if chosen is None:
        raise SearchBudgetExceeded(
            f"no family within the bound {bound} found for ({a},{b})"
        )
    log.append(
        f"{len(chosen)} partitions; search proved only kernel elements preserve them"
    )
    return BaseCandidate(
        action=spec.action(),
        elements=chosen,
        claimed_bound=bound,
        bound_ref=ref,
        seed=seed,
        construction_log=log,
    )


# -- shared subspace helpers -----------------------------------------------------


def _span(field, d, vectors) -> SubspaceFq:
    return SubspaceFq.from_vectors(field, d, [list(v) for v in vectors])


def _vec_add(f, u, v):
    return tuple(f.add_c(x, y) for x, y in zip(u, v))


def _vec_sub(f, u, v):
    return tuple(f.sub_c(x, y) for x, y in zip(u, v))


def _vec_scale(f, c, u):
    return tuple(f.mul_c(c, x) for x in u)


def _zero_vec(d):
    return tuple([0] * d)


def _vec_sum(f, vectors, d):
    acc = [0] * d
    for v in vectors:
        for i, x in enumerate(v):
            if x:
                acc[i] = f.add_c(acc[i], x)
    return tuple(acc)


def _apply_small_matrix(f, mat: MatrixFq, vectors, col: int):
    """Linear combination sum_t mat[t,col] * vectors[t]."""
    d = len(vectors[0])
    acc = [0] * d
    for t in range(mat.rows):
        c = mat.at(t, col)
        if c:
            for i, x in enumerate(vectors[t]):
                if x:
                    acc[i] = f.add_c(acc[i], f.mul_c(c, x))
    return tuple(acc)


def _dedupe(subspaces):
    out = []
    seen = set()
    for s in subspaces:
        key = s.encode()
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


def _orbit_prefix(spec: MatGroupSpec, seed_sub: SubspaceFq, cap: int):
    """Orbit of the seed under the group, sorted by encoding.

    Returns (subspaces, closed): closed is False when the walk stopped at
    the cap, in which case the list is only an orbit prefix.
    """
    mats = group_generators(spec)
    seen = {seed_sub.encode(): seed_sub}
    frontier = [seed_sub]
    while frontier:
        nxt = []
        for u in frontier:
            for g in mats:
                w = image_under(u, g)
                key = w.encode()
                if key not in seen:
                    if len(seen) >= cap:
                        return [seen[kk] for kk in sorted(seen)], False
                    seen[key] = w
                    nxt.append(w)
        frontier = nxt
    return [seen[kk] for kk in sorted(seen)], True


def _combo_matrix(f, basis, coeffs) -> MatrixFq:
    d = basis[0].rows
    entries = [0] * (d * d)
    for c, mat in zip(coeffs, basis):
        if c:
            for i, x in enumerate(mat.entries):
                if x:
                    entries[i] = f.add_c(entries[i], f.mul_c(c, x))
    return MatrixFq(f, d, d, entries)


def _restrict_rows(f, basis, sub: SubspaceFq):
    rows = []
    for mat in basis:
        row = []
        for u in sub.basis_vectors():
            row.extend(sub.reduce_vector(mat.apply(u)))
        rows.append(row)
    return rows


def _dim_after(f, basis, sub: SubspaceFq) -> int:
    rows = _restrict_rows(f, basis, sub)
    if not any(any(r) for r in rows):
        return len(basis)
    _, rank, _ = rref(MatrixFq.from_rows(f, rows))
    return len(basis) - rank


def _basis_after(f, basis, sub: SubspaceFq):
    rows = _restrict_rows(f, basis, sub)
    if not any(any(r) for r in rows):
        return list(basis)
    coeff_vectors = nullspace(MatrixFq.from_rows(f, rows).transpose())
    return [_combo_matrix(f, basis, c) for c in coeff_vectors]


def _greedy_algebra_descent(spec, pool, budget, start, log, start_basis=None):
    """Extend `start` with pool subspaces, greedily shrinking the joint
    stabilizing algebra toward the scalars."""
    f, d = spec.field, spec.d
    chosen = list(start)
    if start_basis is not None:
        basis = list(start_basis)
    elif chosen:
        basis = list(stabilizing_algebra(chosen, field=f, dim=d).basis)
    else:
        basis = [MatrixFq.elementary(f, d, i, j) for i in range(d) for j in range(d)]
    chosen_keys = {u.encode() for u in chosen}
    while len(basis) > 1 and len(chosen) < budget:
        best = None
        best_dim = len(basis)
        for cand in pool:
            if cand.encode() in chosen_keys:
                continue
            dim_a = _dim_after(f, basis, cand)
            if dim_a < best_dim:
                best, best_dim = cand, dim_a
                if best_dim == 1:
                    break
        if best is None:
            log.append(f"greedy descent stalled at algebra dimension {len(basis)}")
            break
        basis = _basis_after(f, basis, best)
        chosen.append(best)
        chosen_keys.add(best.encode())
        log.append(f"greedy pick {len(chosen)}: algebra dimension {len(basis)}")
    return chosen


def _fallback_subspace_base(
    spec: MatGroupSpec, seed_sub: SubspaceFq, budget: int, log: list
):
    """Outside the constructive cases: exact search when small, greedy otherwise."""
    domain, closed = _orbit_prefix(spec, seed_sub, FALLBACK_INDUCE_CAP)
    if closed:
        action = ActionSpec("subspace_orbit", matspec=spec, seed=seed_sub)
        group = permgrp.induce(None, action, cap=len(domain) + 1)
        try:
            size, witness = permgrp.min_base_bruteforce(group)
            log.append(
                f"fallback: exact search on the induced orbit "
                f"(degree {len(domain)}) found size {size}"
            )
            return [domain[i] for i in witness]
        except Exception as exc:  # budget blowups fall through to greedy
            log.append(f"fallback exact search unavailable ({exc}); going greedy")
    pool, pool_closed = _orbit_prefix(spec, seed_sub, FALLBACK_POOL_CAP)
    log.append(
        "fallback: greedy over "
        + ("the full orbit" if pool_closed else "a bounded orbit prefix")
        + f" of {len(pool)}"
    )
    return _greedy_algebra_descent(spec, pool, budget, [], log)


def _polish_within_orbit(spec: MatGroupSpec, elements, budget: int, log: list):
    """Top up a constructed family from its own orbit until the joint
    stabilizing algebra is scalar, within the claimed bound."""
    f, d = spec.field, spec.d
    elements = _dedupe(elements)
    alg = stabilizing_algebra(elements, field=f, dim=d)
    if alg.dim == 1 or len(elements) >= budget:
        return elements
    log.append(f"family leaves an algebra of dimension {alg.dim}; topping up")
    pool, _ = _orbit_prefix(spec, elements[0], FALLBACK_POOL_CAP)
    return _greedy_algebra_descent(
        spec, pool, budget, elements, log, start_basis=list(alg.basis)
    )


# -- all k-dimensional subspaces (no form) ---------------------------------------


def subspace_base_all(d: int, k: int, field: FiniteField, seed: int = 0) -> BaseCandidate:
    """Base for the action on all k-dimensional subspaces of F_q^d."""
    if not (1 <= k and 2 * k <= d):
        raise IncompatibleParameters("need 1 <= k <= d/2")
    f = field
    a, r = divmod(d, k)
    log = [f"d={d} k={k} q={f.q}: {a} direct summands, remainder {r}"]

    def e(i):
        v = [0] * d
        v[i] = 1
        return tuple(v)

    def x(part, s):
        return e(part * k + s)

    parts = [_span(f, d, [x(i, s) for s in range(k)]) for i in range(a)]
    w_sum = _span(f, d, [_vec_sum(f, [x(i, s) for i in range(a)], d) for s in range(k)])
    elements = parts + [w_sum]
    log.append("diagonal sum space added")
    if k >= 2:
        gamma, delta = sl_generating_pair(k, f)
    else:
        gamma = delta = MatrixFq.identity(f, 1)
    block2 = [x(1, s) for s in range(k)]
    tw1 = _span(f, d, [
        _vec_add(f, x(0, s), _apply_small_matrix(f, gamma, block2, s))
        for s in range(k)
    ])
    tw2 = _span(f, d, [
        _vec_add(f, x(0, s), _apply_small_matrix(f, delta, block2, s))
        for s in range(k)
    ])
    elements += [tw1, tw2]
    log.append("twisted diagonals for the small generating pair added")
    if r > 0:
        tail = [e(a * k + j) for j in range(r)]
        w4 = _span(f, d, tail + [x(0, s) for s in range(r, k)])
        w5 = _span(f, d, [
            _vec_add(f, tail[j], x(1, j)) for j in range(r)
        ] + [x(1, s) for s in range(r, k)])
        elements += [w4, w5]
        log.append("remainder-block spaces added")
    elements = _dedupe(elements)
    spec = make_spec("SL", d, f)
    elements = _polish_within_orbit(spec, elements, a + 5, log)
    return BaseCandidate(
        action=ActionSpec("subspace_orbit", matspec=spec, seed=elements[0]),
        elements=elements,
        claimed_bound=a + 5,
        bound_ref="subspace/a_plus_5",
        seed=seed,
        construction_log=log,
    )


def pairs_base(d: int, k: int, field: FiniteField, seed: int = 0) -> BaseCandidate:
    """Base for the action on (U, W) pairs with U of dimension k inside W.

    Fixing every member of a k-subspace base forces scalars, and scalars
    fix both components of every pair, so the same subspaces work here.
    """
    if not (1 <= k and 2 * k < d):
        raise IncompatibleParameters("pairs need k < d/2")
    inner = subspace_base_all(d, k, field, seed=seed)
    log = list(inner.construction_log)
    log.append(
        "reused on the pairs domain: scalars fixing all k-subspaces fix every pair"
    )
    return BaseCandidate(
        action={"kind": "subspace_pairs", "d": d, "k": k, "p": field.p, "e": field.e},
        elements=inner.elements,
        claimed_bound=(d // k) + 11,
        bound_ref="pairs/d_over_k_plus_11",
        seed=seed,
        construction_log=log,
    )


# -- orbit machinery for forms ----------------------------------------------------


def _orbit_tag(spec: MatGroupSpec, sub: SubspaceFq):
    """Type tag used for orbit matching."""
    if totally_singular(spec.form, sub):
        return ("totsing", sub.dim)
    try:
        return ("type", space_type(spec.form, sub))
    except Exception:
        return ("degenerate", sub.dim)


def _type_target(spec: MatGroupSpec, k: int, sign):
    """Normalize the requested nondegenerate-orbit type descriptor."""
    kind = spec.form.kind
    if kind == "symplectic":
        if k % 2:
            raise OrbitEmpty("symplectic spaces have no odd nondegenerate subspaces")
        return ("symplectic", k, None)
    if kind == "unitary":
        return ("unitary", k, None)
    if kind == "quadratic":
        if k % 2 == 0:
            tag = sign if sign in ("+", "-") else "+"
            return ("quadratic", k, tag)
        if isinstance(sign, tuple):
            return ("quadratic", k, sign)
        want_square = True if sign is None else (sign == "square")
        return ("quadratic", k, ("o", want_square))
    raise IncompatibleParameters("nondegenerate orbits need a form")


def _witt_of_type(target):
    kind, k, tag = target
    if kind == "symplectic":
        return k // 2, 0
    if kind == "unitary":
        return k // 2, k % 2
    if tag == "+":
        return k // 2, 0
    if tag == "-":
        return k // 2 - 1, 2
    return (k - 1) // 2, 1


def _vectors_of_subspace(sub: SubspaceFq):
    return [tuple(v) for v in sub.basis_vectors()]


def _find_type_subspace(spec: MatGroupSpec, within: SubspaceFq, target, seed: int):
    """Nondegenerate subspace of the requested isometry type inside `within`."""
    form = spec.form
    f = spec.field
    l_t, m_t = _witt_of_type(target)
    try:
        dec = witt_decompose(form, within, seed=seed)
    except Exception as exc:
        raise ProofCaseInapplicable(f"ambient decomposition failed: {exc}")
    if dec.witt_index < l_t:
        raise ProofCaseInapplicable("not enough hyperbolic room for the orbit type")
    base_vecs = [v for pair in dec.hyperbolic_pairs[:l_t] for v in pair]
    leftover_pairs = dec.hyperbolic_pairs[l_t:]
    leftover_aniso = list(dec.anisotropic_basis)
    if m_t == 0:
        cand = _span(f, form.d, base_vecs)
        try:
            if cand.dim == 2 * l_t and space_type(form, cand) == target:
                return cand
        except Exception:
            pass
        raise ProofCaseInapplicable("hyperbolic block has the wrong type tag")
    singles = list(leftover_aniso)
    for xx, yy in leftover_pairs:
        for c in range(1, f.q):
            singles.append(_vec_add(f, xx, _vec_scale(f, c, yy)))
    if m_t == 1:
        for u in singles:
            cand = _span(f, form.d, base_vecs + [u])
            if cand.dim != 2 * l_t + 1:
                continue
            try:
                if space_type(form, cand) == target:
                    return cand
            except Exception:
                continue
        raise ProofCaseInapplicable("no anisotropic line matched the orbit type")
    # Anisotropic plane wanted: scan pairs from a structured pool.  Cross-pair
    # mixtures are essential (same-pair combinations are mutually orthogonal,
    # so they can never span a nondegenerate plane across two hyperbolic pairs).
    pool = list(leftover_aniso)
    for i, (xi, yi) in enumerate(leftover_pairs):
        for c in range(1, f.q):
            u0 = _vec_add(f, xi, _vec_scale(f, c, yi))
            pool.append(u0)
            for j, (xj, yj) in enumerate(leftover_pairs):
                if j == i:
                    continue
                pool.append(_vec_add(f, u0, xj))
                pool.append(_vec_add(f, u0, yj))
            for av in leftover_aniso:
                pool.append(_vec_add(f, u0, av))
    pool = [v for v in dict.fromkeys(pool) if any(v)]
    budget = 20000
    for i in range(len(pool)):
        for j in range(i + 1, len(pool)):
            budget -= 1
            if budget < 0:
                raise ProofCaseInapplicable("anisotropic plane scan budget exhausted")
            cand = _span(f, form.d, base_vecs + [pool[i], pool[j]])
            if cand.dim != 2 * l_t + 2:
                continue
            try:
                if space_type(form, cand) == target:
                    return cand
            except Exception:
                continue
    raise ProofCaseInapplicable("no anisotropic plane matched the orbit type")


def _perp_within(spec: MatGroupSpec, within: SubspaceFq, sub: SubspaceFq) -> SubspaceFq:
    return subspace_intersect(within, perp(spec.form, sub))


def _orthogonal_type_decomposition(spec: MatGroupSpec, k, target, count, seed):
    """count pairwise-orthogonal subspaces of the target type, plus the rest."""
    within = SubspaceFq.full(spec.field, spec.d)
    parts = []
    for s in range(count):
        sub = _find_type_subspace(spec, within, target, seed + s)
        parts.append(sub)
        within = _perp_within(spec, within, sub)
    return parts, within


def _hyperbolic_data(spec, sub, seed=0):
    dec = witt_decompose(spec.form, sub, seed=seed)
    xs = [p[0] for p in dec.hyperbolic_pairs]
    ys = [p[1] for p in dec.hyperbolic_pairs]
    return xs, ys, list(dec.anisotropic_basis)


def _shuffled(items, seed):
    out = list(items)
    state = ((2 * seed + 1) * 2654435761) % (2**32)
    for i in range(len(out) - 1, 0, -1):
        state = (state * 1664525 + 1013904223) % (2**32)
        j = (state >> 7) % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def _assemble_pairs(form, f, order, want_l):
    """Greedy pairwise-orthogonal hyperbolic pairs from an ordered vector pool."""
    xs, ys = [], []

    def orth(v):
        return all(evaluate(form, w, v) == 0 for w in xs + ys)

    for x in order:
        if len(xs) == want_l:
            break
        if not orth(x):
            continue
        for y in order:
            if y == x or not orth(y):
                continue
            e = evaluate(form, x, y)
            if e == 0:
                continue
            yn = _vec_scale(f, form.sigma_c(f.inv_c(e)), y)
            if evaluate(form, x, yn) != f.one():
                continue
            xs.append(x)
            ys.append(yn)
            break
    return (xs, ys) if len(xs) == want_l else None


def _primed_hyperbolic(spec, sub, want_l, log, tag):
    """Second hyperbolic family inside `sub`, jointly spanning with the first."""
    f = spec.field
    form = spec.form
    xs0, ys0, _ = _hyperbolic_data(spec, sub, seed=0)
    first = _span(f, spec.d, xs0[:want_l] + ys0[:want_l])
    if f.q**sub.dim <= 40000:
        sing = [
            tuple(v)
            for v in sub.all_vectors()
            if any(v) and is_singular_vector(form, v)
        ]
        for attempt in range(PRIMED_SEED_TRIES):
            got = _assemble_pairs(form, f, _shuffled(sing, attempt), want_l)
            if got is None:
                continue
            xs, ys = got
            cand = _span(f, spec.d, xs + ys)
            if cand.dim == 2 * want_l and subspace_sum(first, cand).dim == sub.dim:
                log.append(f"{tag}: complementary hyperbolic family (try {attempt})")
                return xs, ys, []
    for s in range(1, PRIMED_SEED_TRIES):
        try:
            xs, ys, aniso = _hyperbolic_data(spec, sub, seed=s)
        except Exception:
            continue
        if len(xs) < want_l:
            continue
        cand = _span(f, spec.d, xs[:want_l] + ys[:want_l])
        if subspace_sum(first, cand).dim == sub.dim:
            log.append(f"{tag}: second decomposition found at seed {s}")
            return xs[:want_l], ys[:want_l], aniso
    raise ProofCaseInapplicable("no jointly spanning second decomposition found")


# -- nondegenerate orbits ----------------------------------------------------------


def subspace_base_nondeg(
    spec: MatGroupSpec, k: int, sign=None, seed: int = 0
) -> BaseCandidate:
    """Base for the orbit of nondegenerate k-subspaces of the given type."""
    d, f = spec.d, spec.field
    if not (1 <= k and 2 * k <= d):
        raise IncompatibleParameters("need 1 <= k <= d/2")
    if spec.form.kind == "none":
        raise IncompatibleParameters("nondegenerate orbits need a form")
    target = _type_target(spec, k, sign)
    # half-dimension split: when the requested type has more hyperbolic room
    # than its orthogonal complement, build on the complement orbit and map
    # everything back through perp (isometries commute with perp)
    if (
        spec.form.kind == "quadratic"
        and d == 2 * k
        and k % 2 == 0
        and target[2] == "+"
        and spec.form.sign == "-"
    ):
        inner = subspace_base_nondeg(spec, k, sign="-", seed=seed)
        elements = _dedupe([perp(spec.form, u) for u in inner.elements])
        log = list(inner.construction_log)
        log.append("mapped through perp onto the plus-type orbit")
        for sub in elements:
            if space_type(spec.form, sub) != target:
                raise ProofCaseInapplicable("perp image left the requested orbit")
        return BaseCandidate(
            action=ActionSpec("subspace_orbit", matspec=spec, seed=elements[0]),
            elements=elements,
            claimed_bound=inner.claimed_bound,
            bound_ref=inner.bound_ref,
            seed=seed,
            construction_log=log,
        )
    l_x, m_x = _witt_of_type(target)
    a = (d - 1) // k
    r = d - a * k
    log = [f"{spec!r} k={k} type={target}: a={a} r={r} l={l_x} defect={m_x}"]
    bound = (d // k) + 11

    def finish(elements, ref, bnd):
        elements = _dedupe(elements)
        tag0 = _orbit_tag(spec, elements[0])
        for sub in elements:
            if _orbit_tag(spec, sub) != tag0:
                raise ProofCaseInapplicable("emitted subspaces straddle orbits")
        return BaseCandidate(
            action=ActionSpec("subspace_orbit", matspec=spec, seed=elements[0]),
            elements=elements,
            claimed_bound=bnd,
            bound_ref=ref,
            seed=seed,
            construction_log=log,
        )

    try:
        if l_x == 0:
            elements, ref, bnd = _nondeg_anisotropic_case(spec, k, target, log)
            elements = _polish_within_orbit(spec, elements, bnd, log)
            return finish(elements, ref, bnd)
        elements = _nondeg_generic_case(spec, k, target, a, r, l_x, m_x, log)
        elements = _polish_within_orbit(spec, elements, bound, log)
        return finish(elements, "nondeg/d_over_k_plus_11", bound)
    except ProofCaseInapplicable as exc:
        log.append(f"constructive case unavailable ({exc}); using fallback")
        rep = _find_type_subspace(spec, SubspaceFq.full(f, d), target, seed)
        elements = _fallback_subspace_base(spec, rep, bound, log)
        return finish(elements, "nondeg/d_over_k_plus_11", bound)


def _nondeg_generic_case(spec, k, target, a, r, l, m, log):
    f, d = spec.field, spec.d
    form = spec.form
    if a < 1:
        raise ProofCaseInapplicable("no room for even one orbit member")
    parts, rest = _orthogonal_type_decomposition(spec, k, target, a, 0)
    log.append(f"{a} orthogonal orbit members found; leftover dimension {rest.dim}")
    xs, ys, aniso = [], [], []
    for sub in parts:
        hx, hy, ha = _hyperbolic_data(spec, sub)
        if len(hx) != l or len(ha) != m:
            raise ProofCaseInapplicable("orbit member decomposed with unexpected shape")
        xs.append(hx)
        ys.append(hy)
        aniso.append(ha)
    if rest.dim:
        try:
            tx, ty, _ = _hyperbolic_data(spec, rest)
        except Exception:
            tx, ty = [], []
    else:
        tx, ty = [], []
    l_tail = min(l, len(tx))
    if a == 1 and l_tail < l:
        raise ProofCaseInapplicable(
            "two-member references need full hyperbolic depth in the leftover"
        )
    xs.append([tx[i] if i < l_tail else _zero_vec(d) for i in range(l)])
    ys.append([ty[i] if i < l_tail else _zero_vec(d) for i in range(l)])
    u = [_vec_sum(f, [xs[s][i] for s in range(a + 1)], d) for i in range(l)]
    v = [_vec_sum(f, [ys[s][i] for s in range(a + 1)], d) for i in range(l)]
    m_part = aniso[0]
    second = 1  # the second member when a >= 2, the leftover when a == 1

    def mk(vectors):
        sub = _span(f, d, [w for w in vectors if any(w)] + m_part)
        if sub.dim != 2 * l + m:
            raise ProofCaseInapplicable("constructed space has the wrong dimension")
        return sub

    w1 = mk(u + ys[0])
    w2 = mk(xs[0] + v)
    w3 = mk(u + ys[second])
    w4 = mk(xs[second] + v)
    w5 = mk(xs[0] + [_vec_add(f, ys[0][i], xs[second][i]) for i in range(l)])
    log.append("sum spaces and the synchronizer added")
    if l >= 2:
        phi, psi = endo_generating_pair(l, f)
    else:
        phi = psi = MatrixFq.identity(f, 1)
    sx = xs[second]
    w6 = mk([
        _vec_add(f, xs[0][i], _apply_small_matrix(f, phi, sx, i)) for i in range(l)
    ] + ys[0])
    w7 = mk([
        _vec_add(f, xs[0][i], _apply_small_matrix(f, psi, sx, i)) for i in range(l)
    ] + ys[0])
    log.append("endomorphism twists added")
    elements = parts + [w1, w2, w3, w4, w5, w6, w7]
    if m > 0:
        primed_x, primed_y = [], []
        for s, sub in enumerate(parts):
            px, py, _ = _primed_hyperbolic(spec, sub, l, log, f"member {s}")
            primed_x.append(px)
            primed_y.append(py)
        if l_tail:
            ptx, pty, _ = _primed_hyperbolic(spec, rest, l_tail, log, "leftover")
        else:
            ptx, pty = [], []
        primed_x.append([ptx[i] if i < l_tail else _zero_vec(d) for i in range(l)])
        primed_y.append([pty[i] if i < l_tail else _zero_vec(d) for i in range(l)])
        ph = _span(f, d, [w for w in primed_x[0] + primed_y[0] if any(w)])
        pm = _vectors_of_subspace(subspace_intersect(parts[0], perp(form, ph)))

        def mkp(vectors):
            sub = _span(f, d, [w for w in vectors if any(w)] + pm)
            if sub.dim != 2 * l + m:
                raise ProofCaseInapplicable("primed space has the wrong dimension")
            return sub

        pu = [_vec_sum(f, [primed_x[s][i] for s in range(a + 1)], d) for i in range(l)]
        pv = [_vec_sum(f, [primed_y[s][i] for s in range(a + 1)], d) for i in range(l)]
        elements += [
            mkp(pu + primed_y[0]),
            mkp(primed_x[0] + pv),
            mkp(pu + primed_y[second]),
            mkp(primed_x[second] + pv),
        ]
        log.append("second-decomposition synchronizers added")
    return elements


def _nondeg_anisotropic_case(spec, k, target, log):
    """Orbit of anisotropic planes in an orthogonal space."""
    f, d = spec.field, spec.d
    form = spec.form
    if form.kind != "quadratic" or k != 2:
        raise ProofCaseInapplicable("anisotropic case only covers orthogonal planes")
    parts = rest = None
    for count in range(d // k, 2, -1):
        try:
            parts, rest = _orthogonal_type_decomposition(spec, k, target, count, 0)
            break
        except ProofCaseInapplicable:
            continue
    if parts is None:
        raise ProofCaseInapplicable("anisotropic recipe needs at least three members")
    a = len(parts)
    log.append(f"{a} orthogonal anisotropic planes; leftover dimension {rest.dim}")
    alpha = None
    xs, ys = [], []
    for sub in parts:
        vecs = [tuple(v) for v in sub.all_vectors()]
        found = None
        for x in vecs:
            if not any(x) or q_eval(form, x) != 1:
                continue
            for y in vecs:
                if not any(y) or evaluate(form, x, y) != 1:
                    continue
                if _span(f, d, [x, y]).dim != 2:
                    continue  # collinear pairs satisfy the pairing test too
                if alpha is None or q_eval(form, y) == alpha:
                    found = (x, y)
                    break
            if found:
                break
        if found is None:
            raise ProofCaseInapplicable("no matching plane basis with the shared value")
        x, y = found
        if alpha is None:
            alpha = q_eval(form, y)
        xs.append(x)
        ys.append(y)
    tail = _vectors_of_subspace(rest)
    x_tail = tail[0] if len(tail) >= 1 else _zero_vec(d)
    y_tail = tail[1] if len(tail) >= 2 else _zero_vec(d)
    log.append(f"plane bases fixed with shared values 1 and {alpha}")

    def adjust(base_sum, inside, want):
        for z in inside.all_vectors():
            cand = _vec_add(f, base_sum, tuple(z))
            if q_eval(form, cand) == want:
                return cand
        raise ProofCaseInapplicable("no value-adjusting vector in the plane")

    u1 = adjust(_vec_sum(f, [xs[s] for s in range(1, a)] + [x_tail], d), parts[0], 1)
    v1 = adjust(
        _vec_sum(f, [ys[s] for s in range(1, a)] + [y_tail], d), parts[0], alpha
    )
    u2 = adjust(_vec_sum(f, [xs[s] for s in range(a - 1)], d), parts[a - 1], 1)
    v2 = adjust(_vec_sum(f, [ys[s] for s in range(a - 1)], d), parts[a - 1], alpha)
    log.append("normalized sum vectors built")

    def mk(u_vec, w_vec):
        sub = _span(f, d, [u_vec, w_vec])
        if sub.dim != 2:
            raise ProofCaseInapplicable("sum vectors collapsed to a line")
        return sub

    elements = parts + [
        mk(u1, ys[1]),
        mk(u1, ys[2]),
        mk(xs[1], v1),
        mk(xs[2], v1),
        mk(u2, ys[0]),
        mk(u2, ys[1]),
        mk(xs[0], v2),
        mk(xs[1], v2),
    ]
    return elements, "nondeg/d_over_k_plus_8", (d // k) + 8


# -- totally singular orbits --------------------------------------------------------


def subspace_base_totsing(spec: MatGroupSpec, k: int, seed: int = 0) -> BaseCandidate:
    """Base for an orbit of totally singular k-subspaces."""
    d, f = spec.d, spec.field
    form = spec.form
    if form.kind == "none":
        raise IncompatibleParameters("totally singular orbits need a form")
    dec = witt_decompose(form)
    l_v, m_v = dec.witt_index, dec.witt_defect
    if k > l_v:
        raise OrbitEmpty("Witt index below the requested dimension")
    if k < 1:
        raise IncompatibleParameters("need k >= 1")
    log = [f"{spec!r} k={k}: witt index {l_v}, defect {m_v}"]
    xs_all = [p[0] for p in dec.hyperbolic_pairs]
    ys_all = [p[1] for p in dec.hyperbolic_pairs]
    aniso = list(dec.anisotropic_basis)

    def finish(elements, ref, bnd):
        elements = _dedupe(elements)
        for sub in elements:
            if not totally_singular(form, sub) or sub.dim != k:
                raise ProofCaseInapplicable("emitted space is not in the orbit")
        return BaseCandidate(
            action=ActionSpec("subspace_orbit", matspec=spec, seed=elements[0]),
            elements=elements,
            claimed_bound=bnd,
            bound_ref=ref,
            seed=seed,
            construction_log=log,
        )

    seed_rep = _span(f, d, xs_all[:k])
    if k == 1:
        bnd = 2 * l_v + 10
        log.append("singular lines: searched directly")
        elements = _fallback_subspace_base(spec, seed_rep, bnd, log)
        return finish(elements, "totsing/2a_plus_10", bnd)
    plus_full = form.kind == "quadratic" and form.sign == "+" and d == 2 * k
    if plus_full:
        bnd = 6 if k % 2 == 0 else 9
        ref = "totsing/split_even_six" if k % 2 == 0 else "totsing/split_odd_nine"
        try:
            if k % 2 == 0:
                elements = _totsing_split_even(spec, k, xs_all, ys_all, log)
            else:
                elements = _totsing_split_odd(spec, k, xs_all, ys_all, log)
            return finish(elements, ref, bnd)
        except ProofCaseInapplicable as exc:
            log.append(f"split special case unavailable ({exc}); using fallback")
            elements = _fallback_subspace_base(spec, seed_rep, bnd, log)
            return finish(elements, ref, bnd)
    a, r = divmod(l_v, k)
    bound = 2 * a + 10
    try:
        elements = _totsing_generic(spec, k, a, r, xs_all, ys_all, aniso, log)
        elements = _polish_within_orbit(spec, elements, bound, log)
        return finish(elements, "totsing/2a_plus_10", bound)
    except ProofCaseInapplicable as exc:
        log.append(f"constructive case unavailable ({exc}); using fallback")
        elements = _fallback_subspace_base(spec, seed_rep, bound, log)
        return finish(elements, "totsing/2a_plus_10", bound)


def _singular_correction(spec, x, y, u):
    """c with x + c*y + u singular (hyperbolic pair x,y; u orthogonal to both)."""
    f, form = spec.field, spec.form
    for c in range(f.q):
        cand = _vec_add(f, _vec_add(f, x, _vec_scale(f, c, y)), u)
        if form.kind == "quadratic":
            if q_eval(form, cand) == 0:
                return c
        elif evaluate(form, cand, cand) == 0:
            return c
    raise ProofCaseInapplicable("no singular correction over the field")


def _totsing_generic(spec, k, a, r, xs_all, ys_all, aniso, log):
    f, d = spec.field, spec.d
    form = spec.form
    if a < 1:
        raise ProofCaseInapplicable("Witt index too small for even one full member")
    if form.kind == "symplectic":
        cmat, dmat = full_algebra_symmetric_pair(k, f)
    else:
        cmat, dmat = antisymmetric_pair(k, f)
        if dmat.is_zero():
            raise ProofCaseInapplicable(
                "alternating twist degenerates in dimension two"
            )

    def x_of(s, i):
        if s < a:
            return xs_all[s * k + i]
        return xs_all[a * k + i] if i < r else _zero_vec(d)

    def y_of(s, i):
        if s < a:
            return ys_all[s * k + i]
        return ys_all[a * k + i] if i < r else _zero_vec(d)

    n_blocks = a + (1 if r else 0)
    elements = []
    for s in range(a):
        elements.append(_span(f, d, [x_of(s, i) for i in range(k)]))
        elements.append(_span(f, d, [y_of(s, i) for i in range(k)]))
    if r:
        elements.append(_span(
            f, d, [x_of(a, i) for i in range(r)] + [x_of(0, i) for i in range(r, k)]
        ))
        elements.append(_span(
            f, d, [y_of(a, i) for i in range(r)] + [y_of(0, i) for i in range(r, k)]
        ))
    u_vec = [_vec_sum(f, [x_of(s, i) for s in range(n_blocks)], d) for i in range(k)]
    v_vec = [_vec_sum(f, [y_of(s, i) for s in range(n_blocks)], d) for i in range(k)]
    elements.append(_span(f, d, u_vec))
    elements.append(_span(f, d, v_vec))
    log.append("block spans and diagonal sums added")

    def twisted(mat, flip, blocks):
        cols = []
        for j in range(k):
            acc = [0] * d
            for s in range(blocks):
                base = y_of(s, j) if flip else x_of(s, j)
                for idx, val in enumerate(base):
                    if val:
                        acc[idx] = f.add_c(acc[idx], val)
                for i in range(k):
                    cij = mat.at(i, j)
                    if cij:
                        other = x_of(s, i) if flip else y_of(s, i)
                        for idx, val in enumerate(other):
                            if val:
                                acc[idx] = f.add_c(acc[idx], f.mul_c(cij, val))
            cols.append(tuple(acc))
        return _span(f, d, cols)

    def twisted_ok(mat, flip):
        # the partial tail block can break singularity; drop it when it does
        cand = twisted(mat, flip, n_blocks)
        if totally_singular(form, cand) and cand.dim == k:
            return cand
        cand = twisted(mat, flip, a)
        if totally_singular(form, cand) and cand.dim == k:
            return cand
        raise ProofCaseInapplicable("twisted span left the orbit")

    if form.kind == "symplectic":
        ident = MatrixFq.identity(f, k)
        elements += [
            twisted_ok(ident, True),
            twisted_ok(cmat, True),
            twisted_ok(dmat, True),
        ]
        log.append("symmetric-pair twists added")
    else:
        elements += [
            twisted_ok(cmat, False),
            twisted_ok(cmat, True),
            twisted_ok(dmat, False),
            twisted_ok(dmat, True),
        ]
        log.append("alternating-pair twists added")
    if aniso:
        mdim = len(aniso)
        if mdim > k:
            raise ProofCaseInapplicable("defect exceeds the member dimension")
        zs = []
        for j in range(mdim):
            c = _singular_correction(spec, x_of(0, j), y_of(0, j), aniso[j])
            zs.append(_vec_add(
                f, _vec_add(f, x_of(0, j), _vec_scale(f, c, y_of(0, j))), aniso[j]
            ))
        if mdim == 2:
            gamma = f.neg_c(evaluate(form, zs[0], zs[1]))
            zs[1] = _vec_add(f, zs[1], _vec_scale(f, gamma, y_of(0, 0)))
            if evaluate(form, zs[0], zs[1]) != 0:
                raise ProofCaseInapplicable("pairing correction failed")
        for j in range(mdim, k):
            zs.append(x_of(0, j))
        tail_space = _span(f, d, zs)
        if not totally_singular(form, tail_space) or tail_space.dim != k:
            raise ProofCaseInapplicable("defect-covering space is not in the orbit")
        elements.append(tail_space)
        comp = []
        for i in range(k):
            w = list(zs[i])
            for t in range(k):
                ct = cmat.at(t, i)
                if ct:
                    yv = y_of(0, t)
                    for idx, val in enumerate(yv):
                        if val:
                            w[idx] = f.add_c(w[idx], f.mul_c(ct, val))
            comp.append(tuple(w))
        comp_space = _span(f, d, comp)
        if not totally_singular(form, comp_space) or comp_space.dim != k:
            raise ProofCaseInapplicable("companion space is not in the orbit")
        elements.append(comp_space)
        log.append("defect-covering spaces added")
    return elements


def _totsing_split_even(spec, k, xs_all, ys_all, log):
    f, d = spec.field, spec.d
    if k % 2 or k < 4:
        raise ProofCaseInapplicable("even split case needs k in {4, 6, ...}")
    cmat, dmat = antisymmetric_pair(k, f)
    if dmat.is_zero():
        raise ProofCaseInapplicable("alternating twist degenerates in dimension two")

    def twisted(mat, flip):
        cols = []
        for j in range(k):
            base = ys_all[j] if flip else xs_all[j]
            acc = list(base)
            for i in range(k):
                cij = mat.at(i, j)
                if cij:
                    other = xs_all[i] if flip else ys_all[i]
                    for idx, val in enumerate(other):
                        if val:
                            acc[idx] = f.add_c(acc[idx], f.mul_c(cij, val))
            cols.append(tuple(acc))
        return _span(f, d, cols)

    elements = [
        _span(f, d, xs_all[:k]),
        _span(f, d, ys_all[:k]),
        twisted(cmat, False),
        twisted(cmat, True),
        twisted(dmat, False),
        twisted(dmat, True),
    ]
    for i, u in enumerate(elements):
        for w in elements[i + 1 :]:
            if subspace_intersect(u, w).dim % 2 != k % 2:
                raise ProofCaseInapplicable("intersection parity violated")
    log.append("even split-orbit family built")
    return elements


def _totsing_split_odd(spec, k, xs_all, ys_all, log):
    f, d = spec.field, spec.d
    if k % 2 == 0 or k < 3:
        raise ProofCaseInapplicable("odd split case needs k in {3, 5, ...}")
    x0, y0 = xs_all[0], ys_all[0]
    ux = xs_all[1:k]
    uy = ys_all[1:k]
    ksub = k - 1
    cmat, dmat = antisymmetric_pair(ksub, f)

    def sub_twisted(mat, flip):
        cols = []
        for j in range(ksub):
            base = uy[j] if flip else ux[j]
            acc = list(base)
            for i in range(ksub):
                cij = mat.at(i, j)
                if cij:
                    other = ux[i] if flip else uy[i]
                    for idx, val in enumerate(other):
                        if val:
                            acc[idx] = f.add_c(acc[idx], f.mul_c(cij, val))
            cols.append(tuple(acc))
        return cols

    u_families = [list(ux), list(uy), sub_twisted(cmat, False), sub_twisted(cmat, True)]
    if not dmat.is_zero():
        u_families += [sub_twisted(dmat, False), sub_twisted(dmat, True)]
    log.append(f"inner split family of {len(u_families)} spaces on the complement")
    elements = [_span(f, d, [x0] + list(vecs)) for vecs in u_families]
    elements.append(_span(f, d, [y0, uy[0]] + list(ux[1:])))
    elements.append(_span(f, d, [y0, ux[0]] + list(uy[1:])))
    elements.append(_span(
        f, d, [_vec_add(f, x0, ux[0]), _vec_sub(f, y0, uy[0])] + list(ux[1:])
    ))
    for i, u in enumerate(elements):
        for w in elements[i + 1 :]:
            if subspace_intersect(u, w).dim % 2 != 1:
                raise ProofCaseInapplicable("intersection parity violated")
    log.append("odd split-orbit family built")
    return elements


# -- vector bases ----------------------------------------------------------------


def symplectic_vector_base(d: int, field: FiniteField, seed: int = 0) -> BaseCandidate:
    """The standard basis as a vector base for the symplectic group."""
    if d % 2:
        raise IncompatibleParameters("symplectic dimension must be even")
    f = field
    spec = make_spec("Sp", d, f)
    elements = []
    for i in range(d):
        v = [0] * d
        v[i] = 1
        elements.append(tuple(v))
    return BaseCandidate(
        action=ActionSpec("vectors", matspec=spec),
        elements=elements,
        claimed_bound=d,
        bound_ref="affine_symplectic/dim",
        seed=seed,
        construction_log=[f"standard basis of F_{f.q}^{d}"],
    )


def symplectic_insufficiency_witness(u_sub: SubspaceFq, form: FormData) -> MatrixFq:
    """Non-identity isometry fixing the given hyperplane pointwise.

    Sends y to y + x where x spans the radical of the restriction to the
    hyperplane and y completes the basis.
    """
    f = form.field
    d = form.d
    if u_sub.dim != d - 1:
        raise IncompatibleParameters("witness needs a hyperplane")
    rad = subspace_intersect(u_sub, perp(form, u_sub))
    if rad.dim < 1:
        raise RadicalNotFound("restriction is nondegenerate, which cannot happen")
    x = tuple(rad.basis_vectors()[0])
    y = None
    for i in range(d):
        cand = [0] * d
        cand[i] = 1
        if not u_sub.contains_vector(cand):
            y = tuple(cand)
            break
    if y is None:
        raise RadicalNotFound("hyperplane claims to contain the whole space")
    basis = [list(v) for v in u_sub.basis_vectors()] + [list(y)]
    bmat = MatrixFq.from_rows(f, basis).transpose()
    images = [list(v) for v in u_sub.basis_vectors()] + [list(_vec_add(f, y, x))]
    imat = MatrixFq.from_rows(f, images).transpose()
    return imat @ bmat.inverse()


def subfield_base(d: int, field: FiniteField, r: int, seed: int = 0) -> BaseCandidate:
    """Vectors pinning the subfield-matrix part of a scalar-extended group."""
    f = field
    if r < 1 or f.e % r:
        raise NotADivisor("the subfield degree must divide the field degree")
    action = {"kind": "vectors_subfield", "d": d, "p": f.p, "e": f.e, "r": r}
    if r == 1:
        elements = []
        for i in range(d):
            v = [0] * d
            v[i] = 1
            elements.append(tuple(v))
        return BaseCandidate(
            action=action,
            elements=elements,
            claimed_bound=d + 2,
            bound_ref="subfield/d_over_r_plus_2",
            seed=seed,
            construction_log=["degree-one subfield: standard basis"],
        )
    lam = _subfield_basis(f, r)
    blocks, l = divmod(d, r)
    elements = []
    for i in range(blocks):
        v = [0] * d
        for j in range(r):
            v[i * r + j] = lam[j]
        elements.append(tuple(v))
    if l:
        v = [0] * d
        for j in range(l):
            v[blocks * r + j] = lam[j]
        elements.append(tuple(v))
    return BaseCandidate(
        action=action,
        elements=elements,
        claimed_bound=-(d // -r) + 2,
        bound_ref="subfield/d_over_r_plus_2",
        seed=seed,
        construction_log=[
            f"blocks of {r} coordinates carrying a basis of the field over "
            f"its index-{r} subfield"
        ],
    )


def _subfield_basis(f: FiniteField, r: int):
    """Elements of F_q forming a basis over the subfield of index r."""
    e0 = f.e // r
    q0 = f.p**e0
    sub = [a for a in range(f.q) if f.pow_c(a, q0) == a]
    if len(sub) != q0:
        raise NotADivisor("subfield enumeration came out the wrong size")
    basis = []
    spanned = {0}
    for a in range(1, f.q):
        if a in spanned:
            continue
        basis.append(a)
        new = set(spanned)
        for s in spanned:
            for c in sub:
                new.add(f.add_c(s, f.mul_c(c, a)))
        spanned = new
        if len(basis) == r:
            break
    if len(basis) != r:
        raise NotADivisor("could not assemble a subfield basis")
    return basis


def tensor_base(
    strong_base_of_h2, n1: int, field: FiniteField, seed: int = 0
) -> BaseCandidate:
    """Vector base for a tensor-product action from a strong base on one side."""
    f = field
    ys = [tuple(v) for v in strong_base_of_h2]
    if not ys:
        raise IndependenceViolated("empty strong base")
    if n1 < 1:
        raise IncompatibleParameters("need n1 >= 1")
    n2 = len(ys[0])
    b = len(ys)
    _, rank, _ = rref(MatrixFq.from_rows(f, [list(v) for v in ys]))
    if rank != b:
        raise IndependenceViolated("strong-base vectors must be independent")
    if n1 > b:
        raise IncompatibleParameters("need n1 <= size of the strong base")
    r, s = divmod(b, n1)
    dim = n1 * n2
    log = [f"n1={n1} n2={n2} strong size {b}: {r} full blocks, remainder {s}"]

    def tensor(i1, y):
        v = [0] * dim
        for j, c in enumerate(y):
            v[i1 * n2 + j] = c
        return tuple(v)

    def block_vec(i):
        width = n1 if i < r else s
        acc = [0] * dim
        for t in range(width):
            w = tensor(t, ys[i * n1 + t])
            for idx, val in enumerate(w):
                if val:
                    acc[idx] = f.add_c(acc[idx], val)
        return tuple(acc)

    n_blocks = r + (1 if s else 0)
    vs = [block_vec(i) for i in range(n_blocks)]
    if n1 >= 2:
        cmat, dmat = sl_generating_pair(n1, f)
    else:
        cmat = dmat = MatrixFq.identity(f, 1)

    def left_twist(mat, vec):
        out = [0] * dim
        for i1 in range(n1):
            for j in range(n2):
                val = vec[i1 * n2 + j]
                if val:
                    for t in range(n1):
                        c = mat.at(t, i1)
                        if c:
                            out[t * n2 + j] = f.add_c(out[t * n2 + j], f.mul_c(c, val))
        return tuple(out)

    total = _vec_sum(f, vs, dim)
    elements = list(vs) + [left_twist(cmat, total), left_twist(dmat, total)]
    out, seen = [], set()
    for v in elements:
        if v not in seen:
            seen.add(v)
            out.append(v)
    log.append("block sums and the twisted totals emitted")
    return BaseCandidate(
        action={"kind": "vectors_tensor", "n1": n1, "n2": n2, "p": f.p, "e": f.e},
        elements=out,
        claimed_bound=r + 3,
        bound_ref="tensor/bstar_over_n1_plus_3",
        seed=seed,
        construction_log=log,
    )
