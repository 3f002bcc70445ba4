"""Permutation-group engine.

Deterministic Schreier-Sims (no randomization), induced actions on
k-subsets, partitions into equal parts, subspace orbits and vectors,
pointwise stabilizers by prescribed-base rebuilds, and an exhaustive
minimal-base search with canonical-point pruning.  Permutation images
live in numpy arrays so composition is a fancy-indexing operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DegreeCapExceeded,
    IncompatibleParameters,
    OrbitNotClosed,
    SizeCapExceeded,
)

NATURAL_DEGREE_CAP = 10**6
INDUCED_DEGREE_CAP = 10**5
MIN_BASE_NODE_CAP = 10**8


class Permutation:
    """A bijection of {0..n-1}; arr[i] is the image of i."""

    __slots__ = ("arr", "_hash")

    def __init__(self, images):
        arr = np.asarray(images, dtype=np.int64)
        if arr.ndim != 1:
            raise IncompatibleParameters("permutation images must be a flat sequence")
        n = arr.shape[0]
        seen = np.zeros(n, dtype=bool)
        if n and (arr.min() < 0 or arr.max() >= n):
            raise IncompatibleParameters("permutation images out of range")
        seen[arr] = True
        if not seen.all():
            raise IncompatibleParameters("permutation images are not a bijection")
        self.arr = arr
        self.arr.setflags(write=False)
        self._hash = None

    @classmethod
    def _raw(cls, arr: np.ndarray) -> "Permutation":
        out = object.__new__(cls)
        out.arr = arr
        out.arr.setflags(write=False)
        out._hash = None
        return out

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._raw(np.arange(n, dtype=np.int64))

    @property
    def degree(self) -> int:
        return self.arr.shape[0]

    @property
    def images(self) -> tuple:
        return tuple(int(x) for x in self.arr)

    def image(self, i: int) -> int:
        return int(self.arr[i])

    def __call__(self, i: int) -> int:
        return int(self.arr[i])

    def mul(self, other: "Permutation") -> "Permutation":
        """Apply self first, then other."""
        return Permutation._raw(other.arr[self.arr])

    def __mul__(self, other: "Permutation") -> "Permutation":
        return self.mul(other)

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.arr)
        inv[self.arr] = np.arange(self.arr.shape[0], dtype=np.int64)
        return Permutation._raw(inv)

    def is_identity(self) -> bool:
        return bool((self.arr == np.arange(self.arr.shape[0])).all())

    def smallest_moved_point(self) -> Optional[int]:
        diff = np.nonzero(self.arr != np.arange(self.arr.shape[0]))[0]
        return int(diff[0]) if diff.size else None

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.arr, other.arr)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.arr.tobytes())
        return self._hash

    def key(self) -> bytes:
        return self.arr.tobytes()

    def cycles(self) -> str:
        """Disjoint-cycle text, 1-indexed; identity prints as ()."""
        n = self.degree
        seen = [False] * n
        out = []
        for start in range(n):
            if seen[start] or self.arr[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            p = int(self.arr[start])
            while p != start:
                cyc.append(p)
                seen[p] = True
                p = int(self.arr[p])
            out.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
        return "".join(out) if out else "()"

    @staticmethod
    def from_cycles(text: str, degree: int) -> "Permutation":
        images = list(range(degree))
        body = text.strip()
        if body in ("", "()"):
            return Permutation(images)
        if not (body.startswith("(") and body.endswith(")")):
            raise IncompatibleParameters(f"bad cycle text {text!r}")
        for chunk in body[1:-1].split(")("):
            pts = [int(tok) - 1 for tok in chunk.replace(",", " ").split()]
            if any(p < 0 or p >= degree for p in pts):
                raise IncompatibleParameters("cycle point out of range")
            if len(set(pts)) != len(pts):
                raise IncompatibleParameters("repeated point inside a cycle")
            for i, p in enumerate(pts):
                images[p] = pts[(i + 1) % len(pts)]
        return Permutation(images)

    def to_json(self) -> list:
        return [int(x) for x in self.arr]

    @staticmethod
    def from_json(data) -> "Permutation":
        if isinstance(data, str):
            data = json.loads(data)
        return Permutation(data)

    def __repr__(self):
        if self.degree <= 12:
            return f"Permutation({self.cycles()}, n={self.degree})"
        return f"Permutation(n={self.degree})"


@dataclass(frozen=True)
class PermGroupSpec:
    degree: int
    generators: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if not isinstance(g, Permutation) or g.degree != self.degree:
                raise IncompatibleParameters(
                    "generators must be permutations of the stated degree"
                )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "generators": [g.to_json() for g in self.generators],
            "name": self.name,
        }

    @staticmethod
    def from_json(data) -> "PermGroupSpec":
        if isinstance(data, str):
            data = json.loads(data)
        return PermGroupSpec(
            int(data["degree"]),
            tuple(Permutation(g) for g in data["generators"]),
            data.get("name", ""),
        )


def symmetric_group_spec(m: int) -> PermGroupSpec:
    if m < 1:
        raise IncompatibleParameters("degree must be positive")
    gens = []
    if m >= 2:
        gens.append(Permutation.from_cycles("(1 2)", m))
    if m >= 3:
        gens.append(Permutation.from_cycles("(" + " ".join(str(i) for i in range(1, m + 1)) + ")", m))
    return PermGroupSpec(m, tuple(gens), name=f"Sym({m})")


def alternating_group_spec(m: int) -> PermGroupSpec:
    if m < 3:
        return PermGroupSpec(max(m, 1), (), name=f"Alt({m})")
    gens = [Permutation.from_cycles("(1 2 3)", m)]
    if m > 3:
        if m % 2:
            gens.append(
                Permutation.from_cycles("(" + " ".join(str(i) for i in range(1, m + 1)) + ")", m)
            )
        else:
            gens.append(
                Permutation.from_cycles("(" + " ".join(str(i) for i in range(2, m + 1)) + ")", m)
            )
    return PermGroupSpec(m, tuple(gens), name=f"Alt({m})")


# -- stabilizer chains ----------------------------------------------------------

# Transversal rows cached per level while the total entry count stays below
# this budget; points past the budget fall back to short parent-path walks.
_ROW_ENTRY_BUDGET = 1 << 25


class SimsFilter:
    """Online reduction of a generating set that preserves the group.

    Keyed by (smallest moved point, its image).  A colliding insert is
    multiplied by the inverse of the stored element, which strictly
    increases its smallest moved point, so insertion terminates.
    """

    def __init__(self, n: int):
        self.n = n
        self.table = {}
        self.members = []
        self._arange = np.arange(n, dtype=np.int64)

    def add(self, arr: np.ndarray) -> bool:
        g = arr
        while True:
            moved = np.nonzero(g != self._arange)[0]
            if moved.size == 0:
                return False
            i = int(moved[0])
            j = int(g[i])
            h = self.table.get((i, j))
            if h is None:
                g = g.copy()
                self.table[(i, j)] = g
                self.members.append(g)
                return True
            hinv = np.empty(self.n, dtype=np.int64)
            hinv[h] = self._arange
            g = hinv[g]


class _Level:
    """One chain level: base point, generators of this stabilizer, orbit."""

    __slots__ = ("beta", "gens", "parent_edge", "orbit_order", "rows")

    def __init__(self, beta: int, gens: list):
        self.beta = beta
        self.gens = gens  # numpy image arrays generating this level's group
        self.parent_edge = {beta: None}  # point -> (parent, gen index)
        self.orbit_order = [beta]
        self.rows = {}  # point -> transversal image array (budgeted cache)


def _level_row(lvl: _Level, point: int, n: int) -> np.ndarray:
    """Transversal image array u with u[beta] == point."""
    cached = lvl.rows.get(point)
    if cached is not None:
        return cached
    path = []
    p = point
    while p not in lvl.rows:
        edge = lvl.parent_edge[p]
        if edge is None:
            break
        path.append(edge[1])
        p = edge[0]
    arr = lvl.rows.get(p)
    if arr is None:
        arr = np.arange(n, dtype=np.int64)
    for gidx in reversed(path):
        arr = lvl.gens[gidx][arr]
    return arr


def _build_level(beta: int, gens: list, n: int) -> tuple:
    """BFS the orbit of beta, collect Schreier generators, filter them.

    Returns (level, next_gens) where next_gens generate the stabilizer of
    beta inside the group generated by gens (Schreier's lemma, reduced by
    a Sims filter).
    """
    lvl = _Level(beta, gens)
    budget = _ROW_ENTRY_BUDGET // max(n, 1)
    lvl.rows[beta] = np.arange(n, dtype=np.int64)
    filt = SimsFilter(n)
    i = 0
    while i < len(lvl.orbit_order):
        p = lvl.orbit_order[i]
        i += 1
        row_p = _level_row(lvl, p, n)
        for gidx, g in enumerate(gens):
            q = int(g[p])
            w = g[row_p]
            if q not in lvl.parent_edge:
                lvl.parent_edge[q] = (p, gidx)
                lvl.orbit_order.append(q)
                if len(lvl.rows) < budget:
                    lvl.rows[q] = w
            else:
                row_q = _level_row(lvl, q, n)
                if not np.array_equal(w, row_q):
                    qinv = np.empty(n, dtype=np.int64)
                    qinv[row_q] = np.arange(n, dtype=np.int64)
                    filt.add(qinv[w])
    return lvl, filt.members


class StabilizerChain:
    """Base, strong generators, basic orbits with transversals, exact order.

    Built level by level: each level's generator list generates exactly the
    pointwise stabilizer of the base points above it, by Schreier's lemma.
    The order is the product of the basic orbit lengths.
    """

    def __init__(self, degree: int, levels: list, input_gens: Sequence[Permutation]):
        self.degree = degree
        self._levels = levels
        self.base_points = tuple(lvl.beta for lvl in levels)
        self.order = 1
        for lvl in levels:
            self.order *= len(lvl.orbit_order)
        seen = {}
        for lvl in levels:
            for g in lvl.gens:
                seen.setdefault(g.tobytes(), g)
        self.strong_generators = tuple(Permutation._raw(a) for a in seen.values())
        for g in input_gens:
            if not self.contains(g):
                raise OrbitNotClosed("an input generator failed to sift, which is a bug")

    @property
    def basic_orbits(self) -> tuple:
        return tuple(tuple(lvl.orbit_order) for lvl in self._levels)

    def transversal_element(self, level: int, point: int) -> Permutation:
        """u with base_point(level) mapped to point."""
        lvl = self._levels[level]
        if point not in lvl.parent_edge:
            raise IncompatibleParameters("point is outside the basic orbit")
        return Permutation._raw(_level_row(lvl, point, self.degree))

    def sift(self, g: Permutation) -> Permutation:
        """Residue after stripping through the chain; identity iff member."""
        arr = g.arr
        n = self.degree
        ident = np.arange(n, dtype=np.int64)
        for lvl in self._levels:
            p = int(arr[lvl.beta])
            if p not in lvl.parent_edge:
                return Permutation._raw(arr.copy())
            u = _level_row(lvl, p, n)
            uinv = np.empty(n, dtype=np.int64)
            uinv[u] = ident
            arr = uinv[arr]
        return Permutation._raw(arr.copy())

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            return False
        return self.sift(g).is_identity()

    def generators_fixing_prefix(self, k: int) -> tuple:
        """Generators of the stabilizer of the first k base points."""
        if k >= len(self._levels):
            return ()
        return tuple(Permutation._raw(a) for a in self._levels[k].gens)

    def orbit_sizes(self) -> tuple:
        return tuple(len(lvl.orbit_order) for lvl in self._levels)


def schreier_sims(
    spec: PermGroupSpec,
    prescribed_base: Sequence[int] = (),
    degree_cap: int = NATURAL_DEGREE_CAP,
) -> StabilizerChain:
    """Deterministic stabilizer chain; no randomization anywhere.

    Base points follow the prescribed prefix, then smallest moved points.
    Each level's stabilizer generators come from Schreier's lemma, reduced
    by a Sims filter, so orbit lengths multiply to the exact order.
    """
    n = spec.degree
    if n > degree_cap:
        raise DegreeCapExceeded(f"degree {n} exceeds the cap {degree_cap}")
    for g in spec.generators:
        if g.degree != n:
            raise IncompatibleParameters("generator degree mismatch")
    seed = SimsFilter(n)
    for g in spec.generators:
        seed.add(g.arr)
    gens = seed.members
    prescribed = [int(b) for b in prescribed_base]
    for b in prescribed:
        if b < 0 or b >= n:
            raise IncompatibleParameters("prescribed base point out of range")
    levels = []
    idx = 0
    while gens or idx < len(prescribed):
        if idx < len(prescribed):
            beta = prescribed[idx]
        else:
            beta = min(
                int(np.nonzero(g != np.arange(n, dtype=np.int64))[0][0]) for g in gens
            )
        idx += 1
        lvl, gens = _build_level(beta, gens, n)
        levels.append(lvl)
    return StabilizerChain(n, levels, spec.generators)


def group_order(spec: PermGroupSpec) -> int:
    return schreier_sims(spec).order


def enumerate_elements(spec: PermGroupSpec, cap: int = 1 << 20) -> int:
    """Exhaustive element count by closure; independent of the chain."""
    n = spec.degree
    ident = Permutation.identity(n)
    seen = {ident.key()}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in spec.generators:
                y = x.mul(g)
                k = y.key()
                if k not in seen:
                    if len(seen) >= cap:
                        raise SizeCapExceeded(f"element count exceeded cap {cap}")
                    seen.add(k)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def pointwise_stabilizer(chain_or_spec, points: Sequence[int]) -> PermGroupSpec:
    """Generators of the subgroup fixing every listed point."""
    if isinstance(chain_or_spec, StabilizerChain):
        degree = chain_or_spec.degree
        gens = chain_or_spec.strong_generators
        name = "stab"
    else:
        degree = chain_or_spec.degree
        gens = chain_or_spec.generators
        name = (chain_or_spec.name or "group") + "_stab"
    pts = [int(p) for p in points]
    for p in pts:
        if p < 0 or p >= degree:
            raise IncompatibleParameters("stabilizer point out of range")
    spec = PermGroupSpec(degree, gens, name=name)
    chain = schreier_sims(spec, prescribed_base=pts)
    sub = chain.generators_fixing_prefix(len(pts))
    return PermGroupSpec(degree, sub, name=name)


def is_base(chain_or_spec, points: Sequence[int]) -> bool:
    sub = pointwise_stabilizer(chain_or_spec, points)
    return all(g.is_identity() for g in sub.generators)


# -- induced actions ---------------------------------------------------------


@dataclass(frozen=True)
class ActionSpec:
    kind: str
    m: int = 0
    k: int = 0
    a: int = 0
    b: int = 0
    matspec: object = None
    seed: object = None

    def __post_init__(self):
        kinds = ("natural", "k_subsets", "partitions", "subspace_orbit", "vectors")
        if self.kind not in kinds:
            raise IncompatibleParameters(f"unknown action kind {self.kind!r}")
        if self.kind == "k_subsets":
            if not (0 < self.k <= self.m):
                raise IncompatibleParameters("need 0 < k <= m")
        if self.kind == "partitions":
            if self.a < 1 or self.b < 1:
                raise IncompatibleParameters("need positive part count and size")
        if self.kind in ("subspace_orbit", "vectors") and self.matspec is None:
            raise IncompatibleParameters("matrix actions need a matrix group spec")
        if self.kind == "subspace_orbit" and self.seed is None:
            raise IncompatibleParameters("subspace orbits need a seed subspace")

    def expected_degree(self) -> Optional[int]:
        if self.kind == "k_subsets":
            return comb(self.m, self.k)
        if self.kind == "partitions":
            ab = self.a * self.b
            return factorial(ab) // (factorial(self.b) ** self.a * factorial(self.a))
        if self.kind == "vectors":
            return self.matspec.q ** self.matspec.d
        return None  # natural keeps the input degree; orbits are enumerated

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "k_subsets":
            out.update(m=self.m, k=self.k)
        elif self.kind == "partitions":
            out.update(a=self.a, b=self.b)
        elif self.kind in ("subspace_orbit", "vectors"):
            out["group"] = self.matspec.to_json()
            if self.kind == "subspace_orbit":
                out["seed"] = self.seed.to_json()
        return out

    @staticmethod
    def from_json(data) -> "ActionSpec":
        if isinstance(data, str):
            data = json.loads(data)
        kind = data["kind"]
        if kind == "k_subsets":
            return ActionSpec("k_subsets", m=int(data["m"]), k=int(data["k"]))
        if kind == "partitions":
            return ActionSpec("partitions", a=int(data["a"]), b=int(data["b"]))
        if kind in ("subspace_orbit", "vectors"):
            from .classical import MatGroupSpec
            from .linalg import SubspaceFq

            ms = MatGroupSpec.from_json(data["group"])
            if kind == "vectors":
                return ActionSpec("vectors", matspec=ms)
            return ActionSpec(
                "subspace_orbit", matspec=ms, seed=SubspaceFq.from_json(data["seed"])
            )
        return ActionSpec("natural")


def _induce_k_subsets(spec: PermGroupSpec, m: int, k: int, cap: int) -> PermGroupSpec:
    if spec.degree != m:
        raise IncompatibleParameters("group degree must match the subset universe")
    n = comb(m, k)
    if n > cap:
        raise DegreeCapExceeded(f"induced degree {n} exceeds cap {cap}")
    domain = list(combinations(range(m), k))
    index = {s: i for i, s in enumerate(domain)}
    gens = []
    for g in spec.generators:
        images = np.empty(n, dtype=np.int64)
        for i, s in enumerate(domain):
            images[i] = index[tuple(sorted(int(g.arr[x]) for x in s))]
        gens.append(Permutation._raw(images))
    return PermGroupSpec(n, tuple(gens), name=f"{spec.name or 'group'}_on_{k}_subsets")


def partition_domain(a: int, b: int) -> list:
    """All partitions of {0..ab-1} into a parts of size b, canonically encoded.

    Encoding: tuple of parts, each part an ascending tuple, parts ordered by
    smallest element.  The domain list is sorted, so point numbering is stable.
    """
    ab = a * b
    out = []

    def rec(remaining: frozenset, parts: list):
        if not remaining:
            out.append(tuple(parts))
            return
        anchor = min(remaining)
        rest = sorted(remaining - {anchor})
        for extra in combinations(rest, b - 1):
            part = (anchor,) + extra
            rec(remaining - set(part), parts + [part])

    rec(frozenset(range(ab)), [])
    out.sort()
    return out


def canonical_partition(parts) -> tuple:
    norm = [tuple(sorted(int(x) for x in part)) for part in parts]
    norm.sort(key=lambda t: t[0])
    return tuple(norm)


def _induce_partitions(spec: PermGroupSpec, a: int, b: int, cap: int) -> PermGroupSpec:
    ab = a * b
    if spec.degree != ab:
        raise IncompatibleParameters("group degree must match the partition universe")
    n = factorial(ab) // (factorial(b) ** a * factorial(a))
    if n > cap:
        raise DegreeCapExceeded(f"induced degree {n} exceeds cap {cap}")
    domain = partition_domain(a, b)
    index = {p: i for i, p in enumerate(domain)}
    gens = []
    for g in spec.generators:
        images = np.empty(len(domain), dtype=np.int64)
        for i, parts in enumerate(domain):
            moved = canonical_partition(
                tuple(tuple(int(g.arr[x]) for x in part) for part in parts)
            )
            images[i] = index[moved]
        gens.append(Permutation._raw(images))
    return PermGroupSpec(n, tuple(gens), name=f"{spec.name or 'group'}_on_partitions_{a}x{b}")


def _induce_subspace_orbit(matspec, seed, cap: int) -> PermGroupSpec:
    from .classical import generators as mat_generators
    from .linalg import image_under

    mats = mat_generators(matspec)
    frontier = [seed]
    seen = {seed.encode(): seed}
    while frontier:
        nxt = []
        for u in frontier:
            for g in mats:
                w = image_under(u, g)
                key = w.encode()
                if key not in seen:
                    if len(seen) >= cap:
                        raise DegreeCapExceeded(
                            f"subspace orbit exceeded the degree cap {cap}"
                        )
                    seen[key] = w
                    nxt.append(w)
        frontier = nxt
    ordered = sorted(seen)
    index = {enc: i for i, enc in enumerate(ordered)}
    subs = [seen[enc] for enc in ordered]
    n = len(ordered)
    gens = []
    for g in mats:
        images = np.empty(n, dtype=np.int64)
        for i, u in enumerate(subs):
            w = image_under(u, g)
            key = w.encode()
            if key not in index:
                raise OrbitNotClosed("orbit closure missed an image, which is a bug")
            images[i] = index[key]
        gens.append(Permutation._raw(images))
    return PermGroupSpec(n, tuple(gens), name=f"{matspec!r}_on_orbit")


def _induce_vectors(matspec, cap: int) -> PermGroupSpec:
    from .classical import all_vector_digits, bulk_matvec, generators as mat_generators

    f = matspec.field
    d = matspec.d
    n = f.q ** d
    if n > cap:
        raise DegreeCapExceeded(f"vector domain {n} exceeds cap {cap}")
    digits = all_vector_digits(f.q, d)
    powers = np.array([f.q ** i for i in range(d)], dtype=np.int64)
    gens = []
    for g in mat_generators(matspec):
        img = bulk_matvec(f, g, digits)
        gens.append(Permutation._raw(img @ powers))
    return PermGroupSpec(n, tuple(gens), name=f"{matspec!r}_on_vectors")


def induce(group, action: ActionSpec, cap: int = INDUCED_DEGREE_CAP) -> PermGroupSpec:
    """Permutation action of `group` on the domain described by `action`."""
    if action.kind == "natural":
        if not isinstance(group, PermGroupSpec):
            raise IncompatibleParameters("natural actions need a permutation group")
        if group.degree > NATURAL_DEGREE_CAP:
            raise DegreeCapExceeded("degree exceeds the natural-action cap")
        return group
    if action.kind == "k_subsets":
        return _induce_k_subsets(group, action.m, action.k, cap)
    if action.kind == "partitions":
        return _induce_partitions(group, action.a, action.b, cap)
    if action.kind == "subspace_orbit":
        return _induce_subspace_orbit(action.matspec, action.seed, cap)
    return _induce_vectors(action.matspec, cap)


def subset_index(m: int, k: int):
    """(domain list, index dict) for the k-subset action, in domain order."""
    domain = list(combinations(range(m), k))
    return domain, {s: i for i, s in enumerate(domain)}


# -- minimal-base search --------------------------------------------------------


def base_size_lower_bound(order: int, degree: int) -> int:
    """Smallest b with degree^b >= order.

    Safe lower bound: each base point divides the order by at most the
    degree, so any base has length at least this.
    """
    if degree <= 1:
        return 0 if order <= 1 else 1
    b = 0
    acc = 1
    while acc < order:
        acc *= degree
        b += 1
    return b


def _orbit_reps_and_sizes(gens: list, n: int):
    """Orbit representatives (smallest point) with orbit sizes, by union scan."""
    seen = np.zeros(n, dtype=bool)
    reps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        size = 1
        while stack:
            p = stack.pop()
            for g in gens:
                q = int(g[p])
                if not seen[q]:
                    seen[q] = True
                    size += 1
                    stack.append(q)
        reps.append((start, size))
    return reps


def _stabilizer_gens(gens: list, point: int, n: int):
    """(stabilizer generators, orbit length) via Schreier's lemma."""
    lvl, members = _build_level(point, gens, n)
    return members, len(lvl.orbit_order)


def greedy_base(spec: PermGroupSpec) -> tuple:
    """(points, orders): always-valid base by largest-orbit-first choices."""
    n = spec.degree
    seed = SimsFilter(n)
    for g in spec.generators:
        seed.add(g.arr)
    gens = seed.members
    order = schreier_sims(spec).order
    points = []
    orders = [order]
    while order > 1:
        reps = _orbit_reps_and_sizes(gens, n)
        best_p, best_size = None, 0
        for p, size in reps:
            if size > best_size:
                best_p, best_size = p, size
        points.append(best_p)
        gens, orb_len = _stabilizer_gens(gens, best_p, n)
        order //= orb_len
        orders.append(order)
    return tuple(points), tuple(orders)


def min_base_bruteforce(
    spec: PermGroupSpec, node_cap: int = MIN_BASE_NODE_CAP
) -> tuple:
    """(b, witness): exact minimal base size with a witness sequence.

    Iterative deepening on the base length; candidate points are restricted
    to orbit representatives of the current stabilizer (any base conjugates
    to one of that shape), and branches die when the remaining length cannot
    shrink the stabilizer to triviality.
    """
    n = spec.degree
    whole = schreier_sims(spec).order
    if whole == 1:
        return 0, ()
    seed = SimsFilter(n)
    for g in spec.generators:
        seed.add(g.arr)
    gens0 = seed.members
    upper_points, _ = greedy_base(spec)
    nodes = 0

    def dfs(gens, order, prefix, remaining):
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise BudgetExceeded(
                "minimal-base search budget exhausted",
                lower=len(prefix) + base_size_lower_bound(order, n) if order > 1 else len(prefix),
                upper=len(upper_points),
                witness=tuple(upper_points),
                nodes=nodes,
            )
        if order == 1:
            return prefix
        if remaining == 0:
            return None
        # within `remaining` more points the order shrinks by at most n each
        if base_size_lower_bound(order, n) > remaining:
            return None
        for p, size in _orbit_reps_and_sizes(gens, n):
            if size == 1:
                continue
            sub_gens, orb_len = _stabilizer_gens(gens, p, n)
            got = dfs(sub_gens, order // orb_len, prefix + (p,), remaining - 1)
            if got is not None:
                return got
        return None

    b = base_size_lower_bound(whole, n)
    while True:
        witness = dfs(gens0, whole, (), b)
        if witness is not None:
            return b, witness
        b += 1
        if b > len(upper_points):
            return len(upper_points), tuple(upper_points)
