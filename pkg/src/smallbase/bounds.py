"""Numeric side of the base-size story: named inequalities and sweeps.

Every inequality of the form  b <= alpha*(log|G|/log n) + c  with integer
alpha and c is decided exactly by big-integer comparison, so a reported
"holds" never hinges on floating point.  Quantities that are genuinely
transcendental (the natural-log interval around the subset log ratio)
are evaluated in directed-rounding fixed-point arithmetic instead, with
lower bounds rounded down and upper bounds rounded up.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .errors import (
    EmptyInput,
    FormulaInapplicable,
    IncompatibleParameters,
    MissingField,
    SmallbaseError,
)

FRAC_BITS = 64


# ---------------------------------------------------------------------------
# exact logarithms with directed rounding


def _log2_scaled(n: int, frac_bits: int, round_up: bool) -> int:
    """log2(n) in fixed point (scaled by 2**frac_bits), directed rounding."""
    if n < 1:
        raise IncompatibleParameters("logarithm of a non-positive integer")
    guard = frac_bits + 24
    bl = n.bit_length() - 1
    shifted = n << guard
    mant, rem = divmod(shifted, 1 << bl)
    if round_up and rem:
        mant += 1
    acc = 0
    one = 1 << guard
    for _ in range(frac_bits):
        sq = mant * mant
        mant, rem = divmod(sq, one)
        if round_up and rem:
            mant += 1
        acc <<= 1
        if mant >> (guard + 1):
            mant >>= 1
            acc |= 1
    if round_up:
        acc += 1
    return (bl << frac_bits) + acc


def log2_interval(n: int, frac_bits: int = FRAC_BITS):
    """(lo, hi) Fractions bracketing log2(n)."""
    lo = Fraction(_log2_scaled(n, frac_bits, False), 1 << frac_bits)
    hi = Fraction(_log2_scaled(n, frac_bits, True), 1 << frac_bits)
    return lo, hi


def log2_value(n: int, frac_bits: int = FRAC_BITS) -> Fraction:
    """Downward-rounded log2(n) at the given fixed-point precision."""
    return Fraction(_log2_scaled(n, frac_bits, False), 1 << frac_bits)


class FracInterval:
    """Closed interval with Fraction endpoints; arithmetic stays outward."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if self.lo > self.hi:
            raise IncompatibleParameters("interval endpoints out of order")

    @classmethod
    def log2_of(cls, n: int) -> "FracInterval":
        lo, hi = log2_interval(n)
        return cls(lo, hi)

    @classmethod
    def ln_of(cls, n) -> "FracInterval":
        """Natural log of a positive integer or Fraction."""
        if isinstance(n, FracInterval):
            low, high = n.lo, n.hi
        else:
            low = high = Fraction(n)
        if low <= 0:
            raise IncompatibleParameters("natural log of a non-positive value")

        def ln_frac(x: Fraction, up: bool) -> Fraction:
            a = cls.log2_of(x.numerator) if x.numerator > 1 else cls(0)
            b = cls.log2_of(x.denominator) if x.denominator > 1 else cls(0)
            l2 = (a - b) * _LN2
            return l2.hi if up else l2.lo

        return cls(ln_frac(low, False), ln_frac(high, True))

    def __add__(self, other):
        other = _as_iv(other)
        return FracInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_iv(other)
        return FracInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _as_iv(other) - self

    def __mul__(self, other):
        other = _as_iv(other)
        prods = [self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi]
        return FracInterval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_iv(other)
        if other.lo <= 0 <= other.hi:
            raise IncompatibleParameters("interval division through zero")
        quots = [self.lo / other.lo, self.lo / other.hi,
                 self.hi / other.lo, self.hi / other.hi]
        return FracInterval(min(quots), max(quots))

    def __rtruediv__(self, other):
        return _as_iv(other) / self

    def strictly_below(self, other) -> bool:
        return self.hi < _as_iv(other).lo

    def midpoint_float(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __repr__(self):
        return f"FracInterval({float(self.lo):.6f}, {float(self.hi):.6f})"


def _as_iv(x) -> FracInterval:
    return x if isinstance(x, FracInterval) else FracInterval(x)


def _ln2_interval() -> FracInterval:
    # ln 2 from the fast-converging series ln 2 = 2*atanh(1/3)
    # partial sums rounded outward: terms 2/( (2i+1) 3^(2i+1) )
    lo = Fraction(0)
    for i in range(40):
        lo += Fraction(2, (2 * i + 1) * 3 ** (2 * i + 1))
    # remainder is below the first omitted term times the geometric factor 9/8
    tail = Fraction(2, 81 * 3**81) * Fraction(9, 8)
    return FracInterval(lo, lo + tail)


_LN2 = _ln2_interval()


# ---------------------------------------------------------------------------
# exact comparisons for the linear-in-log-ratio bounds


def holds_log_linear(b: int, alpha: int, c: int, order: int, degree: int) -> bool:
    """Exact check of  b <= alpha*(log(order)/log(degree)) + c."""
    if degree < 2 or order < 1:
        raise IncompatibleParameters("degenerate order or degree")
    lhs = b - c
    if lhs <= 0:
        return True
    return degree**lhs <= order**alpha


def holds_strict_lower(b: int, order: int, degree: int) -> bool:
    """Exact check of the information floor  b > log(order)/log(degree)."""
    if degree < 2 or order < 1:
        raise IncompatibleParameters("degenerate order or degree")
    return degree**b > order


def log_ratio_value(order: int, degree: int) -> FracInterval:
    return FracInterval.log2_of(order) / FracInterval.log2_of(degree)


# ---------------------------------------------------------------------------
# domain sizes for the classical orbits


def gaussian_binomial(d: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of a d-dimensional space."""
    if k < 0 or k > d:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def totally_singular_degree(family: str, d: int, k: int, q: int) -> int:
    """Count of totally singular k-subspaces for the standard forms.

    Polar-space product formulas; the unitary case runs over the square
    root of the field size.  Raises when the orbit is empty.
    """
    if k < 1:
        raise IncompatibleParameters("subspace dimension must be positive")
    if family == "Sp":
        if d % 2:
            raise IncompatibleParameters("symplectic spaces have even dimension")
        w = d // 2
        if k > w:
            raise FormulaInapplicable("dimension exceeds the maximal singular one")
        return _polar_count(k, w, q, e=1)
    if family == "OmegaPlus":
        w = d // 2
        if k > w:
            raise FormulaInapplicable("dimension exceeds the maximal singular one")
        return _polar_count(k, w, q, e=0)
    if family == "OmegaMinus":
        w = d // 2 - 1
        if k > w:
            raise FormulaInapplicable("dimension exceeds the maximal singular one")
        return _polar_count(k, w, q, e=2)
    if family == "OmegaOdd":
        w = (d - 1) // 2
        if k > w:
            raise FormulaInapplicable("dimension exceeds the maximal singular one")
        return _polar_count(k, w, q, e=1)
    if family == "SU":
        q0 = _integer_sqrt(q)
        w = d // 2
        if k > w:
            raise FormulaInapplicable("dimension exceeds the maximal singular one")
        n = 1
        for i in range(k):
            a = q0 ** (d - 2 * i) - (-1) ** (d - 2 * i)
            b = q0 ** (d - 2 * i - 1) - (-1) ** (d - 2 * i - 1)
            n *= a * b
            assert n % (q0 ** (2 * (i + 1)) - 1) == 0
            n //= q0 ** (2 * (i + 1)) - 1
        return n
    raise IncompatibleParameters(f"no singular-subspace count for family {family!r}")


def _polar_count(k: int, w: int, q: int, e: int) -> int:
    """[w choose k]_q times prod (q^(w-1-i+e) + 1) over i < k."""
    n = gaussian_binomial(w, k, q)
    for i in range(k):
        n *= q ** (w - 1 - i + e) + 1
    return n


def _integer_sqrt(q: int) -> int:
    r = int(round(q**0.5))
    if r * r != q:
        raise IncompatibleParameters("unitary field size must be a square")
    return r


def containment_pairs_degree(d: int, k: int, q: int) -> int:
    """Pairs (U, W) with dim U = k, dim W = d-k, U inside W."""
    if not 0 < k < d - k:
        raise IncompatibleParameters("need k < d - k for distinct pair dimensions")
    return gaussian_binomial(d, k, q) * gaussian_binomial(d - k, k, q)


# ---------------------------------------------------------------------------
# instances and reports


KNOWN_TAGS = (
    "primitive", "not_full_alternating", "alternating_socle", "almost_simple",
    "nonaffine", "diagonal", "affine", "linear", "linear_primitive",
    "subset", "subset_exact", "subset_digits", "partition",
    "subspace_orbit", "pairs", "hyperplane",
    "subfield", "tensor", "affine_symplectic",
)


@dataclass(frozen=True)
class BoundInstance:
    """One concrete group action with everything a bound check needs."""

    instance_id: str
    order: int
    degree: int
    tags: tuple
    b_exact: Optional[int] = None
    b_upper: Optional[int] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for t in self.tags:
            if t not in KNOWN_TAGS:
                raise IncompatibleParameters(f"unknown instance tag {t!r}")
        if self.order < 1 or self.degree < 2:
            raise IncompatibleParameters("order and degree must be nontrivial")

    def b_used(self) -> Optional[int]:
        return self.b_exact if self.b_exact is not None else self.b_upper


@dataclass
class BoundReport:
    instance_id: str
    log2_order: float
    log2_degree: float
    b_exact: Optional[int]
    b_upper: Optional[int]
    bound_values: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "log2_order": self.log2_order,
            "log2_degree": self.log2_degree,
            "b_exact": self.b_exact,
            "b_upper": self.b_upper,
            "bound_values": dict(self.bound_values),
            "violations": list(self.violations),
        }


def _need(params: dict, *names):
    out = []
    for name in names:
        if name not in params:
            raise MissingField(f"bound evaluation needs parameter {name!r}")
        out.append(params[name])
    return out


def eval_bounds(instance: BoundInstance) -> BoundReport:
    """Evaluate every named bound applicable to the instance's tags.

    Upper-bound checks compare against the certified size (exact value
    when known); the information floor and the subspace log-ratio floor
    do not need a base at all beyond validity of the certified one.
    """
    order, degree = instance.order, instance.degree
    tags = set(instance.tags)
    params = instance.params
    b = instance.b_used()
    values: dict = {}
    violations: list = []
    ratio = log_ratio_value(order, degree)

    def record(slug: str, rhs_display, holds: bool, detail: str = ""):
        values[slug] = rhs_display
        if not holds:
            violations.append({"slug": slug, "detail": detail or "inequality failed"})

    def upper(slug: str, alpha: int, c: int):
        if b is None:
            return
        rhs = ratio * alpha + c
        record(slug, float(rhs.hi), holds_log_linear(b, alpha, c, order, degree),
               f"b={b} exceeds {alpha}*log|G|/log n + {c}")

    if b is not None:
        record("lower/order_vs_degree", ratio.midpoint_float(),
               holds_strict_lower(b, order, degree),
               f"b={b} fails the information floor")

    if "primitive" in tags:
        upper("primitive/two_log_plus_24", 2, 24)
    if "primitive" in tags and "not_full_alternating" in tags and b is not None:
        rhs_ok = b <= 25 or b * b <= degree
        record("primitive/sqrt_or_25", max(25.0, degree**0.5), rhs_ok,
               f"b={b} exceeds max(sqrt(n), 25)")
    if "alternating_socle" in tags:
        upper("alternating_socle/two_log_plus_16", 2, 16)
    if "almost_simple" in tags:
        upper("almost_simple/two_log_plus_16", 2, 16)
    if "nonaffine" in tags:
        upper("nonaffine/two_log_plus_24", 2, 24)
    if "diagonal" in tags:
        upper("diagonal/log_plus_3", 1, 3)
    if "affine" in tags:
        upper("affine/two_log_plus_16", 2, 16)
    if "linear" in tags:
        upper("linear/two_log_plus_17", 2, 17)
    if "linear_primitive" in tags and b is not None:
        holds = b <= 15 or holds_log_linear(b, 2, 9, order, degree)
        record("linear_primitive/max_15_or_two_log_plus_9",
               max(15.0, float((ratio * 2 + 9).hi)), holds,
               f"b={b} exceeds both 15 and 2*log|G|/log n + 9")

    if "subset" in tags:
        m, k = _need(params, "m", "k")
        if "subset_exact" in tags:
            target = -((2 * m - 2) // -(k + 1))
            values["subset/exact_ceil"] = float(target)
            if instance.b_exact is not None and instance.b_exact != target:
                violations.append({
                    "slug": "subset/exact_ceil",
                    "detail": f"exact minimum {instance.b_exact} != formula {target}",
                })
            elif instance.b_exact is None and b is not None and b < target:
                violations.append({
                    "slug": "subset/exact_ceil",
                    "detail": f"certified size {b} beats the proven minimum {target}",
                })
        t_ceil = -(m // -k)
        length = 1
        while t_ceil**length < m:
            length += 1
        digits_bound = length * (t_ceil - 1)
        if b is not None:
            record("subset/digit_product", float(digits_bound), b <= digits_bound,
                   f"b={b} exceeds the digit-product bound {digits_bound}")
        upper("subset/two_log_plus_16", 2, 16)

    if "partition" in tags:
        a, bb = _need(params, "a", "b")
        if bb == 2:
            if b is not None:
                record("partition/pairs_three", 3.0, b <= 3,
                       f"b={b} exceeds the cited pair-partition bound 3")
        elif a >= bb:
            if b is not None:
                record("partition/six", 6.0, b <= 6,
                       f"b={b} exceeds 6")
        else:
            if b is not None:
                # b <= log_a(bb) + 4, decided exactly in integers
                holds = b - 4 <= 0 or a ** (b - 4) <= bb
                lg = FracInterval.log2_of(bb) / FracInterval.log2_of(a)
                record("partition/log_plus_4", float((lg + 4).hi), holds,
                       f"b={b} exceeds log_a(b) + 4")
        upper("partition/log_plus_5", 1, 5)

    if "subspace_orbit" in tags:
        d, k, t = _need(params, "d", "k", "t")
        if 2 * k <= d:
            holds = (d - t * k <= 0) or order ** (t * k) >= degree ** (d - t * k)
            record("subspace/log_ratio_floor", float(Fraction(d, t * k) - 1), holds,
                   "log|G|/log|X| fell below d/(t*k) - 1")
            if b is not None:
                record("subspace/d_over_k_plus_11", float(Fraction(d, k) + 11),
                       k * b <= d + 11 * k,
                       f"b={b} exceeds d/k + 11")

    if "pairs" in tags:
        d, k = _need(params, "d", "k")
        if b is not None:
            record("pairs/d_over_k_plus_11", float(Fraction(d, k) + 11),
                   k * b <= d + 11 * k,
                   f"b={b} exceeds d/k + 11")
            upper("pairs/two_log_plus_12", 2, 12)

    if "hyperplane" in tags:
        (dim,) = _need(params, "d")
        if b is not None:
            record("hyperplane/dim_bound", float(dim), b <= dim,
                   f"b={b} exceeds the ambient dimension {dim}")
            upper("hyperplane/two_log_plus_3", 2, 3)

    if "subfield" in tags:
        d, r = _need(params, "d", "r")
        if b is not None:
            record("subfield/d_over_r_plus_2", float(Fraction(d, r) + 2),
                   r * b <= d + 2 * r,
                   f"b={b} exceeds d/r + 2")

    if "tensor" in tags:
        n1, bstar = _need(params, "n1", "bstar")
        if b is not None:
            record("tensor/bstar_over_n1_plus_3", float(Fraction(bstar, n1) + 3),
                   n1 * b <= bstar + 3 * n1,
                   f"b={b} exceeds bstar/n1 + 3")

    if "affine_symplectic" in tags:
        (d,) = _need(params, "d")
        if instance.b_exact is not None:
            record("affine_symplectic/dim", float(d), instance.b_exact == d,
                   f"exact vector base size {instance.b_exact} != dimension {d}")

    lo_o, hi_o = log2_interval(order)
    lo_d, hi_d = log2_interval(degree)
    return BoundReport(
        instance_id=instance.instance_id,
        log2_order=float((lo_o + hi_o) / 2),
        log2_degree=float((lo_d + hi_d) / 2),
        b_exact=instance.b_exact,
        b_upper=instance.b_upper,
        bound_values=values,
        violations=violations,
    )


# ---------------------------------------------------------------------------
# the subset log-ratio interval and the asymptotic ratio


def subset_log_ratio_interval(m: int, k: int):
    """(lower, upper, actual) for ln(m!) / ln(binomial(m, k)).

    lower and upper are the closed-form envelope values; actual is the
    exact big-integer log ratio.  All three are returned as outward
    intervals, and for k strictly below m/2 the envelope is asserted to
    hold strictly.
    """
    if not 2 <= k <= m // 2:
        raise IncompatibleParameters("need 2 <= k <= m/2")
    t = Fraction(m, k)
    ln_t = FracInterval.ln_of(t)
    ln_m = FracInterval.ln_of(m)
    lower = (t / (ln_t + 1)) * (ln_m - 1)
    upper = (t / ln_t) * ln_m
    order = factorial(m)
    degree = factorial(m) // (factorial(k) * factorial(m - k))
    actual = log_ratio_value(order, degree)
    if 2 * k < m:
        if not (lower.strictly_below(actual) and actual.strictly_below(upper)):
            raise SmallbaseError(
                f"log-ratio envelope failed at (m, k) = ({m}, {k})")
    return lower, upper, actual


def ratio_asymptotic(k: int, m_list: Sequence[int]):
    """Base-size-to-log-ratio products and their distance from 2k/(k+1).

    Uses the exact small-k base-size formula, so every m must satisfy
    k*k <= m.
    """
    target = Fraction(2 * k, k + 1)
    rows = []
    for m in m_list:
        if k * k > m:
            raise FormulaInapplicable(
                f"exact base-size formula needs k^2 <= m, got ({m}, {k})")
        bmk = -((2 * m - 2) // -(k + 1))
        degree = factorial(m) // (factorial(k) * factorial(m - k))
        ratio = FracInterval.log2_of(degree) * bmk / FracInterval.log2_of(factorial(m))
        dist = ratio - target
        gap = max(abs(dist.lo), abs(dist.hi))
        rows.append({
            "m": m,
            "b": bmk,
            "ratio": ratio.midpoint_float(),
            "target": float(target),
            "distance": float(gap),
        })
    return rows


# ---------------------------------------------------------------------------
# the rounded-ratio identity for affine symplectic groups


def _sp_order(d: int, q: int) -> int:
    m = d // 2
    n = q ** (m * m)
    for i in range(1, m + 1):
        n *= q ** (2 * i) - 1
    return n


def sp_floor_identity(d: int, q: int) -> bool:
    """Whether the affine symplectic group hits the rounded-ratio identity.

    The affine group on n = q^d points has exact base size d + 1; the
    identity says d + 1 equals round(2 log|G| / log n) - 2, which the
    source material promises only for large enough q.  The nearest
    integer is found by exact comparisons.
    """
    if d < 2 or d % 2:
        raise IncompatibleParameters("dimension must be even and at least 2")
    order = q**d * _sp_order(d, q)
    degree = q**d
    b = d + 1
    z = b + 2
    # z == round(2 log|G|/log n)  iff  z - 1/2 <= 2 log|G|/log n <= z + 1/2
    left = degree ** (2 * z - 1) <= order**4
    right = order**4 <= degree ** (2 * z + 1)
    return left and right


def sp_floor_scan(d: int, q_list: Sequence[int]):
    """Identity verdict per field size plus the first size where it holds."""
    verdicts = {}
    first = None
    for q in q_list:
        v = sp_floor_identity(d, q)
        verdicts[q] = v
        if v and first is None:
            first = q
    return {"verdicts": verdicts, "first_holds": first}


# ---------------------------------------------------------------------------
# sweeping grids of instances


def survey(instances: Sequence[BoundInstance]):
    """Evaluate bounds across instances, never aborting on a bad row."""
    rows = []
    total_violations = 0
    for inst in instances:
        row = {"instance_id": inst.instance_id}
        try:
            rep = eval_bounds(inst)
            row.update(rep.to_json())
            total_violations += len(rep.violations)
        except SmallbaseError as ex:
            row["error"] = f"{type(ex).__name__}: {ex}"
            total_violations += 1
        rows.append(row)
    rows.sort(key=lambda r: r["instance_id"])
    return SurveyReport(rows=rows, violation_count=total_violations)


@dataclass
class SurveyReport:
    rows: list
    violation_count: int

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def to_json(self) -> dict:
        return {"rows": self.rows, "violations": self.violation_count}

    def write_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, default=str)
            fh.write("\n")

    def write_csv(self, path: str) -> None:
        slugs = sorted({s for r in self.rows
                        for s in r.get("bound_values", {})})
        cols = ["instance_id", "log2_order", "log2_degree",
                "b_exact", "b_upper"] + slugs + ["violations", "error"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in self.rows:
                vals = r.get("bound_values", {})
                w.writerow(
                    [r.get("instance_id"), r.get("log2_order"),
                     r.get("log2_degree"), r.get("b_exact"), r.get("b_upper")]
                    + [vals.get(s, "") for s in slugs]
                    + [json.dumps(r.get("violations", [])), r.get("error", "")])
