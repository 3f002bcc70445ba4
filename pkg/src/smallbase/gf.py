"""Exact arithmetic in finite fields F_{p^e}.

Elements are handled internally as integer codes in [0, p^e): the code of an
element with polynomial-basis coefficients (c_0, ..., c_{e-1}) is
sum c_i * p^i (little-endian base p).  The same integer is the textual/JSON
format of the element.  A thin FieldElement wrapper exposes the coefficient
view; all hot loops work on raw codes through the FiniteField methods.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

from .errors import DivisionByZero, NotADivisor, NotPrime, SizeCapExceeded

SIZE_CAP = 2 ** 20

# mul/inv tables are precomputed for fields up to this size
_TABLE_CAP = 2 ** 10


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


# -- polynomial helpers over Z_p, coefficient lists little-endian --------------


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul_mod(a, b, modulus, p):
    """(a*b) mod modulus over Z_p. modulus monic, little-endian."""
    e = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce
    for i in range(len(prod) - 1, e - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(e):
                prod[i - e + j] = (prod[i - e + j] - c * modulus[j]) % p
    return _poly_trim(prod[:max(len(prod), 0)])


def _poly_powmod(base, n, modulus, p):
    result = [1]
    b = list(base)
    while n:
        if n & 1:
            result = _poly_mul_mod(result, b, modulus, p)
        b = _poly_mul_mod(b, b, modulus, p)
        n >>= 1
    return result


def _poly_is_irreducible(modulus, p):
    """Monic modulus of degree e irreducible over Z_p iff x^(p^e) = x mod f and
    gcd-style condition x^(p^(e/l)) != x for every prime l | e."""
    e = len(modulus) - 1
    if e == 1:
        return True
    x = [0, 1]
    xq = _poly_powmod(x, p ** e, modulus, p)
    if xq != x:
        return False
    ell = 2
    rem = e
    primes = set()
    while ell * ell <= rem:
        if rem % ell == 0:
            primes.add(ell)
            while rem % ell == 0:
                rem //= ell
        ell += 1
    if rem > 1:
        primes.add(rem)
    for ell in primes:
        xt = _poly_powmod(x, p ** (e // ell), modulus, p)
        if xt == x:
            return False
    return True


def _least_irreducible(p: int, e: int):
    """Lexicographically least monic irreducible of degree e over Z_p,
    coefficients compared low-degree-first."""
    if e == 1:
        return (0, 1)
    for code in range(p ** e):
        coeffs = []
        c = code
        for _ in range(e):
            coeffs.append(c % p)
            c //= p
        modulus = coeffs + [1]
        if _poly_is_irreducible(modulus, p):
            return tuple(modulus)
    raise AssertionError("no irreducible polynomial found")  # unreachable


@dataclass(frozen=True)
class FieldElement:
    """Element of a finite field in canonical polynomial-basis coordinates."""

    field: "FiniteField"
    code: int

    @property
    def coeffs(self):
        return self.field.decode(self.code)

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"FieldElement({self.code} in F_{self.field.q})"


class FiniteField:
    """F_{p^e} with the deterministic (lexicographically least) modulus."""

    __slots__ = ("p", "e", "q", "modulus", "_mul", "_inv", "_frob", "_pow_cache")

    def __init__(self, p: int, e: int, _modulus=None):
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if e < 1:
            raise SizeCapExceeded(f"e must be >= 1, got {e}")
        q = p ** e
        if q > SIZE_CAP:
            raise SizeCapExceeded(f"q = {q} exceeds cap {SIZE_CAP}")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = _modulus if _modulus is not None else _least_irreducible(p, e)
        self._mul = None
        self._inv = None
        self._frob = None
        if q <= _TABLE_CAP:
            self._build_tables()

    # -- encoding ---------------------------------------------------------

    def decode(self, code: int):
        """Integer code -> coefficient tuple (little-endian)."""
        coeffs = []
        for _ in range(self.e):
            coeffs.append(code % self.p)
            code //= self.p
        return tuple(coeffs)

    def encode(self, coeffs) -> int:
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + (c % self.p)
        return code

    def element(self, code: int) -> FieldElement:
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} out of range for F_{self.q}")
        return FieldElement(self, code)

    def elements(self):
        return [FieldElement(self, c) for c in range(self.q)]

    # -- raw code arithmetic ------------------------------------------------

    def _build_tables(self):
        q = self.q
        mul = [0] * (q * q)
        for a in range(q):
            for b in range(a, q):
                v = self._mul_slow(a, b)
                mul[a * q + b] = v
                mul[b * q + a] = v
        self._mul = mul
        inv = [0] * q
        for a in range(1, q):
            row = a * q
            for b in range(1, q):
                if mul[row + b] == 1:
                    inv[a] = b
                    break
        self._inv = inv
        self._frob = [self.pow_c(a, self.p) for a in range(q)]

    def add_c(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mult = 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg_c(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mult = 1
        while a:
            out += ((-(a % p)) % p) * mult
            a //= p
            mult *= p
        return out

    def sub_c(self, a: int, b: int) -> int:
        return self.add_c(a, self.neg_c(b))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        pa = list(self.decode(a))
        pb = list(self.decode(b))
        return self.encode(_poly_mul_mod(_poly_trim(pa), _poly_trim(pb),
                                         list(self.modulus), self.p) + [0] * self.e)

    def mul_c(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a * self.q + b]
        return self._mul_slow(a, b)

    def inv_c(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self._inv is not None:
            return self._inv[a]
        return self.pow_c(a, self.q - 2)

    def div_c(self, a: int, b: int) -> int:
        return self.mul_c(a, self.inv_c(b))

    def pow_c(self, a: int, n: int) -> int:
        if n < 0:
            a = self.inv_c(a)
            n = -n
        result = 1
        base = a
        while n:
            if n & 1:
                result = self.mul_c(result, base)
            base = self.mul_c(base, base)
            n >>= 1
        return result

    def frobenius_c(self, a: int) -> int:
        if self._frob is not None:
            return self._frob[a]
        return self.pow_c(a, self.p)

    def one(self) -> int:
        return 1

    def primitive_candidate(self) -> int:
        """The least code generating the field over the prime field
        (for e >= 2 this is the polynomial generator x, code p; for e = 1 it is 1)."""
        return self.p if self.e >= 2 else 1

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    def __repr__(self):
        return f"FiniteField(p={self.p}, e={self.e})"


@lru_cache(maxsize=None)
def field_create(p: int, e: int) -> FiniteField:
    """Create (or fetch the cached) F_{p^e} with the deterministic modulus."""
    return FiniteField(p, e)


def field_arith(f: FiniteField, op: str, a: FieldElement, b=None) -> FieldElement:
    """Dispatch wrapper over the raw code arithmetic."""
    ac = a.code if isinstance(a, FieldElement) else int(a)
    if op == "add":
        return f.element(f.add_c(ac, _code(b)))
    if op == "sub":
        return f.element(f.sub_c(ac, _code(b)))
    if op == "mul":
        return f.element(f.mul_c(ac, _code(b)))
    if op == "neg":
        return f.element(f.neg_c(ac))
    if op == "inv":
        return f.element(f.inv_c(ac))
    if op == "div":
        return f.element(f.div_c(ac, _code(b)))
    if op == "pow":
        return f.element(f.pow_c(ac, int(b)))
    if op == "frobenius":
        return f.element(f.frobenius_c(ac))
    raise ValueError(f"unknown op {op!r}")


def _code(x):
    return x.code if isinstance(x, FieldElement) else int(x)


def subfield_codes(f: FiniteField, q0: int):
    """Codes of the unique subfield of size q0 (fixed points of a -> a^q0)."""
    return [a for a in range(f.q) if f.pow_c(a, q0) == a]


def field_basis_over_subfield(f: FiniteField, r: int):
    """Basis lambda_1..lambda_r of F_q over the subfield F_{q0}, q0 = p^(e/r).

    Output is certified by an exhaustive independence check over the subfield.
    """
    if r < 1 or f.e % r != 0:
        raise NotADivisor(f"r = {r} does not divide e = {f.e}")
    q0 = f.p ** (f.e // r)
    gen = f.primitive_candidate()
    basis = [f.element(f.pow_c(gen, i)) for i in range(r)]
    # independence certificate: no nontrivial subfield combination vanishes
    sub = subfield_codes(f, q0)
    assert len(sub) == q0
    if q0 ** r <= SIZE_CAP:
        combos = [(0, False)]
        for lam in basis:
            combos = [
                (f.add_c(acc, f.mul_c(c, lam.code)), nontriv or c != 0)
                for (acc, nontriv) in combos
                for c in sub
            ]
        for acc, nontriv in combos:
            if nontriv and acc == 0:
                raise AssertionError("field basis failed independence certificate")
    return basis


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def primitive_element_code(p: int, e: int) -> int:
    """Least code whose multiplicative order is q - 1."""
    f = field_create(p, e)
    q = f.q
    if q == 2:
        return 1
    factors = _prime_factors(q - 1)
    for a in range(2, q):
        if all(f.pow_c(a, (q - 1) // r) != 1 for r in factors):
            return a
    raise AssertionError("a finite field always has a multiplicative generator")


def primitive_element(f: FiniteField) -> int:
    return primitive_element_code(f.p, f.e)
