"""Exact scalar rings: the integers, the rationals and small finite fields.

Elements are plain Python values (``int`` or ``Fraction``); a ring object
carries the arithmetic.  Elements of GF(p^k) are ints in ``range(q)`` whose
base-p digits are the coefficients of a polynomial reduced modulo a fixed
Conway polynomial, so ``0`` and ``1`` are always the additive and
multiplicative identities.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Iterator, Sequence

import numpy as np

# Conway polynomials, coefficients low -> high, monic.
CONWAY: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}

_TABLE_LIMIT = 1024


class Ring:
    """Arithmetic over one exact commutative ring."""

    name = "ring"
    characteristic = 0
    is_field = False
    zero: Any = 0
    one: Any = 1

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise ZeroDivisionError(f"{self.name} has no general inverse")

    def from_int(self, n: int):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero

    def dot(self, xs: Sequence, ys: Sequence):
        acc = self.zero
        for x, y in zip(xs, ys):
            acc = self.add(acc, self.mul(x, y))
        return acc

    def sum(self, xs: Iterable):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def random(self, rng: np.random.Generator, *, nonzero: bool = False):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(a)

    def __repr__(self) -> str:
        return self.name


class IntegerRing(Ring):
    name = "ZZ"

    def __init__(self, sample_range: tuple[int, int] = (-3, 3)):
        self.sample_range = sample_range

    add = staticmethod(operator.add)
    sub = staticmethod(operator.sub)
    neg = staticmethod(operator.neg)
    mul = staticmethod(operator.mul)

    def from_int(self, n: int) -> int:
        return int(n)

    def dot(self, xs, ys):
        return sum(map(operator.mul, xs, ys))

    def sum(self, xs):
        return sum(xs)

    def random(self, rng, *, nonzero=False):
        lo, hi = self.sample_range
        while True:
            x = int(rng.integers(lo, hi + 1))
            if x or not nonzero:
                return x


class RationalField(Ring):
    name = "QQ"
    is_field = True
    zero = Fraction(0)
    one = Fraction(1)

    def __init__(self, sample_range: tuple[int, int] = (-9, 9)):
        self.sample_range = sample_range

    add = staticmethod(operator.add)
    sub = staticmethod(operator.sub)
    neg = staticmethod(operator.neg)
    mul = staticmethod(operator.mul)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def dot(self, xs, ys):
        return Fraction(sum(map(operator.mul, xs, ys)))

    def sum(self, xs):
        return Fraction(sum(xs))

    def random(self, rng, *, nonzero=False):
        lo, hi = self.sample_range
        while True:
            x = Fraction(int(rng.integers(lo, hi + 1)))
            if x or not nonzero:
                return x


class PrimeField(Ring):
    """GF(p) with elements ``0..p-1``."""

    is_field = True

    def __init__(self, p: int):
        if p < 2 or not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = self.order = self.characteristic = p
        self.degree = 1
        self.name = f"GF({p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def from_int(self, n: int) -> int:
        return n % self.p

    def dot(self, xs, ys):
        return sum(map(operator.mul, xs, ys)) % self.p

    def sum(self, xs):
        return sum(xs) % self.p

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def random(self, rng, *, nonzero=False):
        if nonzero:
            return int(rng.integers(1, self.p))
        return int(rng.integers(0, self.p))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


class ExtensionField(Ring):
    """GF(p^k), k > 1, by table lookup on integer-encoded polynomials."""

    is_field = True

    def __init__(self, p: int, k: int):
        if (p, k) not in CONWAY:
            raise ValueError(f"no modulus available for GF({p}^{k})")
        q = p**k
        if q > _TABLE_LIMIT:
            raise ValueError(f"GF({q}) exceeds the table limit {_TABLE_LIMIT}")
        self.p = self.characteristic = p
        self.degree = k
        self.order = q
        self.modulus = CONWAY[(p, k)]
        self.name = f"GF({q})"
        digits = [_digits(x, p, k) for x in range(q)]
        self._add = [[_encode([(a + b) % p for a, b in zip(da, db)], p) for db in digits] for da in digits]
        self._mul = [[self._mul_poly(da, db) for db in digits] for da in digits]
        self._neg = [_encode([-a % p for a in d], p) for d in digits]
        self._inv = [0] * q
        for a in range(1, q):
            row = self._mul[a]
            self._inv[a] = row.index(1)
        self._xor = p == 2

    def _mul_poly(self, da, db) -> int:
        p, k = self.p, self.degree
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(da):
            if a:
                for j, b in enumerate(db):
                    prod[i + j] = (prod[i + j] + a * b) % p
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                for i, m in enumerate(self.modulus):
                    prod[deg - k + i] = (prod[deg - k + i] - c * m) % p
        return _encode(prod[:k], p)

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def from_int(self, n: int) -> int:
        return n % self.p

    def dot(self, xs, ys):
        mul = self._mul
        acc = 0
        if self._xor:
            for x, y in zip(xs, ys):
                acc ^= mul[x][y]
            return acc
        add = self._add
        for x, y in zip(xs, ys):
            acc = add[acc][mul[x][y]]
        return acc

    def sum(self, xs):
        acc = 0
        if self._xor:
            for x in xs:
                acc ^= x
            return acc
        add = self._add
        for x in xs:
            acc = add[acc][x]
        return acc

    @property
    def generator(self) -> int:
        """The class of ``x``, a root of the defining polynomial."""
        return self.p

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    def random(self, rng, *, nonzero=False):
        if nonzero:
            return int(rng.integers(1, self.order))
        return int(rng.integers(0, self.order))

    def format(self, a) -> str:
        terms = []
        for i, c in enumerate(_digits(a, self.p, self.degree)):
            if c:
                mono = "1" if i == 0 else ("a" if i == 1 else f"a^{i}")
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(reversed(terms)) or "0"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and other.order == self.order

    def __hash__(self):
        return hash(("GF", self.order))


ZZ = IntegerRing()
QQ = RationalField()


@lru_cache(maxsize=None)
def GF(q: int) -> Ring:
    """The finite field of order ``q``."""
    p, k = _prime_power(q)
    if k == 1:
        return PrimeField(p)
    return ExtensionField(p, k)


def parse_ring(text: str) -> Ring:
    """Parse ``int``, ``rational`` or ``gf:q``."""
    key = text.strip().lower()
    if key in ("int", "zz", "z"):
        return ZZ
    if key in ("rational", "qq", "q"):
        return QQ
    if key.startswith("gf:"):
        try:
            q = int(key[3:])
        except ValueError:
            raise ValueError(f"bad field order in {text!r}") from None
        return GF(q)
    raise ValueError(f"unknown ring {text!r} (expected int, rational or gf:q)")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, k


def _digits(x: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        x, d = divmod(x, p)
        out.append(d)
    return out


def _encode(digits: Sequence[int], p: int) -> int:
    x = 0
    for d in reversed(digits):
        x = x * p + d
    return x
