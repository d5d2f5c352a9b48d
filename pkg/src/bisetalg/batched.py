"""Vectorized exact arithmetic for many small matrices at once.

The partition-identity suite evaluates thousands of tuples; doing that one
Python scalar at a time is too slow, so this module runs the same
division-free algorithms on stacks of matrices held in int64 numpy arrays.
Integers are kept exact by a magnitude bound checked before each run; finite
field elements use the same integer encoding as :mod:`bisetalg.fields`.
"""

from __future__ import annotations

from itertools import combinations
from math import factorial

import numpy as np

from .fields import ExtensionField, IntegerRing, PrimeField, Ring

_INT64_SAFE = 2**62


class OverflowRisk(ArithmeticError):
    pass


class BatchArith:
    """Elementwise and matrix operations on arrays of ring elements."""

    def __init__(self, ring: Ring):
        self.ring = ring
        if isinstance(ring, IntegerRing):
            self.kind = "int"
        elif isinstance(ring, PrimeField):
            self.kind = "prime"
            self.p = ring.p
        elif isinstance(ring, ExtensionField):
            self.kind = "xor" if ring.p == 2 else "table"
            self.mul_t = np.array(ring._mul, dtype=np.int64)
            self.add_t = np.array(ring._add, dtype=np.int64)
            self.neg_t = np.array(ring._neg, dtype=np.int64)
        else:
            raise TypeError(f"no batched arithmetic for {ring.name}")

    def add(self, x, y):
        if self.kind == "int":
            return x + y
        if self.kind == "prime":
            return (x + y) % self.p
        if self.kind == "xor":
            return x ^ y
        return self.add_t[x, y]

    def neg(self, x):
        if self.kind == "int":
            return -x
        if self.kind == "prime":
            return (-x) % self.p
        if self.kind == "xor":
            return x
        return self.neg_t[x]

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self.kind == "int":
            return x * y
        if self.kind == "prime":
            return (x * y) % self.p
        return self.mul_t[x, y]

    def reduce_sum(self, x, axis: int):
        if self.kind == "int":
            return x.sum(axis=axis)
        if self.kind == "prime":
            return x.sum(axis=axis) % self.p
        if self.kind == "xor":
            return np.bitwise_xor.reduce(x, axis=axis)
        x = np.moveaxis(x, axis, 0)
        acc = x[0]
        for part in x[1:]:
            acc = self.add_t[acc, part]
        return acc

    def matmul(self, a, b):
        if self.kind == "int":
            return a @ b
        if self.kind == "prime":
            return (a @ b) % self.p
        terms = self.mul_t[a[..., :, :, None], b[..., None, :, :]]
        return self.reduce_sum(terms, axis=-2)

    def matvec(self, a, v):
        return self.matmul(a, v[..., None])[..., 0]

    def dot(self, u, v):
        return self.reduce_sum(self.mul(u, v), axis=-1)

    def trace(self, a):
        return self.reduce_sum(np.diagonal(a, axis1=-2, axis2=-1), axis=-1)

    def trace_of_product(self, a, b):
        # tr(ab) = sum_ij a_ij b_ji
        prod = self.mul(a, np.swapaxes(b, -1, -2))
        return self.reduce_sum(prod.reshape(prod.shape[:-2] + (-1,)), axis=-1)

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def ones(self, shape):
        return np.ones(shape, dtype=np.int64)

    def random(self, rng: np.random.Generator, shape, int_range=(-3, 3)):
        if self.kind == "int":
            lo, hi = int_range
            return rng.integers(lo, hi + 1, size=shape, dtype=np.int64)
        return rng.integers(0, self.ring.order, size=shape, dtype=np.int64)

    def charpoly(self, a) -> list:
        """Berkowitz on a stack ``a[..., n, n]``; list of coefficient arrays, leading first."""
        n = a.shape[-1]
        batch = a.shape[:-2]
        one = self.ones(batch)
        if n == 0:
            return [one]
        poly = [one, self.neg(a[..., 0, 0])]
        for k in range(1, n):
            lead = a[..., :k, :k]
            col = a[..., :k, k]
            row = a[..., k, :k]
            toeplitz = [one, self.neg(a[..., k, k])]
            v = col
            for _ in range(k):
                toeplitz.append(self.neg(self.dot(row, v)))
                v = self.matvec(lead, v)
            new = []
            for i in range(k + 2):
                acc = self.zeros(batch)
                for j in range(min(i, k) + 1):
                    acc = self.add(acc, self.mul(toeplitz[i - j], poly[j]))
                new.append(acc)
            poly = new
        return poly

    def rho(self, a, k: int):
        n = a.shape[-1]
        if k > n:
            return self.zeros(a.shape[:-2])
        c = self.charpoly(a)[k]
        return c if k % 2 == 0 else self.neg(c)


def _check_int_bound(mats, r: int) -> None:
    """Refuse int64 evaluation when intermediate values could overflow."""
    n = mats.shape[-1]
    m = int(np.abs(mats).max(initial=0)) * r  # entries of a subset sum
    m = max(m, 1)
    # Berkowitz intermediates are bounded by (n m)^(n+1); traces of r-fold
    # products times (r-1)! orderings and partition products stay below
    # (n m)^r r! as well.
    bound = max((n * m) ** (n + 1), (n * m) ** r * factorial(r)) * 2 ** (r + 1)
    if bound >= _INT64_SAFE:
        raise OverflowRisk(f"entries too large for exact int64 evaluation (bound {bound})")


def batched_polarized_rho(arith: BatchArith, mats):
    """``mats[t, i]`` is argument i of tuple t; returns rho_r(args) per tuple."""
    r = mats.shape[1]
    n = mats.shape[-1]
    total = arith.zeros(mats.shape[:1])
    if r > n:
        return total
    for size in range(1, r + 1):
        neg = (r - size) % 2 == 1
        for subset in combinations(range(r), size):
            s = mats[:, subset[0]]
            for i in subset[1:]:
                s = arith.add(s, mats[:, i])
            v = arith.rho(s, r)
            total = arith.sub(total, v) if neg else arith.add(total, v)
    return total


def batched_symmetrized_trace(arith: BatchArith, mats, block: tuple[int, ...]):
    if len(block) == 1:
        return arith.trace(mats[:, block[0]])
    acc = []

    def walk(prefix, rest):
        if len(rest) == 1:
            acc.append(arith.trace_of_product(prefix, mats[:, rest[0]]))
            return
        for pos, idx in enumerate(rest):
            walk(arith.matmul(prefix, mats[:, idx]), rest[:pos] + rest[pos + 1 :])

    walk(mats[:, block[0]], block[1:])
    total = acc[0]
    for x in acc[1:]:
        total = arith.add(total, x)
    return total


def batched_partition_sum(arith: BatchArith, mats, partitions):
    cache: dict[tuple[int, ...], np.ndarray] = {}
    total = arith.zeros(mats.shape[:1])
    for part in partitions:
        term = None
        for block in part.blocks:
            if block not in cache:
                cache[block] = batched_symmetrized_trace(arith, mats, block)
            term = cache[block] if term is None else arith.mul(term, cache[block])
        total = arith.add(total, term) if part.sign > 0 else arith.sub(total, term)
    return total


def batched_ni_plus(ring: Ring, mats) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the partition identity for each tuple in ``mats``."""
    from .newton import enumerate_partitions

    arith = BatchArith(ring)
    mats = np.asarray(mats, dtype=np.int64)
    r = mats.shape[1]
    if arith.kind == "int":
        _check_int_bound(mats, r)
    lhs = batched_polarized_rho(arith, mats)
    rhs = batched_partition_sum(arith, mats, list(enumerate_partitions(r)))
    return lhs, rhs
