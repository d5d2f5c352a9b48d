"""Dense exact matrices and univariate polynomials over a :class:`Ring`."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .fields import QQ, ZZ, IntegerRing, Ring


class ExactMatrix:
    """A dense matrix over an exact ring.

    Treat instances as immutable; every operation returns a new matrix.
    """

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring: Ring, rows: Sequence[Sequence], *, ncols: int | None = None):
        self.ring = ring
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged rows")

    # construction -------------------------------------------------------

    @classmethod
    def from_ints(cls, ring: Ring, rows: Sequence[Sequence[int]]) -> "ExactMatrix":
        return cls(ring, [[ring.from_int(x) for x in r] for r in rows])

    @classmethod
    def zeros(cls, ring: Ring, nrows: int, ncols: int | None = None) -> "ExactMatrix":
        ncols = nrows if ncols is None else ncols
        return cls(ring, [[ring.zero] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "ExactMatrix":
        return cls.diag(ring, [ring.one] * n)

    @classmethod
    def diag(cls, ring: Ring, values: Sequence) -> "ExactMatrix":
        n = len(values)
        rows = [[ring.zero] * n for _ in range(n)]
        for i, v in enumerate(values):
            rows[i][i] = v
        return cls(ring, rows, ncols=n)

    @classmethod
    def unit(cls, ring: Ring, n: int, i: int, j: int) -> "ExactMatrix":
        m = cls.zeros(ring, n)
        m.rows[i][j] = ring.one
        return m

    @classmethod
    def random(cls, ring: Ring, n: int, rng: np.random.Generator, *, nonzero: bool = False) -> "ExactMatrix":
        return cls(ring, [[ring.random(rng, nonzero=nonzero) for _ in range(n)] for _ in range(n)], ncols=n)

    # basic protocol -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.ring.format(x) for x in r) for r in self.rows)
        return f"ExactMatrix[{self.ring.name}]({body})"

    def with_ring(self, ring: Ring) -> "ExactMatrix":
        """Reinterpret integer-valued entries in another ring."""
        return ExactMatrix(ring, [[ring.from_int(int(x)) for x in r] for r in self.rows], ncols=self.ncols)

    def support(self) -> list[tuple[int, int]]:
        z = self.ring.is_zero
        return [(i, j) for i, r in enumerate(self.rows) for j, x in enumerate(r) if not z(x)]

    def is_zero(self) -> bool:
        return not self.support()

    def flat(self) -> list:
        return [x for r in self.rows for x in r]

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        add = self.ring.add
        return ExactMatrix(self.ring, [list(map(add, a, b)) for a, b in zip(self.rows, other.rows)], ncols=self.ncols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        sub = self.ring.sub
        return ExactMatrix(self.ring, [list(map(sub, a, b)) for a, b in zip(self.rows, other.rows)], ncols=self.ncols)

    def __neg__(self) -> "ExactMatrix":
        neg = self.ring.neg
        return ExactMatrix(self.ring, [list(map(neg, r)) for r in self.rows], ncols=self.ncols)

    def scale(self, c) -> "ExactMatrix":
        mul = self.ring.mul
        return ExactMatrix(self.ring, [[mul(c, x) for x in r] for r in self.rows], ncols=self.ncols)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        dot = self.ring.dot
        cols = list(zip(*other.rows)) if other.rows else []
        return ExactMatrix(self.ring, [[dot(r, c) for c in cols] for r in self.rows], ncols=other.ncols)

    def __pow__(self, e: int) -> "ExactMatrix":
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = ExactMatrix.identity(self.ring, self.nrows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, [list(c) for c in zip(*self.rows)], ncols=self.nrows)

    def trace(self):
        return self.ring.sum(self.rows[i][i] for i in range(min(self.shape)))

    def trace_of_product(self, other: "ExactMatrix"):
        """``tr(self @ other)`` without forming the product."""
        dot = self.ring.dot
        cols = list(zip(*other.rows))
        return self.ring.sum(dot(r, c) for r, c in zip(self.rows, cols))

    def _check_same_shape(self, other: "ExactMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    # invariants ---------------------------------------------------------

    def charpoly(self) -> list:
        """Coefficients of det(tI - self), leading coefficient first.

        Berkowitz's algorithm: only ring additions and multiplications, so it
        is valid over any commutative ring (ZZ, GF(2^k), ...).
        """
        if not self.is_square():
            raise ValueError("charpoly of a non-square matrix")
        ring = self.ring
        rows = self.rows
        n = self.nrows
        if n == 0:
            return [ring.one]
        add, mul, neg, dot = ring.add, ring.mul, ring.neg, ring.dot
        poly = [ring.one, neg(rows[0][0])]
        for k in range(1, n):
            lead = [r[:k] for r in rows[:k]]
            col = [r[k] for r in rows[:k]]
            row = rows[k][:k]
            toeplitz = [ring.one, neg(rows[k][k])]
            v = col
            for _ in range(k):
                toeplitz.append(neg(dot(row, v)))
                v = [dot(r, v) for r in lead]
            new = []
            for i in range(k + 2):
                acc = ring.zero
                for j in range(min(i, k) + 1):
                    acc = add(acc, mul(toeplitz[i - j], poly[j]))
                new.append(acc)
            poly = new
        return poly

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        if isinstance(self.ring, IntegerRing):
            return _bareiss(self.rows)[0]
        if self.ring.is_field:
            return _field_eliminate(self.ring, self.rows)[1]
        n = self.nrows
        c = self.charpoly()[n]
        return c if n % 2 == 0 else self.ring.neg(c)

    def rank(self) -> int:
        if isinstance(self.ring, IntegerRing):
            return _bareiss(self.rows)[1]
        if not self.ring.is_field:
            raise ValueError(f"rank over {self.ring.name} is not supported")
        return _field_eliminate(self.ring, self.rows)[0]

    def rref(self) -> tuple["ExactMatrix", list[int]]:
        """Reduced row echelon form and pivot columns (fields only)."""
        if not self.ring.is_field:
            raise ValueError("rref needs a field")
        ring = self.ring
        work = [list(r) for r in self.rows]
        pivots: list[int] = []
        prow = 0
        for c in range(self.ncols):
            pr = next((r for r in range(prow, self.nrows) if not ring.is_zero(work[r][c])), None)
            if pr is None:
                continue
            work[prow], work[pr] = work[pr], work[prow]
            inv = ring.inv(work[prow][c])
            work[prow] = [ring.mul(inv, x) for x in work[prow]]
            for r in range(self.nrows):
                if r != prow and not ring.is_zero(work[r][c]):
                    f = work[r][c]
                    work[r] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(work[r], work[prow])]
            pivots.append(c)
            prow += 1
            if prow == self.nrows:
                break
        return ExactMatrix(ring, work, ncols=self.ncols), pivots

    def nullspace(self) -> list[list]:
        """A basis of {x : self @ x = 0} (fields only)."""
        reduced, pivots = self.rref()
        ring = self.ring
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [ring.zero] * self.ncols
            v[f] = ring.one
            for r, pc in enumerate(pivots):
                v[pc] = ring.neg(reduced.rows[r][f])
            basis.append(v)
        return basis


def _bareiss(rows: Sequence[Sequence[int]]) -> tuple[int, int]:
    """Fraction-free elimination over ZZ; returns (det, rank)."""
    work = [list(r) for r in rows]
    m = len(work)
    n = len(work[0]) if work else 0
    prev = 1
    sign = 1
    rank = 0
    for c in range(n):
        if rank == m:
            break
        pr = next((r for r in range(rank, m) if work[r][c] != 0), None)
        if pr is None:
            continue
        if pr != rank:
            work[rank], work[pr] = work[pr], work[rank]
            sign = -sign
        piv = work[rank][c]
        for r in range(rank + 1, m):
            for cc in range(c + 1, n):
                work[r][cc] = (work[r][cc] * piv - work[r][c] * work[rank][cc]) // prev
            work[r][c] = 0
        prev = piv
        rank += 1
    det = 0
    if m == n and rank == n:
        det = sign * (work[n - 1][n - 1] if n else 1)
    elif m == n == 0:
        det = 1
    return det, rank


def _field_eliminate(ring: Ring, rows) -> tuple[int, object]:
    """Gaussian elimination over a field; returns (rank, det-if-square)."""
    work = [list(r) for r in rows]
    m = len(work)
    n = len(work[0]) if work else 0
    det = ring.one
    rank = 0
    for c in range(n):
        if rank == m:
            break
        pr = next((r for r in range(rank, m) if not ring.is_zero(work[r][c])), None)
        if pr is None:
            det = ring.zero
            continue
        if pr != rank:
            work[rank], work[pr] = work[pr], work[rank]
            det = ring.neg(det)
        piv = work[rank][c]
        det = ring.mul(det, piv)
        inv = ring.inv(piv)
        for r in range(rank + 1, m):
            if not ring.is_zero(work[r][c]):
                f = ring.mul(work[r][c], inv)
                work[r] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(work[r], work[rank])]
        rank += 1
    if m != n or rank < n:
        det = ring.zero
    return rank, det


def rank_of_vectors(ring: Ring, vectors: Iterable[Sequence]) -> int:
    vecs = [list(v) for v in vectors]
    if not vecs:
        return 0
    return ExactMatrix(ring, vecs).rank()


# univariate polynomials, coefficient lists low -> high ----------------------


def poly_trim(ring: Ring, f: Sequence) -> list:
    f = list(f)
    while f and ring.is_zero(f[-1]):
        f.pop()
    return f


def poly_derivative(ring: Ring, f: Sequence) -> list:
    return poly_trim(ring, [ring.mul(ring.from_int(i), c) for i, c in enumerate(f)][1:])


def poly_mod(ring: Ring, f: Sequence, g: Sequence) -> list:
    f = poly_trim(ring, f)
    g = poly_trim(ring, g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = ring.inv(g[-1])
    while len(f) >= len(g):
        c = ring.mul(f[-1], inv_lead)
        shift = len(f) - len(g)
        for i, gc in enumerate(g):
            f[shift + i] = ring.sub(f[shift + i], ring.mul(c, gc))
        f = poly_trim(ring, f)
    return f


def poly_gcd(ring: Ring, f: Sequence, g: Sequence) -> list:
    """Monic gcd over a field."""
    a, b = poly_trim(ring, f), poly_trim(ring, g)
    while b:
        a, b = b, poly_mod(ring, a, b)
    if not a:
        return a
    inv = ring.inv(a[-1])
    return [ring.mul(inv, c) for c in a]


def charpoly_low_to_high(m: ExactMatrix) -> list:
    return list(reversed(m.charpoly()))


def is_separable(m: ExactMatrix) -> bool:
    """True iff the characteristic polynomial is squarefree (gcd(f, f') = 1)."""
    f = charpoly_low_to_high(m)
    g = poly_gcd(m.ring, f, poly_derivative(m.ring, f))
    return len(g) == 1


def to_rational(m: ExactMatrix) -> ExactMatrix:
    return ExactMatrix(QQ, [[Fraction(x) for x in r] for r in m.rows], ncols=m.ncols)


def integer_matrix(rows: Sequence[Sequence[int]]) -> ExactMatrix:
    return ExactMatrix(ZZ, rows)
