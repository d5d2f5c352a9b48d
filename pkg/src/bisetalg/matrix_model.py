"""Bisets as spans of matrix units in the split model M_n(L).

Rows and columns are indexed by the left cosets g_i H (coset 0 is H).  A
biset S maps to the span of the units e_ij with g_i^-1 g_j in S; the map
turns union into entrywise OR and biset product into the boolean matrix
product.  Everything here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._bits import iter_bits, mask_of, popcount
from .bisets import BisetError, BisetSemiring, CounterexampleError, HBiset, height_profile
from .fields import QQ, GF, Ring
from .groups import SubgroupH
from .matrices import ExactMatrix, is_separable, rank_of_vectors


@dataclass(frozen=True)
class SpanPattern:
    """An n x n boolean matrix; ``rows[i]`` is the bitmask of true columns."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError("row count does not match n")
        limit = 1 << self.n
        if any(r < 0 or r >= limit for r in self.rows):
            raise ValueError("row mask wider than n")

    @classmethod
    def identity(cls, n: int) -> "SpanPattern":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def full(cls, n: int) -> "SpanPattern":
        return cls(n, ((1 << n) - 1,) * n)

    @classmethod
    def empty(cls, n: int) -> "SpanPattern":
        return cls(n, (0,) * n)

    @classmethod
    def from_entries(cls, n: int, entries: Iterable[tuple[int, int]]) -> "SpanPattern":
        rows = [0] * n
        for i, j in entries:
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def from_text(cls, text: str) -> "SpanPattern":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        n = len(lines)
        rows = []
        for ln in lines:
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise ValueError(f"bad pattern row {ln!r}")
            rows.append(sum(1 << j for j, ch in enumerate(ln) if ch == "1"))
        return cls(n, tuple(rows))

    def to_text(self) -> str:
        return "\n".join("".join("1" if (r >> j) & 1 else "0" for j in range(self.n)) for r in self.rows) + "\n"

    def __contains__(self, ij: tuple[int, int]) -> bool:
        i, j = ij
        return bool((self.rows[i] >> j) & 1)

    def entries(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.rows) for j in iter_bits(r)]

    def count(self) -> int:
        return sum(popcount(r) for r in self.rows)

    def _check(self, other: "SpanPattern") -> None:
        if self.n != other.n:
            raise ValueError(f"pattern sizes differ: {self.n} vs {other.n}")

    def __or__(self, other: "SpanPattern") -> "SpanPattern":
        self._check(other)
        return SpanPattern(self.n, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __and__(self, other: "SpanPattern") -> "SpanPattern":
        self._check(other)
        return SpanPattern(self.n, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __matmul__(self, other: "SpanPattern") -> "SpanPattern":
        """OR-AND product: e_ij e_jk = e_ik."""
        self._check(other)
        out = []
        for r in self.rows:
            acc = 0
            for j in iter_bits(r):
                acc |= other.rows[j]
            out.append(acc)
        return SpanPattern(self.n, tuple(out))

    def transpose(self) -> "SpanPattern":
        rows = [0] * self.n
        for i, j in self.entries():
            rows[j] |= 1 << i
        return SpanPattern(self.n, tuple(rows))

    def issubset(self, other: "SpanPattern") -> bool:
        self._check(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def diagonal_empty(self) -> bool:
        return not any((r >> i) & 1 for i, r in enumerate(self.rows))

    def contains_diagonal(self) -> bool:
        return all((r >> i) & 1 for i, r in enumerate(self.rows))


def span_product(p: SpanPattern, q: SpanPattern) -> SpanPattern:
    return p @ q


def support_pattern(m: ExactMatrix) -> SpanPattern:
    """The K-K span of a concrete matrix: the span of its nonzero units."""
    return SpanPattern.from_entries(m.nrows, m.support())


@dataclass(frozen=True)
class PatternedElement:
    pattern: SpanPattern
    matrix: ExactMatrix = field(compare=False)

    def __post_init__(self):
        if self.matrix.shape != (self.pattern.n, self.pattern.n):
            raise ValueError("matrix shape does not match the pattern")
        if not support_pattern(self.matrix).issubset(self.pattern):
            raise ValueError("matrix has entries outside its pattern")

    @classmethod
    def random(cls, pattern: SpanPattern, ring: Ring, rng: np.random.Generator, *, nonzero: bool = True):
        n = pattern.n
        rows = [[ring.zero] * n for _ in range(n)]
        for i, j in pattern.entries():
            rows[i][j] = ring.random(rng, nonzero=nonzero)
        return cls(pattern, ExactMatrix(ring, rows, ncols=n))


# the map from bisets to patterns ---------------------------------------------


class SplitModel:
    """Coset indexing for one ``(G, H)`` and the map S -> phi(S).

    ``class_grid[i][j]`` is the double-coset class of g_i^-1 g_j.
    """

    def __init__(self, semiring: BisetSemiring):
        self.semiring = semiring
        G = semiring.group
        reps = semiring.cosets.representatives
        self.n = len(reps)
        class_of = semiring.table.class_of
        self.class_grid = [[class_of[G.mul(G.inv(gi), gj)] for gj in reps] for gi in reps]
        self._class_patterns = []
        for c in range(semiring.n_classes):
            rows = tuple(mask_of(j for j, cl in enumerate(row) if cl == c) for row in self.class_grid)
            self._class_patterns.append(SpanPattern(self.n, rows))

    def phi(self, s: HBiset) -> SpanPattern:
        if s.semiring is not self.semiring:
            raise BisetError("biset lives in a different (G, H)")
        rows = [0] * self.n
        for c in s.class_set:
            for i, r in enumerate(self._class_patterns[c].rows):
                rows[i] |= r
        return SpanPattern(self.n, tuple(rows))

    def class_pattern(self, c: int) -> SpanPattern:
        return self._class_patterns[c]

    def to_biset(self, p: SpanPattern) -> HBiset:
        """Inverse of :meth:`phi`; row 0 lists the cosets g_j H inside S."""
        if p.n != self.n:
            raise ValueError("pattern size does not match [G:H]")
        cosets = self.semiring.cosets
        mask = 0
        for j in iter_bits(p.rows[0]):
            mask |= cosets.masks[j]
        s = self.semiring.from_mask(mask)
        if self.phi(s) != p:
            raise BisetError("pattern is not the image of an H-biset")
        return s


def split_model(semiring: BisetSemiring) -> SplitModel:
    cached = semiring.__dict__.get("_split_model")
    if cached is None:
        cached = SplitModel(semiring)
        semiring.__dict__["_split_model"] = cached
    return cached


def phi_pattern(s: HBiset) -> SpanPattern:
    return split_model(s.semiring).phi(s)


def phi_pattern_direct(s: HBiset) -> SpanPattern:
    """phi(S) straight from the definition, one group product per entry."""
    sr = s.semiring
    G = sr.group
    reps = sr.cosets.representatives
    mask = s.mask
    rows = []
    for gi in reps:
        gi_inv = G.inv(gi)
        rows.append(mask_of(j for j, gj in enumerate(reps) if (mask >> G.mul(gi_inv, gj)) & 1))
    return SpanPattern(len(reps), tuple(rows))


def pattern_to_biset(semiring: BisetSemiring, p: SpanPattern) -> HBiset:
    return split_model(semiring).to_biset(p)


def pattern_dimension(s: HBiset) -> int:
    """|S|/|H|, cross-checked against the pattern's entry count."""
    d = s.dimension()
    count = phi_pattern(s).count()
    if count != s.semiring.index * d:
        raise CounterexampleError("pattern count differs from n |S|/|H|", {"classes": s.class_set})
    return d


# verification of the isomorphism ----------------------------------------------


def small_unions(semiring: BisetSemiring, max_classes: int = 2) -> list[HBiset]:
    return semiring.small_unions(max_classes)


def verify_main_isomorphism(
    semiring: BisetSemiring,
    *,
    rng: np.random.Generator | None = None,
    sample_budget: int = 20,
    ring: Ring | None = None,
    matrix_samples: int = 8,
) -> dict:
    """Check that phi respects union, product and inversion and is injective.

    Exhaustive over pairs drawn from unions of at most two classes; with
    ``sample_budget`` more random pairs of arbitrary bisets.  For a sample of
    those pairs, random matrices on phi(S) and phi(S') are multiplied over
    ``ring`` (GF(101) by default) and their products must stay inside, and
    eventually fill, the predicted pattern.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    ring = GF(101) if ring is None else ring
    model = split_model(semiring)
    failures: list[dict] = []
    bisets = small_unions(semiring, 2)
    pairs = [(s, t) for s in bisets for t in bisets]
    extra = []
    n_cl = semiring.n_classes
    for _ in range(sample_budget):
        a = int(rng.integers(0, 1 << n_cl))
        b = int(rng.integers(0, 1 << n_cl))
        extra.append((semiring.from_classes(iter_bits(a)), semiring.from_classes(iter_bits(b))))
    pairs.extend(extra)

    for s, t in pairs:
        ps, pt = model.phi(s), model.phi(t)
        if model.phi(s * t) != ps @ pt:
            failures.append({"check": "product", "S": s.class_set, "T": t.class_set})
        if model.phi(s | t) != ps | pt:
            failures.append({"check": "union", "S": s.class_set, "T": t.class_set})

    seen: dict[tuple[int, ...], int] = {}
    for s in semiring.all_bisets():
        p = model.phi(s)
        if p != phi_pattern_direct(s):
            failures.append({"check": "phi-definition", "S": s.class_set})
        if p.rows in seen:
            failures.append({"check": "injective", "S": s.class_set, "T": list(iter_bits(seen[p.rows]))})
        seen[p.rows] = s.classes
        if p.transpose() != model.phi(~s):
            failures.append({"check": "involution", "S": s.class_set})
        if s and model.to_biset(p) != s:
            failures.append({"check": "inverse-map", "S": s.class_set})

    matrix_pairs = [(s, t) for s, t in extra if s and t]
    for s, t in matrix_pairs:
        target = model.phi(s * t)
        reached = SpanPattern.empty(model.n)
        for _ in range(matrix_samples):
            x = PatternedElement.random(model.phi(s), ring, rng)
            y = PatternedElement.random(model.phi(t), ring, rng)
            got = support_pattern(x.matrix @ y.matrix)
            if not got.issubset(target):
                failures.append({"check": "matrix-containment", "S": s.class_set, "T": t.class_set})
                break
            reached = reached | got
            if reached == target:
                break
        else:
            failures.append({"check": "matrix-span", "S": s.class_set, "T": t.class_set})

    return {
        "group": semiring.name,
        "classes": n_cl,
        "pairs_checked": len(pairs),
        "matrix_pairs_checked": len(matrix_pairs),
        "bisets_checked": 1 << n_cl,
        "failures": failures,
    }


# generation and invertibility ------------------------------------------------


class NotSeparableError(ValueError):
    pass


def generation_test(a: ExactMatrix, theta: ExactMatrix) -> bool:
    """True iff the n^2 matrices theta^i a theta^j span all of M_n."""
    if not a.ring.is_field:
        raise ValueError("generation_test needs a field")
    if not (a.is_square() and theta.shape == a.shape):
        raise ValueError("a and theta must be square of the same size")
    if not is_separable(theta):
        raise NotSeparableError("theta has a repeated eigenvalue (gcd(f, f') != 1)")
    n = a.nrows
    powers = [ExactMatrix.identity(a.ring, n)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ theta)
    left = [p @ a for p in powers]
    vectors = [(l @ r).flat() for l in left for r in powers]
    return rank_of_vectors(a.ring, vectors) == n * n


def permutation_element(s: HBiset, g: int, ring: Ring) -> ExactMatrix | None:
    """sum_i e_{g_i H, g_i g H}, or None if i -> g_i g H is not a bijection."""
    sr = s.semiring
    G = sr.group
    cosets = sr.cosets
    n = len(cosets)
    targets = [cosets.coset_of[G.mul(gi, g)] for gi in cosets.representatives]
    if len(set(targets)) != n:
        return None
    rows = [[ring.zero] * n for _ in range(n)]
    for i, j in enumerate(targets):
        rows[i][j] = ring.one
    return ExactMatrix(ring, rows, ncols=n)


def matching_element(p: SpanPattern, ring: Ring) -> ExactMatrix | None:
    """A permutation matrix supported on ``p``, if the pattern admits one."""
    n = p.n
    cost = np.ones((n, n))
    for i, j in p.entries():
        cost[i, j] = 0.0
    rows, cols = linear_sum_assignment(cost)
    if any((int(r), int(c)) not in p for r, c in zip(rows, cols)):
        return None
    out = [[ring.zero] * n for _ in range(n)]
    for r, c in zip(rows, cols):
        out[int(r)][int(c)] = ring.one
    return ExactMatrix(ring, out, ncols=n)


@dataclass(frozen=True)
class InvertibleWitness:
    element: PatternedElement
    det: object
    method: str


def find_invertible_in_span(
    s: HBiset, ring: Ring, *, attempts: int = 50, rng: np.random.Generator | None = None
) -> InvertibleWitness | None:
    """An invertible matrix inside phi(S).

    Tries the permutation element attached to each g in S, then a perfect
    matching of the (regular bipartite) pattern, then random fills.
    """
    if not s:
        raise BisetError("the empty biset contains no invertible element")
    if not ring.is_field:
        raise ValueError("find_invertible_in_span needs a field")
    pattern = phi_pattern(s)
    reps = s.semiring.cosets.representatives
    for j in iter_bits(pattern.rows[0]):
        m = permutation_element(s, reps[j], ring)
        if m is not None:
            d = m.det()
            if not ring.is_zero(d):
                return InvertibleWitness(PatternedElement(pattern, m), d, "permutation")
    m = matching_element(pattern, ring)
    if m is not None:
        d = m.det()
        if not ring.is_zero(d):
            return InvertibleWitness(PatternedElement(pattern, m), d, "matching")
    rng = np.random.default_rng(0) if rng is None else rng
    for _ in range(attempts):
        x = PatternedElement.random(pattern, ring, rng)
        d = x.matrix.det()
        if not ring.is_zero(d):
            return InvertibleWitness(x, d, "random")
    return None


def trace_zero_check(s: HBiset) -> bool:
    """True iff every element of phi(S) has trace zero, i.e. H is not in S."""
    pattern_side = phi_pattern(s).diagonal_empty()
    biset_side = not (s.classes & 1)
    if pattern_side != biset_side:
        raise CounterexampleError("diagonal test and H-membership disagree", {"classes": s.class_set})
    return pattern_side


# centralizers -----------------------------------------------------------------


def intermediate_subgroups(semiring: BisetSemiring) -> list[HBiset]:
    """Every subgroup H' with H <= H' <= G, as bisets."""
    return [s for s in semiring.all_bisets() if s.classes & 1 and s.is_subgroup()]


def commutant_pattern(blocks: Sequence[int], ring: Ring = QQ) -> SpanPattern:
    """Support of the commutant of the diagonal matrices constant on ``blocks``.

    Solved as a linear system X D - D X = 0 in the n^2 entries of X, one
    block indicator D at a time; the union of supports of a nullspace basis
    is the pattern.
    """
    n = len(blocks)
    labels = sorted(set(blocks))
    equations = []
    for b in labels:
        d = [ring.one if blocks[i] == b else ring.zero for i in range(n)]
        for i in range(n):
            for j in range(n):
                row = [ring.zero] * (n * n)
                row[i * n + j] = ring.sub(d[j], d[i])
                equations.append(row)
    basis = ExactMatrix(ring, equations).nullspace()
    entries = set()
    for v in basis:
        for k, x in enumerate(v):
            if not ring.is_zero(x):
                entries.add(divmod(k, n))
    return SpanPattern.from_entries(n, entries)


def _as_biset(semiring: BisetSemiring, sub: SubgroupH | HBiset) -> HBiset:
    if isinstance(sub, HBiset):
        return sub
    if sub.parent is not semiring.group:
        raise BisetError("subgroup belongs to a different group")
    return semiring.from_mask(sub.mask)


def centralizer_pattern(semiring: BisetSemiring, h_prime: SubgroupH | HBiset) -> SpanPattern:
    """phi(H'), checked against the commutant of the block-constant diagonals."""
    hp = _as_biset(semiring, h_prime)
    if not hp.classes & 1:
        raise BisetError("H is not contained in H'")
    if not hp.is_subgroup():
        raise BisetError("H' is not a subgroup")
    G = semiring.group
    blocks = []
    for gi in semiring.cosets.representatives:
        blocks.append(min(G.mul(gi, h) for h in iter_bits(hp.mask)))
    expected = commutant_pattern(blocks)
    got = phi_pattern(hp)
    if got != expected:
        raise CounterexampleError("phi(H') differs from the commutant pattern", {"classes": hp.class_set})
    return got


def twisted_centralizer_pattern(semiring: BisetSemiring, n_sub: SubgroupH | HBiset, sigma: int) -> SpanPattern:
    """phi(N sigma) for sigma normalizing N, checked against block permutation."""
    N = _as_biset(semiring, n_sub)
    G = semiring.group
    if not (N.classes & 1 and N.is_subgroup()):
        raise BisetError("N must be a subgroup containing H")
    if G.conjugate_set(sigma, N.mask) != N.mask:
        raise BisetError("sigma does not normalize N")
    twisted = semiring.from_mask(G.right_translate(N.mask, sigma))
    got = phi_pattern(twisted)
    # g_j N = g_i sigma N  <=>  g_i^-1 g_j in N sigma
    nmask = list(iter_bits(N.mask))

    def ncoset(x: int) -> int:
        return min(G.mul(x, y) for y in nmask)

    reps = semiring.cosets.representatives
    rows = []
    for gi in reps:
        target = ncoset(G.mul(gi, sigma))
        rows.append(mask_of(j for j, gj in enumerate(reps) if ncoset(gj) == target))
    expected = SpanPattern(len(reps), tuple(rows))
    if got != expected:
        raise CounterexampleError("phi(N sigma) differs from the block permutation", {"sigma": sigma})
    return got


# power chains on the algebra side ---------------------------------------------


class NotGenericError(RuntimeError):
    pass


@dataclass(frozen=True)
class PowerChain:
    patterns: tuple[SpanPattern, ...]
    dims: tuple[int, ...]
    algebra_height: int
    biset_height: int
    retries: int


def _span_step(current: SpanPattern, a: ExactMatrix, ring: Ring, rng, samples: int) -> SpanPattern:
    # K-K span of (current span) * a, from the supports of random elements.
    out = SpanPattern.empty(current.n)
    for _ in range(samples):
        x = PatternedElement.random(current, ring, rng)
        out = out | support_pattern(x.matrix @ a)
    return out


def kak_power_chain(
    a: PatternedElement,
    s: HBiset,
    m_max: int,
    *,
    rng: np.random.Generator,
    samples: int = 2,
    retries: int = 3,
) -> PowerChain:
    """Spans of (KaK)^m for m = 1..m_max, each compared with phi(S^m).

    ``a`` should be invertible with support exactly phi(S).  A step whose
    sampled span comes out smaller than predicted is retried with fresh
    randomness; the count of retries is reported.
    """
    ring = a.matrix.ring
    if not ring.is_field:
        raise ValueError("kak_power_chain needs a field")
    target_a = phi_pattern(s)
    if support_pattern(a.matrix) != target_a:
        raise NotGenericError("a does not fill the pattern of S")
    if ring.is_zero(a.matrix.det()):
        raise ValueError("a is not invertible")
    n = target_a.n
    current = SpanPattern.identity(n)
    patterns = []
    used = 0
    power = s.semiring.one
    for _m in range(1, m_max + 1):
        power = power * s
        expected = phi_pattern(power)
        for attempt in range(retries + 1):
            got = _span_step(current, a.matrix, ring, rng, samples)
            if not got.issubset(expected):
                raise CounterexampleError("span of (KaK)^m exceeds phi(S^m)", {"m": _m})
            if got == expected:
                break
            used += 1
        else:
            raise NotGenericError(f"span of (KaK)^{_m} stayed below phi(S^{_m})")
        patterns.append(got)
        current = got
    dims = tuple(p.count() // n for p in patterns)
    # V_m a is inside V_{m+1} with the same dimension, so K(a, m) = K(a, m+1)
    # exactly when the dimensions agree.
    chain = (1,) + dims
    alg_height = next((m for m in range(len(chain) - 1) if chain[m] == chain[m + 1]), None)
    G = s.semiring.group
    g = s.semiring.table.representatives[s.class_set[0]] if s else G.identity
    biset_height = height_profile(s.semiring, g).height if len(s.class_set) == 1 else -1
    if alg_height is None:
        alg_height = -1
    elif biset_height >= 0 and alg_height != biset_height:
        raise CounterexampleError(
            "algebra-side height differs from biset height", {"algebra": alg_height, "biset": biset_height}
        )
    return PowerChain(tuple(patterns), dims, alg_height, biset_height, used)
