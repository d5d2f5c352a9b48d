"""Trace identities that hold in every characteristic.

``rho_i(a)`` is the signed characteristic coefficient: (-1)^i rho_i(a) is the
coefficient of t^(n-i) in det(tI - a), so rho_1 is the trace and rho_n the
determinant.  The polarized ``rho_k(a_1, ..., a_k)`` is the coefficient of
t_1...t_k in rho_k(t_1 a_1 + ... + t_k a_k); the partition identity
expresses it through symmetrized traces of the blocks of every set
partition of the arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations, combinations_with_replacement, product
from math import factorial
from typing import Iterator, Sequence

import numpy as np

from .fields import GF, QQ, ZZ, IntegerRing, RationalField, Ring
from .matrices import ExactMatrix

PARTITION_CAP = 9


@dataclass(frozen=True)
class CharCoeffs:
    rho: tuple

    @property
    def n(self) -> int:
        return len(self.rho) - 1

    def __getitem__(self, i: int):
        return self.rho[i]


def char_coeffs(a: ExactMatrix, *, check: bool = False) -> CharCoeffs:
    """rho_0..rho_n by the division-free Berkowitz recurrence.

    With ``check=True`` the trace and determinant are recomputed by
    independent routines and compared.
    """
    ring = a.ring
    c = a.charpoly()
    rho = tuple(x if i % 2 == 0 else ring.neg(x) for i, x in enumerate(c))
    if check:
        n = a.nrows
        if n and rho[1] != a.trace():
            raise AssertionError("rho_1 differs from the trace")
        if n and (ring.is_field or isinstance(ring, IntegerRing)) and rho[n] != a.det():
            raise AssertionError("rho_n differs from the determinant")
    return CharCoeffs(rho)


def rho(a: ExactMatrix, k: int):
    """rho_k(a); zero when k exceeds the size of ``a``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    coeffs = char_coeffs(a).rho
    return coeffs[k] if k < len(coeffs) else a.ring.zero


def newton_identity_check(a: ExactMatrix, k: int) -> bool:
    """k rho_k(a) = sum_{i=1..k} (-1)^(i-1) rho_{k-i}(a) tr(a^i), exactly."""
    ring = a.ring
    if not isinstance(ring, (IntegerRing, RationalField)):
        raise ValueError("the classical identity is checked over ZZ or QQ only")
    n = a.nrows
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    r = char_coeffs(a).rho
    lhs = k * r[k]
    rhs = 0
    p = a
    for i in range(1, k + 1):
        term = r[k - i] * p.trace()
        rhs += term if i % 2 == 1 else -term
        p = p @ a
    return lhs == rhs


# symmetrized traces -----------------------------------------------------------


def symmetrized_trace(mats: Sequence[ExactMatrix]):
    """sum over orderings of mats[1:] of tr(mats[0] mats[s(1)] ... mats[s(k-1)]).

    Orderings share prefixes: products are extended one factor at a time and
    the last factor is folded into a trace-of-product.
    """
    if not mats:
        raise ValueError("at least one matrix is required")
    ring = mats[0].ring
    if len(mats) == 1:
        return mats[0].trace()
    acc = []

    def walk(prefix: ExactMatrix, rest: tuple[int, ...]) -> None:
        if len(rest) == 1:
            acc.append(prefix.trace_of_product(mats[rest[0]]))
            return
        for pos, idx in enumerate(rest):
            walk(prefix @ mats[idx], rest[:pos] + rest[pos + 1 :])

    walk(mats[0], tuple(range(1, len(mats))))
    return ring.sum(acc)


def symmetrized_trace_naive(mats: Sequence[ExactMatrix]):
    """Definition-level version: one full product per permutation."""
    from itertools import permutations

    ring = mats[0].ring
    total = ring.zero
    for perm in permutations(range(1, len(mats))):
        m = mats[0]
        for i in perm:
            m = m @ mats[i]
        total = ring.add(total, m.trace())
    return total


def polarized_rho(k: int, mats: Sequence[ExactMatrix]):
    """Multilinear rho_k by inclusion-exclusion over subsets of the arguments."""
    if len(mats) != k:
        raise ValueError(f"expected {k} matrices, got {len(mats)}")
    if k == 0:
        return mats[0].ring.one if mats else ZZ.one
    ring = mats[0].ring
    n = mats[0].nrows
    if k > n:
        return ring.zero
    total = ring.zero
    for size in range(1, k + 1):
        sign_neg = (k - size) % 2 == 1
        for subset in combinations(range(k), size):
            s = reduce(lambda x, y: x + y, (mats[i] for i in subset))
            v = char_coeffs(s).rho[k]
            total = ring.sub(total, v) if sign_neg else ring.add(total, v)
    return total


# set partitions ------------------------------------------------------------------


@dataclass(frozen=True)
class SetPartition:
    """A partition of ``{0, ..., r-1}``; blocks sorted by their least element."""

    blocks: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def sign(self) -> int:
        return -1 if (self.r - len(self.blocks)) % 2 else 1

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "SetPartition":
        blocks: list[list[int]] = []
        for i, b in enumerate(rgs):
            if b == len(blocks):
                blocks.append([])
            blocks[b].append(i)
        return cls(tuple(tuple(b) for b in blocks))

    def __str__(self) -> str:
        return "|".join("".join(str(i + 1) for i in b) for b in self.blocks)


def enumerate_partitions(r: int) -> Iterator[SetPartition]:
    """All set partitions of r points in restricted-growth-string order."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if r > PARTITION_CAP:
        raise ValueError(f"r = {r} exceeds the partition cap {PARTITION_CAP}")
    a = [0] * r
    b = [1] * r  # b[i] = 1 + max(a[:i])
    while True:
        yield SetPartition.from_rgs(a)
        i = r - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, r):
            a[j] = 0
            b[j] = max(b[i], a[i] + 1)


def bell_number(r: int) -> int:
    row = [1]
    for _ in range(r):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def partition_sum(mats: Sequence[ExactMatrix]):
    """sum over set partitions of sign * prod over blocks of tr(block)."""
    ring = mats[0].ring
    cache: dict[tuple[int, ...], object] = {}

    def tr_block(block: tuple[int, ...]):
        if block not in cache:
            cache[block] = symmetrized_trace([mats[i] for i in block])
        return cache[block]

    total = ring.zero
    for part in enumerate_partitions(len(mats)):
        term = ring.one
        for block in part.blocks:
            term = ring.mul(term, tr_block(block))
        total = ring.add(total, term) if part.sign > 0 else ring.sub(total, term)
    return total


def verify_NI_plus(mats: Sequence[ExactMatrix]) -> bool:
    r = len(mats)
    return polarized_rho(r, mats) == partition_sum(mats)


# trace conditions on a space -------------------------------------------------------


def span_elements(basis: Sequence[ExactMatrix], coeffs: Sequence) -> ExactMatrix:
    ring = basis[0].ring
    acc = ExactMatrix.zeros(ring, basis[0].nrows)
    for c, b in zip(coeffs, basis):
        acc = acc + b.scale(c)
    return acc


def _span_samples(basis, rng, samples: int, exhaustive_cap: int) -> tuple[list[ExactMatrix], bool]:
    ring = basis[0].ring
    order = getattr(ring, "order", None)
    if order is not None and order ** len(basis) <= exhaustive_cap:
        elems = [span_elements(basis, c) for c in product(range(order), repeat=len(basis))]
        return elems, True
    out = []
    for _ in range(samples):
        out.append(span_elements(basis, [ring.random(rng) for _ in basis]))
    return out, False


def _power_traces(x: ExactMatrix, r: int) -> list:
    out = []
    p = x
    for _ in range(r):
        out.append(p.trace())
        p = p @ x
    return out


def _r_factorial_invertible(ring: Ring, r: int) -> bool:
    ch = ring.characteristic
    return ch == 0 or ch > r


def trace_conditions(
    basis: Sequence[ExactMatrix],
    r: int,
    *,
    rng: np.random.Generator | None = None,
    samples: int = 64,
    exhaustive_cap: int = 4096,
) -> dict:
    """Evaluate TR, TT (on span elements) and TRL, TTL (on basis tuples).

    TR: rho_k(x) = 0; TT: tr(x^k) = 0, for every x in the span and k <= r.
    TRL / TTL: the polarized rho_k / symmetrized trace vanish on all
    k-tuples from the span; by multilinearity and symmetry it suffices to
    test multisets of basis elements.  Over a small finite field the span
    is enumerated, otherwise it is sampled and ``exhaustive`` is false.
    """
    if not basis:
        raise ValueError("empty basis")
    rng = np.random.default_rng(0) if rng is None else rng
    ring = basis[0].ring
    elems, exhaustive = _span_samples(basis, rng, samples, exhaustive_cap)
    per_sample = []
    for x in elems:
        rhos = char_coeffs(x).rho
        tr_ok = all(ring.is_zero(rhos[k]) if k < len(rhos) else True for k in range(1, r + 1))
        tt_ok = all(ring.is_zero(t) for t in _power_traces(x, r))
        per_sample.append((tr_ok, tt_ok))
    trl_witness = ttl_witness = None
    for k in range(1, r + 1):
        for combo in combinations_with_replacement(range(len(basis)), k):
            mats = [basis[i] for i in combo]
            if ttl_witness is None and not ring.is_zero(symmetrized_trace(mats)):
                ttl_witness = list(combo)
            if trl_witness is None and not ring.is_zero(polarized_rho(k, mats)):
                trl_witness = list(combo)
        if trl_witness is not None and ttl_witness is not None:
            break
    return {
        "TR": all(a for a, _ in per_sample),
        "TT": all(b for _, b in per_sample),
        "TRL": trl_witness is None,
        "TTL": ttl_witness is None,
        "TRL_witness": trl_witness,
        "TTL_witness": ttl_witness,
        "span_exhaustive": exhaustive,
        "span_points": len(per_sample),
        "per_sample": per_sample,
    }


def tr_tt_implication_check(basis: Sequence[ExactMatrix], r: int, **kwargs) -> dict:
    """Evaluate the four conditions and check every implication that must hold.

    Always: TR => TT pointwise, and TRL <=> TTL.  If (r-1)! is invertible,
    TTL => TT; if r! is invertible, TT => TR pointwise and the four agree.
    """
    ring = basis[0].ring
    cond = trace_conditions(basis, r, **kwargs)
    per_sample = cond.pop("per_sample")
    violations = []
    if any(a and not b for a, b in per_sample):
        violations.append("TR => TT")
    if cond["TRL"] != cond["TTL"]:
        violations.append("TRL <=> TTL")
    if _r_factorial_invertible(ring, r - 1) and cond["TTL"] and not cond["TT"]:
        violations.append("TTL => TT")
    if _r_factorial_invertible(ring, r):
        if any(b and not a for a, b in per_sample):
            violations.append("TT => TR")
        if len({cond["TR"], cond["TT"], cond["TRL"], cond["TTL"]}) != 1:
            violations.append("four conditions agree")
    cond.update(
        {
            "ring": ring.name,
            "r": r,
            "r_factorial_invertible": _r_factorial_invertible(ring, r),
            "violations": violations,
            "ok": not violations,
        }
    )
    return cond


# the characteristic-two example --------------------------------------------------


def _diag_basis(ring: Ring, rows: Sequence[Sequence]) -> list[ExactMatrix]:
    return [ExactMatrix.diag(ring, r) for r in rows]


def char2_families() -> tuple[Ring, int, int, list[ExactMatrix], list[ExactMatrix]]:
    """GF(4), alpha, alpha' and the two 3-dimensional diagonal families."""
    F = GF(4)
    al = F.generator
    al2 = F.add(al, 1)
    w = al  # a primitive cube root of unity in GF(4)
    first = _diag_basis(F, [(1, 0, 0, 0, al, al2), (0, 1, 0, 0, al2, al), (0, 0, 1, 1, 0, 0)])
    second = _diag_basis(F, [(1, 0, 0, 1, w, w), (0, 1, 0, w, 1, w), (0, 0, 1, w, w, 1)])
    return F, al, al2, first, second


def char2_example_suite() -> dict:
    """The two GF(4) families separating TT from TTL at r = 3."""
    F, al, al2, first, second = char2_families()
    checks: dict[str, bool] = {}
    checks["alpha_root"] = F.add(F.add(F.mul(al, al), al), 1) == 0
    checks["cube_root_primitive"] = al != 1 and F.pow(al, 3) == 1

    c1 = trace_conditions(first, 3)
    value = F.add(F.add(1, F.pow(al, 3)), F.pow(al2, 3))
    product_ = F.mul(al, al2)
    tr_a1_cubed = (first[0] @ first[0] @ first[0]).trace()
    checks["first_TTL"] = c1["TTL"]
    checks["first_TT_fails"] = not c1["TT"]
    checks["first_value_equals_product"] = value == product_
    checks["first_value_nonzero"] = value != 0
    checks["first_tr_a1_cubed"] = tr_a1_cubed == value

    c2 = trace_conditions(second, 3)
    checks["second_TT"] = c2["TT"] and c2["span_exhaustive"]
    checks["second_TTL_fails"] = not c2["TTL"]
    checks["second_tr_a1a2_nonzero"] = second[0].trace_of_product(second[1]) != 0

    triple = all(
        symmetrized_trace([fam[i], fam[j], fam[k]]) == 0
        for fam in (first, second)
        for i, j, k in product(range(3), repeat=3)
    )
    checks["commuting_triples_vanish"] = triple

    return {
        "field": F.name,
        "alpha": F.format(al),
        "alpha_prime": F.format(al2),
        "one_plus_cubes": F.format(value),
        "alpha_alpha_prime": F.format(product_),
        "first": {k: c1[k] for k in ("TR", "TT", "TRL", "TTL")},
        "second": {k: c2[k] for k in ("TR", "TT", "TRL", "TTL")},
        "checks": checks,
        "ok": all(checks.values()),
    }


# randomized suites ------------------------------------------------------------------

SUITE_RINGS = ("int", "gf:2", "gf:3", "gf:4")


def _config_rng(seed: int, ring: Ring, n: int, r: int) -> np.random.Generator:
    tag = sum(ord(c) for c in ring.name)
    return np.random.default_rng([seed, tag, n, r])


def newton_suite(
    n: int, r: int, ring: Ring, *, trials: int = 200, seed: int = 0, scalar_checks: int = 2
) -> dict:
    """The partition identity on ``trials`` random r-tuples of n x n matrices.

    Tuples are evaluated in one vectorized batch; the first ``scalar_checks``
    tuples are recomputed with the scalar routines and both sides compared.
    """
    from .batched import BatchArith, batched_ni_plus

    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    rng = _config_rng(seed, ring, n, r)
    arith = BatchArith(ring)
    mats = arith.random(rng, (trials, r, n, n))
    lhs, rhs = batched_ni_plus(ring, mats)
    failures = [int(i) for i in np.nonzero(lhs != rhs)[0]]
    for t in range(min(scalar_checks, trials)):
        args = [ExactMatrix(ring, mats[t, i].tolist(), ncols=n) for i in range(r)]
        if polarized_rho(r, args) != lhs[t] or partition_sum(args) != rhs[t]:
            failures.append(t)
    return {
        "n": n,
        "r": r,
        "ring": ring.name,
        "trials": trials,
        "passed": trials - len(set(failures)),
        "failed": len(set(failures)),
        "failing_trials": sorted(set(failures))[:10],
    }


def classical_newton_suite(*, max_n: int = 8, trials: int = 5, seed: int = 0, entry_range=(-3, 3)) -> dict:
    """Newton's identity over ZZ for every n <= max_n and k <= n."""
    rng = np.random.default_rng([seed, 8])
    lo, hi = entry_range
    checked = failed = 0
    for n in range(1, max_n + 1):
        for _ in range(trials):
            a = ExactMatrix(ZZ, rng.integers(lo, hi + 1, size=(n, n)).tolist(), ncols=n)
            for k in range(1, n + 1):
                checked += 1
                failed += not newton_identity_check(a, k)
    return {"max_n": max_n, "checked": checked, "failed": failed}


def full_newton_suite(*, trials: int = 200, seed: int = 0, max_n: int = 6, max_r: int = 5) -> dict:
    """Every (n, r, ring) configuration plus the classical identity."""
    from .fields import parse_ring

    configs = []
    for name in SUITE_RINGS:
        ring = parse_ring(name)
        for n in range(1, max_n + 1):
            for r in range(1, max_r + 1):
                configs.append(newton_suite(n, r, ring, trials=trials, seed=seed))
    classical = classical_newton_suite(seed=seed)
    ok = all(c["failed"] == 0 for c in configs) and classical["failed"] == 0
    return {
        "configs": configs,
        "tuples": sum(c["trials"] for c in configs),
        "classical": classical,
        "ok": ok,
    }
