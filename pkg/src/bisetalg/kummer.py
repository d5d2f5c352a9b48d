"""When is the bimodule attached to a biset a Kummer space?

Two independent checks are compared everywhere:

* the biset side: no product of k elements of S equals 1, for k <= r,
  which for an H-biset is the statement that class 0 (H itself) is
  missing from S^k;
* the matrix side: every symmetrized trace of k matrix units from phi(S)
  vanishes over QQ.  Each such trace counts closed chains, so it is a
  nonnegative integer, and their sum over all ordered k-tuples of units is
  (k-1)! tr(P^k) for the 0/1 pattern matrix P.  Hence all of them vanish
  exactly when tr(P^k) = 0.  Small cases are also enumerated directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Sequence

import numpy as np

from ._bits import iter_bits
from .bisets import BisetSemiring, CounterexampleError, HBiset
from .fields import QQ, ZZ, GF, RationalField, IntegerRing, Ring
from .matrices import ExactMatrix
from .matrix_model import SpanPattern, phi_pattern
from .newton import char_coeffs, symmetrized_trace

ENUMERATION_BUDGET = 20_000
# witnesses up to this length are also multiplied out as matrices
MATRIX_RECHECK_MAX_K = 5


# the biset side -------------------------------------------------------------------


@dataclass(frozen=True)
class BisetSide:
    ok: bool
    r: int
    failing_k: int | None
    witness: tuple[int, ...] | None


def biset_powers(s: HBiset, r: int) -> list[HBiset]:
    """[S^0, S^1, ..., S^r]."""
    out = [s.semiring.one]
    for _ in range(r):
        out.append(out[-1] * s)
    return out


def product_one_witness(s: HBiset, k: int, powers: Sequence[HBiset] | None = None) -> tuple[int, ...] | None:
    """Elements g_1..g_k of S with g_1 ... g_k = 1, or None if there are none.

    Greedy descent: pick g_1 with g_1^-1 in S^(k-1), then g_2 with
    g_2^-1 g_1^-1 in S^(k-2), and so on; membership guarantees success.
    """
    G = s.semiring.group
    powers = biset_powers(s, k) if powers is None else powers
    if G.identity not in powers[k]:
        return None
    target = G.identity  # remaining product still to realize
    chosen = []
    for step in range(k, 0, -1):
        rest = powers[step - 1].mask if step > 1 else 1 << G.identity
        for g in s.elements():
            need = G.mul(G.inv(g), target)
            if (rest >> need) & 1:
                chosen.append(g)
                target = need
                break
        else:  # pragma: no cover - excluded by the membership test above
            raise CounterexampleError("witness descent got stuck", {"k": k})
    if target != G.identity:
        raise CounterexampleError("witness does not multiply to 1", {"k": k})
    return tuple(chosen)


def biset_kummer_check(s: HBiset, r: int) -> BisetSide:
    """H not inside S^k for every 1 <= k <= r."""
    n = s.semiring.index
    if not 0 <= r <= n:
        raise ValueError(f"r must lie in 0..{n}")
    powers = biset_powers(s, r)
    G = s.semiring.group
    for k in range(1, r + 1):
        has_h = bool(powers[k].classes & 1)
        if has_h != (G.identity in powers[k]):
            raise CounterexampleError("1 in S^k disagrees with H in S^k", {"k": k})
        if has_h:
            return BisetSide(False, r, k, product_one_witness(s, k, powers))
    return BisetSide(True, r, None, None)


# the matrix side ---------------------------------------------------------------------


def unit_symmetrized_trace(units: Sequence[tuple[int, int]]) -> int:
    """tr(e_1, ..., e_k) for matrix units: the number of closing orderings.

    The first unit stays first; the others are taken in every order (by
    position, so repeated units count separately) and an ordering
    contributes 1 when consecutive units chain and the last returns to the
    start.
    """
    start, end = units[0]
    rest = list(units[1:])
    if not rest:
        return int(start == end)
    used = [False] * len(rest)

    def walk(cur: int, left: int) -> int:
        if left == 0:
            return int(cur == start)
        total = 0
        for idx, (i, j) in enumerate(rest):
            if not used[idx] and i == cur:
                used[idx] = True
                total += walk(j, left - 1)
                used[idx] = False
        return total

    return walk(end, len(rest))


def closed_walk(pattern: SpanPattern, k: int) -> list[tuple[int, int]] | None:
    """Units (i_0,i_1), ..., (i_{k-1},i_0) of a closed walk of length k."""
    n = pattern.n
    for start in range(n):
        # reach[t] = set of vertices reachable from start in t steps
        reach = [1 << start]
        for _ in range(k):
            nxt = 0
            for v in iter_bits(reach[-1]):
                nxt |= pattern.rows[v]
            reach.append(nxt)
        if not (reach[k] >> start) & 1:
            continue
        # walk backwards from start choosing predecessors still reachable
        path = [start]
        cur = start
        for t in range(k - 1, -1, -1):
            pred = next(v for v in iter_bits(reach[t]) if (pattern.rows[v] >> cur) & 1)
            path.append(pred)
            cur = pred
        path.reverse()
        return [(path[t], path[t + 1]) for t in range(k)]
    return None


def _pattern_matrix(pattern: SpanPattern) -> ExactMatrix:
    return ExactMatrix(ZZ, [[(r >> j) & 1 for j in range(pattern.n)] for r in pattern.rows], ncols=pattern.n)


def pattern_power_traces(pattern: SpanPattern, r: int) -> list[int]:
    """[tr(P^1), ..., tr(P^r)] over ZZ."""
    p = _pattern_matrix(pattern)
    out = []
    acc = p
    for _ in range(r):
        out.append(acc.trace())
        acc = acc @ p
    return out


@dataclass(frozen=True)
class MatrixSide:
    ok: bool
    r: int
    failing_k: int | None
    witness: tuple[tuple[int, int], ...] | None
    witness_trace: object
    mode: str


def matrix_kummer_check(
    s: HBiset | SpanPattern, r: int, ring: Ring = QQ, *, budget: int = ENUMERATION_BUDGET
) -> MatrixSide:
    """TTL on the matrix units spanning phi(S), for k <= r.

    ``mode`` is ``"enumerated"`` when every multiset of units was evaluated
    (and agreed with the trace certificate), else ``"certificate"``.
    """
    if not isinstance(ring, (RationalField, IntegerRing)):
        raise ValueError("the matrix-side Kummer check runs over QQ (or ZZ)")
    pattern = s if isinstance(s, SpanPattern) else phi_pattern(s)
    units = pattern.entries()
    e = len(units)
    total_multisets = sum(comb(e + k - 1, k) for k in range(1, r + 1))
    enumerate_all = total_multisets <= budget
    traces = pattern_power_traces(pattern, r)
    for k in range(1, r + 1):
        cert_fails = traces[k - 1] != 0
        enum_witness = None
        if enumerate_all:
            for combo in combinations_with_replacement(units, k):
                if unit_symmetrized_trace(combo):
                    enum_witness = combo
                    break
            if (enum_witness is not None) != cert_fails:
                raise CounterexampleError("enumeration and trace certificate disagree", {"k": k})
        if cert_fails:
            witness = tuple(enum_witness) if enum_witness is not None else tuple(closed_walk(pattern, k))
            value = ring.from_int(unit_symmetrized_trace(witness))
            if k <= MATRIX_RECHECK_MAX_K:
                mats = [_unit(ring, pattern.n, i, j) for i, j in witness]
                if symmetrized_trace(mats) != value:
                    raise CounterexampleError("unit chain count differs from the matrix trace", {"k": k})
            if ring.is_zero(value):
                raise CounterexampleError("witness units have zero symmetrized trace", {"k": k})
            return MatrixSide(False, r, k, witness, value, "enumerated" if enumerate_all else "certificate")
    return MatrixSide(True, r, None, None, None, "enumerated" if enumerate_all else "certificate")


def _unit(ring: Ring, n: int, i: int, j: int) -> ExactMatrix:
    return ExactMatrix.unit(ring, n, i, j)


# verdicts and sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class KummerVerdict:
    biset: HBiset = field(repr=False)
    r: int
    biset_side_ok: bool
    matrix_side_ok: bool
    biset_failing_k: int | None
    matrix_failing_k: int | None
    biset_witness: tuple[int, ...] | None
    matrix_witness: tuple[tuple[int, int], ...] | None
    matrix_mode: str

    @property
    def kummer(self) -> bool:
        return self.biset_side_ok and self.matrix_side_ok

    def as_dict(self) -> dict:
        G = self.biset.semiring.group
        return {
            "classes": self.biset.class_set,
            "r": self.r,
            "kummer": self.kummer,
            "biset_side_ok": self.biset_side_ok,
            "matrix_side_ok": self.matrix_side_ok,
            "biset_failing_k": self.biset_failing_k,
            "matrix_failing_k": self.matrix_failing_k,
            "biset_witness": None
            if self.biset_witness is None
            else [G.format_element(g) for g in self.biset_witness],
            "matrix_witness": None if self.matrix_witness is None else [list(u) for u in self.matrix_witness],
            "matrix_mode": self.matrix_mode,
        }


def kummer_verdict(s: HBiset, r: int) -> KummerVerdict:
    """Both sides at once; they must agree (raises otherwise)."""
    b = biset_kummer_check(s, r)
    m = matrix_kummer_check(s, r)
    if b.ok != m.ok or b.failing_k != m.failing_k:
        raise CounterexampleError(
            "biset and matrix Kummer checks disagree",
            {"classes": s.class_set, "r": r, "biset_k": b.failing_k, "matrix_k": m.failing_k},
        )
    return KummerVerdict(s, r, b.ok, m.ok, b.failing_k, m.failing_k, b.witness, m.witness, m.mode)


def p41_equivalence_sweep(semirings: Sequence[BisetSemiring], *, max_r: int = 6) -> dict:
    """Compare both sides on every single class and union of two classes."""
    checks = 0
    mismatches = []
    per_group = []
    for sr in semirings:
        rmax = min(max_r, sr.index)
        bisets = [sr.zero] + sr.small_unions(2)
        count = 0
        for s in bisets:
            # the checks at r are prefixes of the check at rmax
            b = biset_kummer_check(s, rmax)
            m = matrix_kummer_check(s, rmax)
            for r in range(1, rmax + 1):
                b_ok = b.failing_k is None or b.failing_k > r
                m_ok = m.failing_k is None or m.failing_k > r
                checks += 1
                count += 1
                if b_ok != m_ok:
                    mismatches.append({"group": sr.name, "classes": s.class_set, "r": r})
        per_group.append({"group": sr.name, "bisets": len(bisets), "checks": count})
    return {"checks": checks, "mismatches": mismatches, "groups": per_group, "ok": not mismatches}


# Ka against KaK --------------------------------------------------------------------------


def generic_positive_element(s: HBiset, rng: np.random.Generator, *, high: int = 9) -> ExactMatrix:
    """Random integer matrix with entries in 1..high exactly on phi(S)."""
    pattern = phi_pattern(s)
    n = pattern.n
    rows = [[0] * n for _ in range(n)]
    for i, j in pattern.entries():
        rows[i][j] = int(rng.integers(1, high + 1))
    return ExactMatrix(ZZ, rows, ncols=n)


def column_slice(a: ExactMatrix, j: int) -> ExactMatrix:
    """a e_jj: column j of a, all else zero."""
    n = a.nrows
    ring = a.ring
    return ExactMatrix(ring, [[a.rows[i][c] if c == j else ring.zero for c in range(n)] for i in range(n)], ncols=n)


def _column_word_trace(a: ExactMatrix, word: Sequence[int]) -> int:
    # tr(a e_{w1} a e_{w2} ... a e_{wk}) = a[w1,w2] a[w2,w3] ... a[wk,w1]
    k = len(word)
    out = 1
    for t in range(k):
        out *= a.rows[word[t]][word[(t + 1) % k]]
        if not out:
            return 0
    return out


def _column_symmetrized_trace(a: ExactMatrix, combo: Sequence[int]) -> int:
    from itertools import permutations

    first, rest = combo[0], combo[1:]
    return sum(_column_word_trace(a, (first,) + p) for p in permutations(rest))


def ka_side_check(a: ExactMatrix, r: int, *, budget: int = 200_000) -> tuple[int | None, str]:
    """First k <= r at which TTL fails on the column slices of ``a`` (entries >= 0).

    Every symmetrized trace of column slices is a sum of products of
    nonnegative entries, and their total over ordered k-tuples is
    (k-1)! tr(a^k), so tr(a^k) decides the question; small cases are
    enumerated as well.
    """
    n = a.nrows
    cost = sum(comb(n + k - 1, k) * factorial(max(k - 1, 0)) for k in range(1, r + 1))
    enumerate_all = cost <= budget
    p = a
    for k in range(1, r + 1):
        cert = p.trace() != 0
        if enumerate_all:
            enum = any(_column_symmetrized_trace(a, c) for c in combinations_with_replacement(range(n), k))
            if enum != cert:
                raise CounterexampleError("column enumeration and tr(a^k) disagree", {"k": k})
        if cert:
            return k, "enumerated" if enumerate_all else "certificate"
        p = p @ a
    return None, "enumerated" if enumerate_all else "certificate"


def ka_vs_kak_check(s: HBiset, r: int, *, rng: np.random.Generator | None = None, samples: int = 4) -> dict:
    """Ka-shaped TTL against full-pattern TTL for a single class S."""
    if len(s.class_set) != 1:
        raise ValueError("ka_vs_kak_check expects a single double coset")
    rng = np.random.default_rng(0) if rng is None else rng
    sr = s.semiring
    a = generic_positive_element(s, rng)
    ka_k, ka_mode = ka_side_check(a, r)
    kak = matrix_kummer_check(s, r)
    ka_ok = ka_k is None
    if ka_ok != kak.ok or ka_k != kak.failing_k:
        raise CounterexampleError(
            "Ka-side and KaK-side TTL disagree", {"classes": s.class_set, "ka_k": ka_k, "kak_k": kak.failing_k}
        )

    # the slices used in the proof: v_i = a e_{tau_i tau_i}, tau_i = g_1...g_i H
    proof_trace = None
    if not ka_ok:
        b = biset_kummer_check(s, r)
        G = sr.group
        prefix = G.identity
        taus = []
        for g in b.witness:
            prefix = G.mul(prefix, g)
            taus.append(sr.cosets.coset_of[prefix])
        proof_trace = _column_symmetrized_trace(a, taus)
        if len(taus) <= MATRIX_RECHECK_MAX_K:
            if symmetrized_trace([column_slice(a, t) for t in taus]) != proof_trace:
                raise CounterexampleError("column word sum differs from the matrix trace", {"taus": taus})
        if proof_trace == 0:
            raise CounterexampleError("proof-shaped slices have zero symmetrized trace", {"taus": taus})

    # sampled TR on the span of the slices, over QQ
    slices = [column_slice(a, j).with_ring(QQ) for j in range(a.nrows)]
    sampled_tr = True
    for _ in range(samples):
        coeffs = [QQ.from_int(int(c)) for c in rng.integers(-9, 10, size=len(slices))]
        x = slices[0].scale(coeffs[0])
        for c, v in zip(coeffs[1:], slices[1:]):
            x = x + v.scale(c)
        rho = char_coeffs(x).rho
        if any(rho[k] != 0 for k in range(1, min(r, x.nrows) + 1)):
            sampled_tr = False
            break
    if ka_ok and not sampled_tr:
        raise CounterexampleError("TTL on Ka holds but a sampled rho_k is nonzero", {"classes": s.class_set})

    return {
        "classes": s.class_set,
        "r": r,
        "ka_ok": ka_ok,
        "kak_ok": kak.ok,
        "failing_k": ka_k,
        "ka_mode": ka_mode,
        "kak_mode": kak.mode,
        "proof_witness_trace": None if proof_trace is None else int(proof_trace),
        "ka_sampled_rho_zero": sampled_tr,
        "agree": True,
    }


# the cyclicity classification ------------------------------------------------------------


def kum1_classify(s: HBiset) -> dict:
    """Kummer test at r = n-1 for a single class, with the structure it forces.

    A passing class must be a single coset gH with H normal, H, gH, ...,
    g^(n-1)H distinct, and so G/H cyclic; with H core-free this means H = 1,
    G cyclic of order n and S = {g}.
    """
    if len(s.class_set) != 1:
        raise ValueError("kum1_classify expects a single double coset")
    sr = s.semiring
    G = sr.group
    H = sr.subgroup
    n = sr.index
    if n < 2:
        raise ValueError("need [G:H] >= 2")
    core_trivial = H.has_trivial_core()
    verdict = kummer_verdict(s, n - 1)
    g = sr.table.representatives[s.class_set[0]]
    report = {
        "classes": s.class_set,
        "n": n,
        "kummer": verdict.kummer,
        "failing_k": verdict.biset_failing_k,
        "core_trivial": core_trivial,
    }
    if not verdict.kummer:
        report["conclusion"] = "not Kummer at r = n-1"
        return report

    facts = {}
    facts["single_coset"] = s.size == H.order and s.mask == G.left_translate(g, H.mask)
    cosets = []
    x = G.identity
    for _ in range(n):
        cosets.append(sr.cosets.coset_of[x])
        x = G.mul(x, g)
    facts["powers_distinct"] = len(set(cosets)) == n
    facts["H_normal"] = H.is_normal()
    if core_trivial:
        facts["H_trivial"] = H.order == 1
        facts["G_cyclic_generated_by_g"] = G.generated([g]) == G.full_mask and G.order == n
        facts["S_is_g"] = s.mask == 1 << g
        report["conclusion"] = "H = 1, G cyclic of order n, S = {g}"
    else:
        facts["quotient_cyclic"] = facts["powers_distinct"] and facts["H_normal"]
        report["conclusion"] = "degenerate H (nontrivial core): H normal, G/H cyclic of order n, S = gH"
    report["generator"] = G.format_element(g)
    report["facts"] = facts
    if not all(facts.values()):
        raise CounterexampleError("a Kummer class violates the cyclic classification", report)
    return report


# search harness for the trace-power variant -------------------------------------------------


def _cyclic_products_mod_p(a: np.ndarray, n: int, k: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    words = np.indices((n,) * k).reshape(k, -1).T
    prod = np.ones(len(words), dtype=np.int64)
    for t in range(k):
        prod = prod * a[words[:, t], words[:, (t + 1) % k]] % p
    content = np.sort(words, axis=1)
    return content, prod


def trace_power_hypothesis(a: np.ndarray, r: int, p: int) -> bool:
    """tr(x^k) = 0 identically on the span of the column slices of ``a`` over GF(p)-bar.

    tr((sum_j t_j a e_jj)^k) is a polynomial in the t_j; the coefficient of a
    monomial is the sum over words with that content of the cyclic product
    of entries of ``a``.  The hypothesis holds iff all coefficients vanish.
    """
    n = a.shape[0]
    for k in range(1, r + 1):
        content, prod = _cyclic_products_mod_p(a, n, k, p)
        keys = content @ (n ** np.arange(k, dtype=np.int64))
        _, inverse = np.unique(keys, return_inverse=True)
        sums = np.bincount(inverse, weights=prod % p).astype(np.int64)
        if np.any(sums % p):
            return False
    return True


def trace_power_search(
    semirings: Sequence[BisetSemiring],
    *,
    primes: Sequence[int] = (2, 3),
    trials: int = 2,
    seed: int = 0,
    word_cap: int = 200_000,
) -> dict:
    """Look for a with tr(x^k) = 0 on Ka (k <= n-1) while KaK is not Kummer.

    Nothing is asserted: this is an open question and the harness only
    records candidates, one per (group, class, p).  In characteristic 2 the
    hypothesis is often met for trivial reasons (tr(x^2) = tr(x)^2), so
    such candidates say little on their own.
    """
    rng = np.random.default_rng(seed)
    examined = 0
    hypothesis_held = 0
    candidates = []
    seen = set()
    skipped = 0
    for sr in semirings:
        n = sr.index
        r = n - 1
        if r < 1:
            continue
        for c in range(1, sr.n_classes):
            s = sr.atom(c)
            pattern = phi_pattern(s)
            side = biset_kummer_check(s, r)
            for p in primes:
                if n**r > word_cap:
                    skipped += 1
                    continue
                for _ in range(trials):
                    a = np.zeros((n, n), dtype=np.int64)
                    for i, j in pattern.entries():
                        a[i, j] = rng.integers(1, p)
                    examined += 1
                    if trace_power_hypothesis(a, r, p):
                        hypothesis_held += 1
                        key = (sr.name, c, p)
                        if not side.ok and key not in seen:
                            seen.add(key)
                            candidates.append(
                                {"group": sr.name, "class": c, "p": p, "failing_k": side.failing_k, "a": a.tolist()}
                            )
    return {
        "examined": examined,
        "hypothesis_held": hypothesis_held,
        "candidates": candidates,
        "skipped_over_cap": skipped,
    }
