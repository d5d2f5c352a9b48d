"""Group specifications: named families and explicit cycle notation.

Accepted forms (points are 0-based)::

    perm: (0 1 2)(3 4), (5 6)
    cyclic:n         C_n acting regularly on n points
    dihedral:n       order 2n acting on the vertices of an n-gon
    symmetric:n
    alternating:n
    frobenius:p:r:t  C_p x| C_r inside AGL(1, p), tau(i) = t*i
    regular:<spec>   the left regular action of the group <spec>

The distinguished subgroup H is always the stabilizer of a point (0 unless
stated otherwise).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .fields import is_prime
from .groups import (
    DEFAULT_ELEMENT_BUDGET,
    FiniteGroup,
    GroupError,
    Permutation,
    SubgroupH,
    close_generators,
    point_stabilizer,
)


class SpecError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True, eq=False)
class GroupInstance:
    name: str
    group: FiniteGroup
    subgroup: SubgroupH


def cyclic_generators(n: int) -> list[Permutation]:
    return [Permutation(tuple((i + 1) % n for i in range(n)))]


def dihedral_generators(n: int) -> list[Permutation]:
    return [Permutation(tuple((i + 1) % n for i in range(n))), Permutation(tuple(-i % n for i in range(n)))]


def symmetric_generators(n: int) -> list[Permutation]:
    gens = [Permutation(tuple((i + 1) % n for i in range(n)))]
    if n > 1:
        gens.append(Permutation.from_cycles([(0, 1)], n))
    return gens


def alternating_generators(n: int) -> list[Permutation]:
    if n < 3:
        return [Permutation.identity(n)]
    return [Permutation.from_cycles([(0, 1, i)], n) for i in range(2, n)]


def affine_generators(p: int, t: int) -> list[Permutation]:
    return [Permutation(tuple((i + 1) % p for i in range(p))), Permutation(tuple(t * i % p for i in range(p)))]


def multiplicative_order(t: int, p: int) -> int:
    if t % p == 0:
        raise ValueError(f"{t} is not a unit mod {p}")
    k, x = 1, t % p
    while x != 1:
        x = x * t % p
        k += 1
    return k


def parse_group_spec(spec: str, *, point: int = 0, budget: int = DEFAULT_ELEMENT_BUDGET) -> GroupInstance:
    """Build ``(G, H)`` from a spec string, with H the stabilizer of ``point``."""
    degree, gens = _parse(spec.strip(), 0, budget)
    G = close_generators(degree, gens, budget=budget)
    if not 0 <= point < max(degree, 1):
        raise SpecError(f"point {point} outside 0..{degree - 1}", 0)
    return GroupInstance(spec.strip(), G, point_stabilizer(G, point))


def _int(text: str, offset: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecError(f"expected integer {what}, got {text!r}", offset) from None


def _parse(spec: str, offset: int, budget: int) -> tuple[int, list[Permutation]]:
    head, sep, rest = spec.partition(":")
    kind = head.strip().lower()
    if not sep:
        raise SpecError(f"missing ':' in group spec {spec!r}", offset)
    body_at = offset + len(head) + 1
    if kind == "perm":
        return _parse_perm(rest, body_at)
    if kind == "regular":
        inner_degree, inner_gens = _parse(rest.strip(), body_at + len(rest) - len(rest.lstrip()), budget)
        inner = close_generators(inner_degree, inner_gens, budget=budget)
        gens = []
        for g in inner_gens:
            gi = inner.index_of(g)
            gens.append(Permutation(tuple(inner.mul(gi, x) for x in range(inner.order))))
        return inner.order, gens or [Permutation.identity(inner.order)]
    args = [a.strip() for a in rest.split(":")]
    if kind in ("cyclic", "dihedral", "symmetric", "alternating"):
        if len(args) != 1:
            raise SpecError(f"{kind} takes one argument", body_at)
        n = _int(args[0], body_at, "degree")
        if n < 1:
            raise SpecError("degree must be positive", body_at)
        if kind == "cyclic":
            return n, cyclic_generators(n)
        if kind == "dihedral":
            if n < 3:
                raise SpecError("dihedral:n needs n >= 3", body_at)
            return n, dihedral_generators(n)
        if kind == "symmetric":
            return n, symmetric_generators(n)
        return n, alternating_generators(n)
    if kind == "frobenius":
        if len(args) != 3:
            raise SpecError("frobenius takes p:r:t", body_at)
        p, r, t = (_int(a, body_at, "parameter") for a in args)
        if not is_prime(p):
            raise SpecError(f"{p} is not prime", body_at)
        try:
            order = multiplicative_order(t, p)
        except ValueError as exc:
            raise SpecError(str(exc), body_at) from None
        if order != r:
            raise SpecError(f"{t} has order {order} mod {p}, not {r}", body_at)
        return p, affine_generators(p, t)
    raise SpecError(f"unknown group family {kind!r}", offset)


_CYCLE = re.compile(r"\(([^()]*)\)")


def _parse_perm(body: str, offset: int) -> tuple[int, list[Permutation]]:
    chunks = []
    pos = 0
    for part in body.split(","):
        chunks.append((part, offset + pos))
        pos += len(part) + 1
    parsed: list[list[list[int]]] = []
    for text, at in chunks:
        cycles = []
        cursor = 0
        for m in _CYCLE.finditer(text):
            gap = text[cursor : m.start()]
            if gap.strip():
                raise SpecError(f"unexpected text {gap.strip()!r}", at + cursor)
            cyc = []
            for tok in re.finditer(r"\S+", m.group(1)):
                cyc.append(_int(tok.group(), at + m.start(1) + tok.start(), "point"))
            cycles.append(cyc)
            cursor = m.end()
        if text[cursor:].strip():
            raise SpecError(f"unexpected text {text[cursor:].strip()!r}", at + cursor)
        if not cycles:
            raise SpecError("empty generator", at)
        parsed.append(cycles)
    points = [x for cycles in parsed for c in cycles for x in c]
    if any(x < 0 for x in points):
        raise SpecError("negative point", offset)
    degree = max(points, default=0) + 1
    gens = []
    for cycles, (_, at) in zip(parsed, chunks):
        try:
            gens.append(Permutation.from_cycles(cycles, degree))
        except GroupError as exc:
            raise SpecError(str(exc), at) from None
    return degree, gens


# The curated family used by the sweeps and acceptance checks.
STANDARD_FAMILY: tuple[str, ...] = (
    *(f"cyclic:{n}" for n in range(2, 9)),
    *(f"dihedral:{n}" for n in range(3, 7)),
    "symmetric:3",
    "symmetric:4",
    "alternating:4",
    "frobenius:5:4:2",
    "frobenius:7:3:2",
)


def standard_family() -> list[GroupInstance]:
    return [parse_group_spec(s) for s in STANDARD_FAMILY]
