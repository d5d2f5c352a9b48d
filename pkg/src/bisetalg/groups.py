"""Finite permutation groups, subgroups, cosets and double cosets.

Groups are fully enumerated.  Elements are referred to by their index in
the canonical (lexicographic on image arrays) element list, and subsets of
the group are int bitsets over those indices.

Composition is function composition: ``(p * q)(i) == p(q(i))``.  With this
convention the left coset ``gH`` of a point stabilizer ``H`` of ``x`` is the
set of elements sending ``x`` to ``g(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ._bits import iter_bits, lowest_bit, mask_of, popcount

DEFAULT_ELEMENT_BUDGET = 100_000


class GroupError(ValueError):
    """Invalid group data or a closure that exceeds the element budget."""


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if sorted(images) != list(range(len(images))):
            raise GroupError(f"not a bijection on 0..{len(images) - 1}: {list(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int | None = None) -> "Permutation":
        cycles = [list(c) for c in cycles]
        top = max((max(c) for c in cycles if c), default=-1)
        degree = top + 1 if degree is None else degree
        if top >= degree:
            raise GroupError(f"cycle point {top} outside degree {degree}")
        images = list(range(degree))
        seen: set[int] = set()
        for cyc in cycles:
            if len(set(cyc)) != len(cyc) or seen & set(cyc):
                raise GroupError(f"cycles are not disjoint: {cycles}")
            seen |= set(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple([p[i] for i in q])


class FiniteGroup:
    """A permutation group with all of its elements enumerated."""

    def __init__(self, degree: int, elements: Sequence[tuple[int, ...]], generators: Sequence[tuple[int, ...]] = ()):
        self.degree = degree
        self.elements: list[tuple[int, ...]] = sorted(elements)
        self.index: dict[tuple[int, ...], int] = {e: i for i, e in enumerate(self.elements)}
        self.generators = [self.index[g] for g in generators]
        if self.elements[0] != tuple(range(degree)):
            raise GroupError("element list does not contain the identity")
        self._inverse: list[int] | None = None
        self._table: list[list[int]] | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    identity = 0

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def perm(self, i: int) -> Permutation:
        return Permutation(self.elements[i])

    def index_of(self, p: Permutation | Sequence[int]) -> int:
        images = p.images if isinstance(p, Permutation) else tuple(p)
        try:
            return self.index[images]
        except KeyError:
            raise GroupError(f"{images} is not an element of the group") from None

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return self._table[i][j]
        return self.index[_compose(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        if self._inverse is None:
            inv = [0] * self.order
            for k, e in enumerate(self.elements):
                back = [0] * self.degree
                for a, b in enumerate(e):
                    back[b] = a
                inv[k] = self.index[tuple(back)]
            self._inverse = inv
        return self._inverse[i]

    def power(self, i: int, e: int) -> int:
        if e < 0:
            i, e = self.inv(i), -e
        result = self.identity
        for _ in range(e):
            result = self.mul(result, i)
        return result

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k

    def build_table(self, limit: int = 4_000_000) -> bool:
        """Cache the full multiplication table if it has at most ``limit`` entries."""
        if self._table is None and self.order**2 <= limit:
            self._table = [[self.index[_compose(a, b)] for b in self.elements] for a in self.elements]
        return self._table is not None

    # subsets as bitsets ------------------------------------------------

    def left_translate(self, x: int, mask: int) -> int:
        """The bitset of ``{x s : s in mask}``."""
        out = 0
        for s in iter_bits(mask):
            out |= 1 << self.mul(x, s)
        return out

    def right_translate(self, mask: int, x: int) -> int:
        """The bitset of ``{s x : s in mask}``."""
        out = 0
        for s in iter_bits(mask):
            out |= 1 << self.mul(s, x)
        return out

    def product_set(self, a: int, b: int) -> int:
        """Brute-force ``{s t : s in a, t in b}``."""
        out = 0
        bs = list(iter_bits(b))
        for s in iter_bits(a):
            for t in bs:
                out |= 1 << self.mul(s, t)
        return out

    def inverse_set(self, mask: int) -> int:
        return mask_of(self.inv(s) for s in iter_bits(mask))

    def conjugate_set(self, x: int, mask: int) -> int:
        """``x S x^-1``."""
        xi = self.inv(x)
        return mask_of(self.mul(self.mul(x, s), xi) for s in iter_bits(mask))

    def generated(self, seeds: Iterable[int]) -> int:
        """Bitset of the subgroup generated by ``seeds``."""
        gens = sorted(set(seeds))
        mask = 1 << self.identity
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if not (mask >> y) & 1:
                        mask |= 1 << y
                        nxt.append(y)
            frontier = nxt
        return mask

    def is_subgroup_mask(self, mask: int) -> bool:
        if not (mask & 1):
            return False
        elems = list(iter_bits(mask))
        for s in elems:
            if not (mask >> self.inv(s)) & 1:
                return False
            for t in elems:
                if not (mask >> self.mul(s, t)) & 1:
                    return False
        return True

    def normal_closure(self, mask: int, ambient: int) -> int:
        """Smallest subgroup of ``ambient`` normal in it and containing ``mask``.

        Computed by repeated conjugation, independently of any biset power.
        """
        current = self.generated(iter_bits(mask))
        amb = list(iter_bits(ambient))
        while True:
            seeds = set(iter_bits(current))
            for x in amb:
                seeds.update(iter_bits(self.conjugate_set(x, current)))
            nxt = self.generated(seeds)
            if nxt == current:
                return current
            current = nxt

    def orbit(self, point: int) -> list[int]:
        return sorted({e[point] for e in self.elements})

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree if self.degree else True

    def ordered_pair_orbits(self) -> int:
        """Number of orbits on ordered pairs of distinct points."""
        pairs = {(a, b) for a in range(self.degree) for b in range(self.degree) if a != b}
        count = 0
        while pairs:
            a, b = pairs.pop()
            count += 1
            for e in self.elements:
                pairs.discard((e[a], e[b]))
        return count

    def is_cyclic(self) -> bool:
        return any(self.element_order(i) == self.order for i in range(self.order))

    def format_element(self, i: int) -> str:
        return str(self.perm(i))


def close_generators(
    degree: int,
    generators: Sequence[Permutation | Sequence[int]],
    *,
    budget: int = DEFAULT_ELEMENT_BUDGET,
) -> FiniteGroup:
    """Enumerate the group generated by ``generators`` acting on ``range(degree)``."""
    gens: list[tuple[int, ...]] = []
    for g in generators:
        p = g if isinstance(g, Permutation) else Permutation(tuple(g))
        if p.degree != degree:
            raise GroupError(f"generator {list(p.images)} does not act on {degree} points")
        gens.append(p.images)
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose(g, x)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > budget:
                        raise GroupError(f"group closure exceeds the element budget of {budget}")
                    nxt.append(y)
        frontier = nxt
    return FiniteGroup(degree, list(seen), gens)


@dataclass(frozen=True, eq=False)
class SubgroupH:
    parent: FiniteGroup
    mask: int

    def __post_init__(self):
        if not self.parent.is_subgroup_mask(self.mask):
            raise GroupError("mask is not a subgroup")

    @property
    def order(self) -> int:
        return popcount(self.mask)

    def __contains__(self, i: int) -> bool:
        return bool((self.mask >> i) & 1)

    def elements(self) -> list[int]:
        return list(iter_bits(self.mask))

    def __eq__(self, other) -> bool:
        return isinstance(other, SubgroupH) and other.parent is self.parent and other.mask == self.mask

    def __hash__(self) -> int:
        return hash((id(self.parent), self.mask))

    def is_normal(self) -> bool:
        g = self.parent
        return all(g.conjugate_set(x, self.mask) == self.mask for x in range(g.order))

    def core(self) -> int:
        """Bitset of the largest normal subgroup of the parent inside this one."""
        g = self.parent
        out = self.mask
        for x in range(g.order):
            out &= g.conjugate_set(x, self.mask)
        return out

    def has_trivial_core(self) -> bool:
        return self.core() == 1


def subgroup(G: FiniteGroup, elements: Iterable[int]) -> SubgroupH:
    return SubgroupH(G, G.generated(elements))


def point_stabilizer(G: FiniteGroup, point: int) -> SubgroupH:
    if not 0 <= point < G.degree:
        raise GroupError(f"point {point} outside 0..{G.degree - 1}")
    return SubgroupH(G, mask_of(i for i, e in enumerate(G.elements) if e[point] == point))


@dataclass(frozen=True)
class CosetSpace:
    """Left cosets gH, ordered by their minimal element index (coset 0 is H)."""

    representatives: tuple[int, ...]
    coset_of: tuple[int, ...]
    masks: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.representatives)


def coset_space(G: FiniteGroup, H: SubgroupH) -> CosetSpace:
    _check_parent(G, H)
    coset_of = [-1] * G.order
    reps: list[int] = []
    masks: list[int] = []
    hs = H.elements()
    for g in range(G.order):
        if coset_of[g] >= 0:
            continue
        members = [G.mul(g, h) for h in hs]
        for x in members:
            coset_of[x] = len(reps)
        reps.append(g)
        masks.append(mask_of(members))
    return CosetSpace(tuple(reps), tuple(coset_of), tuple(masks))


@dataclass(frozen=True)
class DoubleCosetTable:
    """The partition of G into double cosets HgH; class 0 is H."""

    classes: tuple[int, ...]
    class_of: tuple[int, ...]
    sizes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(lowest_bit(m) for m in self.classes)


def enumerate_double_cosets(G: FiniteGroup, H: SubgroupH) -> DoubleCosetTable:
    _check_parent(G, H)
    class_of = [-1] * G.order
    classes: list[int] = []
    hs = H.elements()
    for g in range(G.order):
        if class_of[g] >= 0:
            continue
        right = [G.mul(g, h) for h in hs]
        members = {G.mul(h, x) for h in hs for x in right}
        for x in members:
            class_of[x] = len(classes)
        classes.append(mask_of(members))
    sizes = tuple(popcount(m) for m in classes)
    return DoubleCosetTable(tuple(classes), tuple(class_of), sizes)


def is_doubly_transitive(G: FiniteGroup) -> bool:
    """Direct check on ordered pairs of distinct points."""
    return G.is_transitive() and (G.degree < 2 or G.ordered_pair_orbits() == 1)


def _check_parent(G: FiniteGroup, H: SubgroupH) -> None:
    if H.parent is not G:
        raise GroupError("subgroup belongs to a different group")
