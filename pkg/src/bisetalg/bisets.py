"""The semiring of H-bisets of G under union and product.

An H-biset is stored as a bitmask over double-coset indices; the element
bitmask is derived.  Products are class-determined, so a class-level
multiplication table is built once per ``(G, H)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from ._bits import iter_bits, mask_of, popcount
from .groups import (
    CosetSpace,
    DoubleCosetTable,
    FiniteGroup,
    SubgroupH,
    coset_space,
    enumerate_double_cosets,
)


class BisetError(ValueError):
    pass


class CounterexampleError(AssertionError):
    """An exact check that should hold by a theorem came out false."""

    def __init__(self, message: str, record: dict | None = None):
        super().__init__(message)
        self.record = record or {}


class BisetSemiring:
    """All H-bisets of ``group`` for the subgroup ``subgroup``."""

    def __init__(self, group: FiniteGroup, subgroup: SubgroupH, name: str = ""):
        if subgroup.parent is not group:
            raise BisetError("subgroup belongs to a different group")
        self.group = group
        self.subgroup = subgroup
        self.name = name
        group.build_table()
        self.table: DoubleCosetTable = enumerate_double_cosets(group, subgroup)
        self.cosets: CosetSpace = coset_space(group, subgroup)

    @classmethod
    def from_instance(cls, inst) -> "BisetSemiring":
        return cls(inst.group, inst.subgroup, inst.name)

    @property
    def n_classes(self) -> int:
        return len(self.table)

    @property
    def index(self) -> int:
        """[G : H], the number of cosets."""
        return len(self.cosets)

    @cached_property
    def class_products(self) -> list[list[int]]:
        """``[i][j]`` = bitmask of the classes in (class i)(class j).

        HgH . Hg'H is the union of H(g h g')H over h in H.
        """
        G = self.group
        reps = self.table.representatives
        hs = self.subgroup.elements()
        class_of = self.table.class_of
        out = []
        for g in reps:
            row = []
            for g2 in reps:
                row.append(mask_of(class_of[G.mul(G.mul(g, h), g2)] for h in hs))
            out.append(row)
        return out

    @cached_property
    def class_inverses(self) -> list[int]:
        G = self.group
        return [self.table.class_of[G.inv(g)] for g in self.table.representatives]

    def class_product_table(self) -> list[list[list[int]]]:
        """JSON-ready form of :attr:`class_products`."""
        return [[list(iter_bits(m)) for m in row] for row in self.class_products]

    # constructors -------------------------------------------------------

    def biset(self, classes: Iterable[int] = ()) -> "HBiset":
        classes = list(classes)
        for c in classes:
            if not 0 <= c < self.n_classes:
                raise BisetError(f"class index {c} out of range 0..{self.n_classes - 1}")
        return HBiset(self, mask_of(classes))

    from_classes = biset

    @property
    def zero(self) -> "HBiset":
        return HBiset(self, 0)

    @property
    def one(self) -> "HBiset":
        return HBiset(self, 1)

    @property
    def full(self) -> "HBiset":
        return HBiset(self, (1 << self.n_classes) - 1)

    def atom(self, c: int) -> "HBiset":
        return self.biset([c])

    def atoms(self) -> list["HBiset"]:
        return [self.atom(c) for c in range(self.n_classes)]

    def double_coset_of(self, g: int) -> "HBiset":
        return self.atom(self.table.class_of[g])

    def from_mask(self, mask: int) -> "HBiset":
        """The biset with element set ``mask``; raises if not H-stable."""
        classes = 0
        covered = 0
        for g in iter_bits(mask):
            c = self.table.class_of[g]
            if not (classes >> c) & 1:
                classes |= 1 << c
                covered |= self.table.classes[c]
        if covered != mask:
            raise BisetError("element set is not a union of double cosets")
        return HBiset(self, classes)

    def all_bisets(self) -> Iterator["HBiset"]:
        for m in range(1 << self.n_classes):
            yield HBiset(self, m)

    def small_unions(self, max_classes: int = 2) -> list["HBiset"]:
        """Every union of at most ``max_classes`` classes, empty set excluded."""
        from itertools import combinations

        out = []
        for k in range(1, max_classes + 1):
            for combo in combinations(range(self.n_classes), k):
                out.append(self.biset(combo))
        return out

    # class-level arithmetic -------------------------------------------

    def _product_classes(self, a: int, b: int) -> int:
        out = 0
        table = self.class_products
        bs = list(iter_bits(b))
        for i in iter_bits(a):
            row = table[i]
            for j in bs:
                out |= row[j]
        return out

    def _inverse_classes(self, a: int) -> int:
        inv = self.class_inverses
        return mask_of(inv[i] for i in iter_bits(a))

    def _elements_of(self, classes: int) -> int:
        out = 0
        for c in iter_bits(classes):
            out |= self.table.classes[c]
        return out

    def __repr__(self) -> str:
        return f"BisetSemiring({self.name or '?'}; |G|={self.group.order}, |H|={self.subgroup.order})"


def _same(s: "HBiset", t: "HBiset") -> None:
    if s.semiring is not t.semiring:
        raise BisetError("bisets live in different (G, H)")


@dataclass(frozen=True)
class HBiset:
    semiring: BisetSemiring = field(repr=False)
    classes: int

    @cached_property
    def mask(self) -> int:
        return self.semiring._elements_of(self.classes)

    @property
    def class_set(self) -> list[int]:
        return list(iter_bits(self.classes))

    @property
    def size(self) -> int:
        return popcount(self.mask)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, g: int) -> bool:
        return bool((self.mask >> g) & 1)

    def __bool__(self) -> bool:
        return bool(self.classes)

    def elements(self) -> list[int]:
        return list(iter_bits(self.mask))

    def issubset(self, other: "HBiset") -> bool:
        _same(self, other)
        return self.classes & ~other.classes == 0

    def union(self, other: "HBiset") -> "HBiset":
        _same(self, other)
        return HBiset(self.semiring, self.classes | other.classes)

    __or__ = union
    __add__ = union

    def product(self, other: "HBiset") -> "HBiset":
        _same(self, other)
        return HBiset(self.semiring, self.semiring._product_classes(self.classes, other.classes))

    __mul__ = product

    def inverse(self) -> "HBiset":
        return HBiset(self.semiring, self.semiring._inverse_classes(self.classes))

    __invert__ = inverse

    def power(self, m: int) -> "HBiset":
        if m < 0:
            raise BisetError("negative biset power")
        result = self.semiring.one
        for _ in range(m):
            result = result * self
        return result

    __pow__ = power

    def is_subgroup(self) -> bool:
        """S S = S, S^-1 = S and 1 in S."""
        if not self:
            return False
        return 0 in self and self * self == self and ~self == self

    def dimension(self) -> int:
        """|S| / |H|, the K-dimension of the corresponding bimodule."""
        h = self.semiring.subgroup.order
        if self.size % h:
            raise BisetError(f"|S| = {self.size} is not a multiple of |H| = {h}")
        return self.size // h

    def describe(self) -> str:
        return "{" + ", ".join(f"c{c}" for c in self.class_set) + "}"


# heights -------------------------------------------------------------------


@dataclass(frozen=True)
class HeightProfile:
    g: int
    height: int
    chain: tuple[int, ...]
    chain_masks: tuple[int, ...] = field(repr=False)
    normal_closure: HBiset
    generated_subgroup: HBiset
    cyclic_order: int

    def as_dict(self) -> dict:
        return {
            "g": self.g,
            "height": self.height,
            "chain_sizes": list(self.chain),
            "normal_closure_size": self.normal_closure.size,
            "normal_closure_classes": self.normal_closure.class_set,
            "generated_subgroup_size": self.generated_subgroup.size,
            "cyclic_order": self.cyclic_order,
        }


def height_chain_term(semiring: BisetSemiring, g: int, m: int) -> int:
    """Element bitmask of H(g, m) = (HgH)^m g^-m."""
    G = semiring.group
    power = semiring.double_coset_of(g) ** m
    return G.right_translate(power.mask, G.power(g, -m))


def height_profile(semiring: BisetSemiring, g: int) -> HeightProfile:
    """Height of ``g``, the chain H(g, m) up to it, and the subgroup it stabilizes at."""
    G = semiring.group
    H = semiring.subgroup
    S = semiring.double_coset_of(g)
    n = semiring.index
    ginv = G.inv(g)
    masks = [H.mask]
    power = semiring.one
    shift = G.identity
    while True:
        power = power * S
        shift = G.mul(shift, ginv)
        nxt = G.right_translate(power.mask, shift)
        prev = masks[-1]
        if prev & ~nxt:
            raise CounterexampleError("chain H(g, m) is not ascending", {"g": g, "m": len(masks)})
        if nxt == prev:
            break
        masks.append(nxt)
        if len(masks) - 1 > n:
            raise CounterexampleError("height exceeds [G:H]", {"g": g, "index": n})
    height = len(masks) - 1
    N = masks[-1]
    # Equality once means equality forever: confirm the next step too.
    power2 = power * S
    shift2 = G.mul(shift, ginv)
    if G.right_translate(power2.mask, shift2) != N:
        raise CounterexampleError("chain H(g, m) left its stable value", {"g": g})
    G_prime = G.generated(list(H.elements()) + [g])
    closure = G.normal_closure(H.mask, G_prime)
    if closure != N:
        raise CounterexampleError(
            "stable chain value differs from the normal closure of H in <H, g>",
            {"g": g, "N": N, "closure": closure},
        )
    k, x = 1, g
    while not (N >> x) & 1:
        x = G.mul(x, g)
        k += 1
    return HeightProfile(
        g=g,
        height=height,
        chain=tuple(popcount(m) for m in masks),
        chain_masks=tuple(masks),
        normal_closure=semiring.from_mask(N),
        generated_subgroup=semiring.from_mask(G_prime),
        cyclic_order=k,
    )


@dataclass(frozen=True)
class StablePowerCertificate:
    g: int
    m: int
    height: int
    normal_closure: int
    g_power: int
    equal: bool


def stabilized_power_form(semiring: BisetSemiring, g: int, m: int) -> tuple[HBiset, StablePowerCertificate]:
    """(HgH)^m together with a check that it equals N g^m, for m >= height(g)."""
    profile = height_profile(semiring, g)
    if m < profile.height:
        raise BisetError(f"m = {m} is below the height {profile.height} of g")
    G = semiring.group
    power = semiring.double_coset_of(g) ** m
    gm = G.power(g, m)
    translated = G.right_translate(profile.normal_closure.mask, gm)
    if translated != power.mask:
        raise CounterexampleError("(HgH)^m differs from N g^m", {"g": g, "m": m})
    cert = StablePowerCertificate(g, m, profile.height, profile.normal_closure.mask, gm, True)
    return power, cert
