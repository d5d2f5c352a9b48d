"""Transitive groups of prime degree p inside the affine group of F_p.

For G = C_p x| C_r generated by sigma(i) = i + 1 and tau(i) = t i, with H the
stabilizer of 0, the double coset H sigma^c H is determined by the orbit of
c under multiplication by <t>.  Products of double cosets become sums of
orbits, which is checked here against the generic biset product.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

from ._bits import iter_bits, mask_of
from .bisets import BisetSemiring, CounterexampleError, HBiset
from .families import GroupInstance, affine_generators, multiplicative_order
from .fields import is_prime
from .groups import FiniteGroup, SubgroupH, close_generators, is_doubly_transitive, point_stabilizer
from .matrix_model import pattern_dimension


@dataclass(frozen=True)
class AffineModel:
    p: int
    t: int
    r: int
    orbits: tuple[tuple[int, ...], ...]  # orbit 0 is {0}; the rest ordered by least element

    @property
    def orbit_of(self) -> dict[int, int]:
        return {x: i for i, orb in enumerate(self.orbits) for x in orb}

    def orbit_sets(self) -> list[list[int]]:
        return [sorted(o) for o in self.orbits]


def multiplicative_orbits(p: int, t: int) -> tuple[tuple[int, ...], ...]:
    """{0} and the cosets c<t> of F_p^x, each listed as c, ct, ct^2, ..."""
    seen = {0}
    orbits = [(0,)]
    for c in range(1, p):
        if c in seen:
            continue
        orb = [c]
        x = c * t % p
        while x != c:
            orb.append(x)
            x = x * t % p
        seen.update(orb)
        orbits.append(tuple(orb))
    return tuple(orbits)


def affine_model(p: int, t: int) -> AffineModel:
    if p < 3 or not is_prime(p):
        raise ValueError(f"p = {p} must be an odd prime")
    r = multiplicative_order(t, p)
    model = AffineModel(p, t % p, r, multiplicative_orbits(p, t))
    if pow(t, r, p) != 1 or any(pow(t, s, p) == 1 for s in range(1, r)):
        raise CounterexampleError("order of t computed inconsistently", {"p": p, "t": t})
    return model


def build_affine_group(p: int, t: int) -> tuple[FiniteGroup, SubgroupH, AffineModel]:
    """C_p x| C_r on F_p with H the stabilizer of 0.

    Full order r = p - 1 is accepted with a warning: G is then sharply
    doubly transitive.
    """
    model = affine_model(p, t)
    if model.r <= 1:
        raise ValueError(f"t = {t} has order {model.r} mod {p}; need order > 1")
    if model.r == p - 1:
        warnings.warn(f"t = {t} has full order {p - 1}: G is doubly transitive", stacklevel=2)
    G = close_generators(p, affine_generators(p, model.t))
    H = point_stabilizer(G, 0)
    if G.order != p * model.r or H.order != model.r:
        raise CounterexampleError("affine group has the wrong order", {"p": p, "t": t})
    return G, H, model


def affine_instance(p: int, t: int) -> tuple[GroupInstance, AffineModel]:
    G, H, model = build_affine_group(p, t)
    return GroupInstance(f"frobenius:{p}:{model.r}:{model.t}", G, H), model


def translation_index(G: FiniteGroup, c: int) -> int:
    p = G.degree
    return G.index_of(tuple((i + c) % p for i in range(p)))


@dataclass(frozen=True)
class OrbitCorrespondence:
    class_of_orbit: tuple[int, ...]
    orbit_of_class: tuple[int, ...]


def orbit_double_cosets(model: AffineModel, semiring: BisetSemiring) -> OrbitCorrespondence:
    """Match each orbit c<t> with the class of the translation by c."""
    G = semiring.group
    table = semiring.table
    H = semiring.subgroup
    class_of_orbit = []
    for orb in model.orbits:
        classes = {table.class_of[translation_index(G, c)] for c in orb}
        if len(classes) != 1:
            raise CounterexampleError("an orbit meets several double cosets", {"orbit": list(orb)})
        c = classes.pop()
        if table.sizes[c] != H.order * len(orb):
            raise CounterexampleError("double coset size differs from |H| |orbit|", {"orbit": list(orb)})
        class_of_orbit.append(c)
    if sorted(class_of_orbit) != list(range(len(table))):
        raise CounterexampleError("orbits and double cosets are not in bijection", {})
    orbit_of_class = [0] * len(class_of_orbit)
    for o, c in enumerate(class_of_orbit):
        orbit_of_class[c] = o
    return OrbitCorrespondence(tuple(class_of_orbit), tuple(orbit_of_class))


def orbit_semiring_product(model: AffineModel, o1: int, o2: int) -> list[int]:
    """Orbits making up the sumset orbit(o1) + orbit(o2) in F_p."""
    p = model.p
    where = model.orbit_of
    sums = {(x + y) % p for x in model.orbits[o1] for y in model.orbits[o2]}
    out = sorted({where[s] for s in sums})
    # the sumset is <t>-stable, so it is a union of whole orbits
    covered = {x for o in out for x in model.orbits[o]}
    if covered != sums:
        raise CounterexampleError("sumset is not a union of orbits", {"o1": o1, "o2": o2})
    return out


def orbit_inverse(model: AffineModel, o: int) -> int:
    return model.orbit_of[(-model.orbits[o][0]) % model.p]


def verify_orbit_products(model: AffineModel, semiring: BisetSemiring) -> dict:
    """Sumsets of orbits against class products, pair by pair; also inverses."""
    corr = orbit_double_cosets(model, semiring)
    k = len(model.orbits)
    mismatches = []
    table = []
    for o1 in range(k):
        row = []
        for o2 in range(k):
            orb = orbit_semiring_product(model, o1, o2)
            row.append(orb)
            c1, c2 = corr.class_of_orbit[o1], corr.class_of_orbit[o2]
            got = sorted(corr.orbit_of_class[c] for c in iter_bits(semiring.class_products[c1][c2]))
            if got != orb:
                mismatches.append({"orbits": [o1, o2], "sumset": orb, "biset": got})
        table.append(row)
    for o in range(k):
        inv_class = semiring.class_inverses[corr.class_of_orbit[o]]
        if corr.orbit_of_class[inv_class] != orbit_inverse(model, o):
            mismatches.append({"inverse_of": o})
    return {"p": model.p, "t": model.t, "r": model.r, "product_table": table, "mismatches": mismatches}


def primitive_root(p: int) -> int:
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    return 1  # p = 2


def _prime_factors(n: int) -> list[int]:
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


def quotient_labels(model: AffineModel) -> dict[int, int]:
    """Nonzero orbit -> its coset in F_p^x / <t>, as a residue mod (p-1)/r.

    With g a primitive root, c<t> maps to log_g(c) mod (p-1)/r; this is well
    defined because <t> is generated by g^((p-1)/r).
    """
    p = model.p
    m = (p - 1) // model.r
    g = primitive_root(p)
    log = {}
    x = 1
    for e in range(p - 1):
        log[x] = e
        x = x * g % p
    labels = {}
    for o, orb in enumerate(model.orbits[1:], start=1):
        logs = {log[c] % m for c in orb}
        if len(logs) != 1:
            raise CounterexampleError("orbit is not a coset of <t>", {"orbit": list(orb)})
        labels[o] = logs.pop()
    if sorted(labels.values()) != list(range(m)):
        raise CounterexampleError("orbits do not biject onto F_p^x/<t>", {})
    return labels


def verify_quotient_isomorphism(model: AffineModel, semiring: BisetSemiring) -> dict:
    """Bisets against subsets of {0} + F_p^x/<t> under union and sumset.

    Every subset of orbits is tried against every other: the biset of the
    union of their classes must multiply like the sumset of the underlying
    subsets of F_p, and unions must correspond to unions.
    """
    corr = orbit_double_cosets(model, semiring)
    labels = quotient_labels(model)
    k = len(model.orbits)
    p = model.p

    def points(orbit_mask: int) -> frozenset[int]:
        return frozenset(x for o in iter_bits(orbit_mask) for x in model.orbits[o])

    def to_biset(orbit_mask: int) -> HBiset:
        return semiring.from_classes(corr.class_of_orbit[o] for o in iter_bits(orbit_mask))

    def orbit_mask_of(s: HBiset) -> int:
        return mask_of(corr.orbit_of_class[c] for c in s.class_set)

    failures = 0
    for a, b in product(range(1 << k), repeat=2):
        pa, pb = points(a), points(b)
        if pa and pb:
            sumset = frozenset((x + y) % p for x in pa for y in pb)
        else:
            sumset = frozenset()
        prod_mask = orbit_mask_of(to_biset(a) * to_biset(b))
        if points(prod_mask) != sumset:
            failures += 1
        if orbit_mask_of(to_biset(a) | to_biset(b)) != a | b:
            failures += 1
    return {
        "subsets": 1 << k,
        "pairs": (1 << k) ** 2,
        "quotient_order": (p - 1) // model.r,
        "labels": {str(o): lab for o, lab in sorted(labels.items())},
        "failures": failures,
    }


# classification of transitive groups of prime degree -------------------------------


def _relabel_by_cycle(G: FiniteGroup) -> tuple[int, list[int]] | None:
    """An element of order p and the labelling point(sigma^i(0)) = i."""
    p = G.degree
    for x in range(G.order):
        if G.element_order(x) == p:
            perm = G.elements[x]
            labels = [0] * p
            pt = 0
            for i in range(p):
                labels[pt] = i
                pt = perm[pt]
            return x, labels
    return None


def prime_degree_classifier(G: FiniteGroup, semiring: BisetSemiring | None = None) -> dict:
    """Case 1 (doubly transitive) or case 2 (C_p x| C_r with r | p-1, r < p-1)."""
    p = G.degree
    if not is_prime(p):
        raise ValueError(f"degree {p} is not prime")
    if not G.is_transitive():
        raise ValueError("G is not transitive")
    if semiring is None:
        semiring = BisetSemiring(G, point_stabilizer(G, 0))
    n_classes = semiring.n_classes
    dims = [pattern_dimension(semiring.atom(c)) for c in range(1, n_classes)]
    doubly = is_doubly_transitive(G)
    if doubly != (n_classes == 2):
        raise CounterexampleError("class count and pair-orbit count disagree on double transitivity", {})
    if doubly:
        if dims != [p - 1]:
            raise CounterexampleError("doubly transitive but the nontrivial class is not of dimension p-1", {})
        return {"p": p, "case": 1, "description": "doubly transitive", "dims": dims, "classes": n_classes}

    found = _relabel_by_cycle(G)
    if found is None:
        raise CounterexampleError("transitive of prime degree without a p-cycle", {})
    _, labels = found
    multipliers = set()
    for perm in G.elements:
        # in the new labels the element is i -> labels[perm[point with label i]]
        inv = [0] * p
        for pt, lab in enumerate(labels):
            inv[lab] = pt
        img = [labels[perm[inv[i]]] for i in range(p)]
        b = img[0]
        a = (img[1] - b) % p
        if a == 0 or any(img[i] != (a * i + b) % p for i in range(p)):
            raise CounterexampleError("G is neither doubly transitive nor affine", {})
        multipliers.add(a)
    r = len(multipliers)
    if (p - 1) % r or r >= p - 1:
        raise CounterexampleError("multiplier group does not strictly divide p-1", {"r": r})
    t = next(a for a in sorted(multipliers) if multiplicative_order(a, p) == r)
    if any(d != r for d in dims):
        raise CounterexampleError("nontrivial classes do not all have dimension r", {"dims": dims})
    report = {
        "p": p,
        "case": 2,
        "description": "C_p x| C_r in the affine group",
        "r": r,
        "t": t,
        "dims": dims,
        "classes": n_classes,
    }
    if r == 2:
        report["note"] = "r = 2: dihedral case; cyclicity of such algebras is a cited result, not computed"
    return report


def prime_classify(p: int, t: int | None = None) -> dict:
    """Report for the affine group C_p x| <t>, or for S_p when t is omitted."""
    if t is None:
        from .families import parse_group_spec

        inst = parse_group_spec(f"symmetric:{p}")
        sr = BisetSemiring.from_instance(inst)
        return prime_degree_classifier(inst.group, sr)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inst, model = affine_instance(p, t)
    sr = BisetSemiring.from_instance(inst)
    report = prime_degree_classifier(inst.group, sr)
    check = verify_orbit_products(model, sr)
    report["orbits"] = model.orbit_sets()
    report["product_table"] = check["product_table"]
    report["mismatches"] = check["mismatches"]
    return report
