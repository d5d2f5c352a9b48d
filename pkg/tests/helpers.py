"""Independent brute-force oracles shared by the tests.

These work on raw permutation tuples and Python sets, not on the bitmask
machinery under test.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from bisetalg.bisets import BisetSemiring
from bisetalg.families import parse_group_spec


@lru_cache(maxsize=None)
def semiring_for(spec: str) -> BisetSemiring:
    return BisetSemiring.from_instance(parse_group_spec(spec))


def compose(p, q):
    """(p q)(i) = p(q(i))."""
    return tuple(p[i] for i in q)


def inverse(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def closure(gens, degree):
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def stabilizer(elements, point=0):
    return {g for g in elements if g[point] == point}


def double_cosets(elements, H):
    left = set(elements)
    out = []
    while left:
        g = min(left)
        dc = {compose(compose(h1, g), h2) for h1 in H for h2 in H}
        out.append(frozenset(dc))
        left -= dc
    return out


def set_product(A, B):
    return {compose(a, b) for a in A for b in B}


def elements_of(s):
    """Raw permutation tuples of an HBiset."""
    G = s.semiring.group
    return {G.elements[i] for i in s.elements()}


def fraction_det(rows):
    """Gaussian elimination over Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det
