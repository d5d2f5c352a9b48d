import pytest
from helpers import closure, double_cosets, stabilizer
from hypothesis import given
from hypothesis import strategies as st

from bisetalg.families import STANDARD_FAMILY, SpecError, parse_group_spec
from bisetalg.groups import (
    GroupError,
    Permutation,
    close_generators,
    coset_space,
    enumerate_double_cosets,
    is_doubly_transitive,
    point_stabilizer,
    subgroup,
)


def test_composition_convention():
    p = Permutation.from_cycles([(0, 1)], 3)
    q = Permutation.from_cycles([(1, 2)], 3)
    # (p q)(i) = p(q(i)): 1 -> 2 -> 2, 2 -> 1 -> 0
    assert (p * q).images == (1, 2, 0)


@pytest.mark.parametrize(
    "degree,cycles,order",
    [
        (4, [[(0, 1, 2, 3)]], 4),
        (3, [[(0, 1, 2)], [(0, 1)]], 6),
        (8, [[(0, 1, 2, 3, 4, 5, 6, 7)], [(1, 7), (2, 6), (3, 5)]], 16),
    ],
)
def test_closure_orders(degree, cycles, order):
    gens = [Permutation.from_cycles(c, degree) for c in cycles]
    G = close_generators(degree, gens)
    assert G.order == order
    assert set(G.elements) == closure([g.images for g in gens], degree)
    assert G.elements[0] == tuple(range(degree))


@pytest.mark.parametrize("spec,order", [("symmetric:3", 2), ("symmetric:4", 6), ("cyclic:4", 1)])
def test_point_stabilizer_orders(spec, order):
    assert parse_group_spec(spec).subgroup.order == order


@pytest.mark.parametrize(
    "spec,sizes",
    [
        ("symmetric:3", [2, 4]),
        ("symmetric:4", [6, 18]),
        ("symmetric:5", [24, 96]),
        ("dihedral:4", [2, 4, 2]),
        ("frobenius:7:3:2", [3, 9, 9]),
    ],
)
def test_double_coset_sizes(spec, sizes):
    inst = parse_group_spec(spec)
    table = enumerate_double_cosets(inst.group, inst.subgroup)
    assert list(table.sizes) == sizes
    # class 0 is H
    assert table.classes[0] == inst.subgroup.mask


@pytest.mark.parametrize("spec", STANDARD_FAMILY)
def test_double_cosets_match_brute_force(spec):
    inst = parse_group_spec(spec)
    G = inst.group
    elems = set(G.elements)
    H = stabilizer(elems)
    expected = {dc for dc in double_cosets(elems, H)}
    table = enumerate_double_cosets(G, inst.subgroup)
    got = {frozenset(G.elements[i] for i in range(G.order) if (m >> i) & 1) for m in table.classes}
    assert got == expected
    assert sum(table.sizes) == G.order


@pytest.mark.parametrize("spec,count", [("symmetric:3", 3), ("dihedral:4", 4), ("cyclic:6", 6)])
def test_coset_counts(spec, count):
    inst = parse_group_spec(spec)
    cs = coset_space(inst.group, inst.subgroup)
    assert len(cs) == count
    assert cs.masks[0] == inst.subgroup.mask


def test_whole_group_as_subgroup_gives_one_coset():
    inst = parse_group_spec("symmetric:3")
    G = inst.group
    whole = subgroup(G, range(G.order))
    assert len(coset_space(G, whole)) == 1
    assert len(enumerate_double_cosets(G, whole)) == 1


@pytest.mark.parametrize(
    "spec,expected",
    [("symmetric:4", True), ("alternating:4", True), ("dihedral:4", False), ("frobenius:5:4:2", True), ("cyclic:5", False)],
)
def test_double_transitivity(spec, expected):
    inst = parse_group_spec(spec)
    assert is_doubly_transitive(inst.group) is expected
    n_classes = len(enumerate_double_cosets(inst.group, inst.subgroup))
    assert (n_classes == 2) is expected


def test_normal_closure_and_core():
    inst = parse_group_spec("dihedral:4")
    G = inst.group
    H = inst.subgroup
    assert not H.is_normal()
    assert H.has_trivial_core()
    closure_mask = G.normal_closure(H.mask, G.full_mask)
    klein = {(0, 1, 2, 3), (0, 3, 2, 1), (2, 1, 0, 3), (2, 3, 0, 1)}
    assert {G.elements[i] for i in range(G.order) if (closure_mask >> i) & 1} == klein


@given(st.sampled_from(STANDARD_FAMILY), st.data())
def test_group_axioms(spec, data):
    G = parse_group_spec(spec).group
    idx = st.integers(0, G.order - 1)
    a, b, c = data.draw(idx), data.draw(idx), data.draw(idx)
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.inv(a)) == G.identity
    assert G.mul(G.identity, a) == a


@pytest.mark.parametrize(
    "spec",
    ["perm: (0 1 2)(3 4), (5 6)", "regular:cyclic:4", "regular:symmetric:3", "frobenius:7:3:2", "alternating:5"],
)
def test_spec_forms(spec):
    inst = parse_group_spec(spec)
    assert inst.group.order >= 1


def test_regular_action_has_trivial_stabilizer():
    inst = parse_group_spec("regular:symmetric:3")
    assert inst.group.order == 6 and inst.group.degree == 6
    assert inst.subgroup.order == 1


@pytest.mark.parametrize(
    "spec,position",
    [
        ("perm: (0 1 x)", 11),
        ("cyclic:x", 7),
        ("frobenius:7:2:2", 10),
        ("nonsense:3", 0),
        ("cyclic", 0),
        ("perm: (0 1) junk", 11),
    ],
)
def test_spec_errors_report_positions(spec, position):
    with pytest.raises(SpecError) as err:
        parse_group_spec(spec)
    assert err.value.position == position


def test_element_budget():
    with pytest.raises(GroupError):
        parse_group_spec("symmetric:6", budget=100)


def test_bad_point():
    with pytest.raises((SpecError, GroupError)):
        point_stabilizer(parse_group_spec("cyclic:3").group, 5)
