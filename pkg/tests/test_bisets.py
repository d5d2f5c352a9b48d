from math import lcm

import pytest
from helpers import elements_of, inverse, semiring_for, set_product
from hypothesis import given
from hypothesis import strategies as st

from bisetalg.bisets import BisetError, height_profile, stabilized_power_form
from bisetalg.families import STANDARD_FAMILY

# D4 on the square: sigma = (0 1 2 3), tau = (1 3) fixes 0, sigma^2 = (0 2)(1 3)
SIGMA, TAU, SIGMA2 = (1, 2, 3, 0), (0, 3, 2, 1), (2, 3, 0, 1)
KLEIN = {(0, 1, 2, 3), TAU, (2, 1, 0, 3), SIGMA2}


def bisets(draw_from=STANDARD_FAMILY):
    return st.sampled_from(draw_from).flatmap(
        lambda spec: st.tuples(
            st.just(semiring_for(spec)),
            *(st.integers(0, (1 << semiring_for(spec).n_classes) - 1) for _ in range(3)),
        )
    )


@given(bisets())
def test_semiring_laws(case):
    sr, a, b, c = case
    S, T, U = (sr.from_classes(i for i in range(sr.n_classes) if m >> i & 1) for m in (a, b, c))
    assert (S * T) * U == S * (T * U)
    assert S * (T | U) == (S * T) | (S * U)
    assert (S | T) * U == (S * U) | (T * U)
    assert S | S == S and S | T == T | S
    assert sr.one * S == S == S * sr.one
    assert sr.zero * S == sr.zero == S * sr.zero
    assert S | sr.zero == S


@given(bisets())
def test_inverse_is_an_antiautomorphism(case):
    sr, a, b, _ = case
    S = sr.from_classes(i for i in range(sr.n_classes) if a >> i & 1)
    T = sr.from_classes(i for i in range(sr.n_classes) if b >> i & 1)
    assert ~(S * T) == ~T * ~S
    assert ~(S | T) == ~S | ~T
    assert ~~S == S


@given(bisets())
def test_products_match_elementwise_brute_force(case):
    sr, a, b, _ = case
    S = sr.from_classes(i for i in range(sr.n_classes) if a >> i & 1)
    T = sr.from_classes(i for i in range(sr.n_classes) if b >> i & 1)
    assert elements_of(S * T) == set_product(elements_of(S), elements_of(T))
    assert elements_of(~S) == {inverse(x) for x in elements_of(S)}
    assert elements_of(S | T) == elements_of(S) | elements_of(T)


@given(bisets())
def test_dimension_is_size_over_h(case):
    sr, a, _, _ = case
    S = sr.from_classes(i for i in range(sr.n_classes) if a >> i & 1)
    assert S.dimension() * sr.subgroup.order == S.size


def test_unit_and_zero(d4):
    assert d4.biset([0]) == d4.one
    assert elements_of(d4.one) == {(0, 1, 2, 3), TAU}
    assert d4.biset([]) == d4.zero and d4.zero.size == 0


def test_d4_classes(d4):
    G = d4.group
    s = d4.double_coset_of(G.index_of(SIGMA))
    assert s.size == 4
    assert (s | d4.one).size == 6
    assert elements_of(s * s) == KLEIN
    assert s * s == d4.one | d4.double_coset_of(G.index_of(SIGMA2))
    # (HsH)^3 is computed against the elementwise product
    assert elements_of(s**3) == set_product(elements_of(s), KLEIN)
    assert s**3 == s


def test_inverse_examples(d4):
    assert ~d4.one == d4.one
    t = d4.double_coset_of(d4.group.index_of(SIGMA2))
    assert ~t == t


def test_frobenius_inverse_elementwise():
    sr = semiring_for("frobenius:5:4:2")
    G = sr.group
    sigma = G.index_of((1, 2, 3, 4, 0))
    s = sr.double_coset_of(sigma)
    assert ~s == sr.double_coset_of(G.inv(sigma))
    assert elements_of(~s) == {inverse(x) for x in elements_of(s)}


def test_powers(d4):
    s = d4.atom(1)
    assert s**0 == d4.one and s**1 == s
    cyc = semiring_for("cyclic:6")
    G = cyc.group
    sigma = G.index_of((1, 2, 3, 4, 5, 0))
    for m in range(8):
        assert (cyc.double_coset_of(sigma) ** m).elements() == [G.power(sigma, m)]
    with pytest.raises(BisetError):
        s.power(-1)


def test_is_subgroup(d4):
    G = d4.group
    s = d4.double_coset_of(G.index_of(SIGMA))
    klein = d4.one | d4.double_coset_of(G.index_of(SIGMA2))
    assert d4.one.is_subgroup()
    assert not s.is_subgroup()
    assert klein.is_subgroup()
    assert d4.full.is_subgroup()
    assert not d4.zero.is_subgroup()


@pytest.mark.parametrize("spec", STANDARD_FAMILY)
def test_is_subgroup_matches_closure(spec):
    sr = semiring_for(spec)
    G = sr.group
    for s in sr.all_bisets():
        assert s.is_subgroup() == (bool(s) and G.is_subgroup_mask(s.mask))


def test_from_mask_rejects_non_bisets(d4):
    G = d4.group
    with pytest.raises(BisetError):
        d4.from_mask(1 << G.index_of(SIGMA))
    with pytest.raises(BisetError):
        d4.biset([5])


def test_different_semirings_do_not_mix(d4):
    other = semiring_for("symmetric:3")
    with pytest.raises(BisetError):
        d4.one * other.one


# heights --------------------------------------------------------------------------


def test_height_of_element_in_h(d4):
    prof = height_profile(d4, d4.group.index_of(TAU))
    assert prof.height == 0
    assert prof.normal_closure == d4.one
    assert prof.generated_subgroup == d4.one


def test_height_d4_rotation(d4):
    G = d4.group
    prof = height_profile(d4, G.index_of(SIGMA))
    assert prof.height == 1
    assert elements_of(prof.normal_closure) == KLEIN
    assert prof.generated_subgroup == d4.full
    assert prof.cyclic_order == 2
    assert prof.chain == (2, 4)


def test_height_cyclic_regular():
    sr = semiring_for("cyclic:7")
    G = sr.group
    sigma = G.index_of((1, 2, 3, 4, 5, 6, 0))
    prof = height_profile(sr, sigma)
    assert prof.height == 0
    assert prof.normal_closure.elements() == [G.identity]
    assert prof.generated_subgroup == sr.full
    assert prof.cyclic_order == 7


@pytest.mark.parametrize("spec", STANDARD_FAMILY)
def test_height_bounded_and_stable(spec):
    sr = semiring_for(spec)
    G = sr.group
    for g in range(G.order):
        prof = height_profile(sr, g)
        assert prof.height <= sr.index
        N = prof.normal_closure
        assert N.is_subgroup()
        # N g^m for every m from the height up to the order of g and beyond
        order = G.element_order(g)
        for m in range(prof.height, prof.height + order + 1):
            power, cert = stabilized_power_form(sr, g, m)
            assert cert.equal and power.mask == G.right_translate(N.mask, G.power(g, m))


def test_stable_power_form_example(d4):
    G = d4.group
    sigma = G.index_of(SIGMA)
    power, _ = stabilized_power_form(d4, sigma, 1)
    assert elements_of(power) == {SIGMA, (3, 0, 1, 2), (1, 0, 3, 2), (3, 2, 1, 0)}
    assert elements_of(power) == set_product(KLEIN, {SIGMA})
    with pytest.raises(BisetError):
        stabilized_power_form(d4, G.index_of(SIGMA), 0)


@pytest.mark.parametrize("spec", ["dihedral:5", "frobenius:7:3:2", "symmetric:4"])
def test_power_at_order_multiple_is_subgroup(spec):
    sr = semiring_for(spec)
    G = sr.group
    for g in range(G.order):
        prof = height_profile(sr, g)
        m = G.element_order(g)
        while m < prof.height:
            m += G.element_order(g)
        assert sr.double_coset_of(g) ** m == prof.normal_closure


def test_lcm_exponent_gives_the_subgroup(d4):
    # every element of D4 has order dividing 4
    G = d4.group
    m = lcm(*(G.element_order(g) for g in range(G.order)))
    for g in range(G.order):
        assert (d4.double_coset_of(g) ** m).is_subgroup()
