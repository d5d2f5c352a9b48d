import warnings

import pytest
from helpers import semiring_for

from bisetalg.bisets import BisetSemiring
from bisetalg.families import multiplicative_order
from bisetalg.prime_degree import (
    affine_instance,
    build_affine_group,
    multiplicative_orbits,
    orbit_double_cosets,
    orbit_inverse,
    orbit_semiring_product,
    prime_classify,
    prime_degree_classifier,
    quotient_labels,
    verify_orbit_products,
    verify_quotient_isomorphism,
)


def affine_cases(primes=(3, 5, 7, 11, 13)):
    for p in primes:
        for t in range(2, p):
            if multiplicative_order(t, p) > 1:
                yield p, t


def test_group_orders():
    G, H, model = build_affine_group(7, 2)
    assert (G.order, H.order, model.r) == (21, 3, 3)
    G, H, model = build_affine_group(5, 4)
    assert (G.order, model.r) == (10, 2)
    with pytest.warns(UserWarning):
        G, H, _ = build_affine_group(3, 2)
    assert G.order == 6 and G.degree == 3


@pytest.mark.parametrize("p,t", [(7, 1), (6, 5), (2, 1), (5, 0)])
def test_bad_parameters(p, t):
    with pytest.raises(ValueError):
        build_affine_group(p, t)


def test_orbits():
    assert multiplicative_orbits(7, 2) == ((0,), (1, 2, 4), (3, 6, 5))
    assert multiplicative_orbits(5, 4) == ((0,), (1, 4), (2, 3))
    assert multiplicative_orbits(3, 2) == ((0,), (1, 2))


@pytest.mark.parametrize(
    "p,t,sizes,dims",
    [(7, 2, [3, 9, 9], [3, 3]), (5, 4, [2, 4, 4], [2, 2]), (3, 2, [2, 4], [2])],
)
def test_double_cosets_from_orbits(p, t, sizes, dims):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inst, model = affine_instance(p, t)
    sr = BisetSemiring.from_instance(inst)
    corr = orbit_double_cosets(model, sr)
    assert [sr.table.sizes[c] for c in corr.class_of_orbit] == sizes
    report = prime_degree_classifier(inst.group, sr)
    assert report["dims"] == dims


def test_sumset_examples():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, m7 = affine_instance(7, 2)
        _, m5 = affine_instance(5, 4)
    for o in range(len(m7.orbits)):
        assert orbit_semiring_product(m7, 0, o) == [o]
    # {1,2,4} + {1,2,4} = F_7^x: the orbits of 1 and 3, no zero
    assert orbit_semiring_product(m7, 1, 1) == [1, 2]
    # {1,4} + {1,4} = {0, 2, 3}: zero and the orbit of 2
    assert orbit_semiring_product(m5, 1, 1) == [0, 2]
    assert orbit_inverse(m7, 1) == 2
    assert orbit_inverse(m5, 1) == 1


@pytest.mark.parametrize("p,t", list(affine_cases()))
def test_products_match_bisets(p, t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inst, model = affine_instance(p, t)
    sr = BisetSemiring.from_instance(inst)
    assert verify_orbit_products(model, sr)["mismatches"] == []
    assert verify_quotient_isomorphism(model, sr)["failures"] == 0


def test_quotient_labels():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, model = affine_instance(13, 3)
    labels = quotient_labels(model)
    assert sorted(labels.values()) == [0, 1, 2, 3]
    # the orbit of 1 is the subgroup <t> itself
    assert labels[model.orbit_of[1]] == 0


def test_classifier_cases():
    s5 = prime_classify(5)
    assert s5["case"] == 1 and s5["dims"] == [4]
    c73 = prime_classify(7, 2)
    assert c73["case"] == 2 and c73["r"] == 3 and c73["dims"] == [3, 3]
    d5 = prime_degree_classifier(semiring_for("dihedral:5").group)
    assert d5["case"] == 2 and d5["r"] == 2 and "note" in d5
    c5 = prime_degree_classifier(semiring_for("cyclic:5").group)
    assert c5["case"] == 2 and c5["r"] == 1


def test_classifier_rejects_non_prime_degree():
    with pytest.raises(ValueError):
        prime_degree_classifier(semiring_for("cyclic:4").group)
