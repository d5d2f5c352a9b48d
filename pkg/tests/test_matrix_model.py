import numpy as np
import pytest
from helpers import semiring_for
from hypothesis import given
from hypothesis import strategies as st

from bisetalg.fields import GF, QQ, ZZ
from bisetalg.matrices import ExactMatrix
from bisetalg.matrix_model import (
    NotSeparableError,
    PatternedElement,
    SpanPattern,
    centralizer_pattern,
    find_invertible_in_span,
    generation_test,
    intermediate_subgroups,
    kak_power_chain,
    pattern_dimension,
    pattern_to_biset,
    permutation_element,
    phi_pattern,
    phi_pattern_direct,
    support_pattern,
    trace_zero_check,
    twisted_centralizer_pattern,
    verify_main_isomorphism,
)
from bisetalg.families import STANDARD_FAMILY

SIGMA, SIGMA2 = (1, 2, 3, 0), (2, 3, 0, 1)


def test_phi_of_unit_and_whole_group(d4):
    assert phi_pattern(d4.one) == SpanPattern.identity(4)
    assert phi_pattern(d4.full) == SpanPattern.full(4)


def test_phi_d4_rotation_class(d4):
    s = d4.double_coset_of(d4.group.index_of(SIGMA))
    p = phi_pattern(s)
    assert p.count() == 8
    assert pattern_dimension(s) == 2
    # the pattern of the rotation class, rows and columns indexed by cosets
    assert p.to_text() == "0101\n1010\n0101\n1010\n"


def test_d4_decomposition_patterns(d4):
    # identity, sigma^2 and sigma classes: dims 1, 1, 2, and they tile the square
    dims = [pattern_dimension(d4.atom(c)) for c in range(3)]
    assert dims == [1, 2, 1]
    patterns = [phi_pattern(d4.atom(c)) for c in range(3)]
    assert sum(p.count() for p in patterns) == 16
    union = SpanPattern.empty(4)
    for p in patterns:
        assert (union & p) == SpanPattern.empty(4)
        union = union | p
    assert union == SpanPattern.full(4)
    assert patterns[2].to_text() == "0010\n0001\n1000\n0100\n"


def test_frobenius_dimensions():
    sr = semiring_for("frobenius:7:3:2")
    assert [pattern_dimension(sr.atom(c)) for c in range(sr.n_classes)] == [1, 3, 3]
    assert pattern_dimension(sr.full) == sr.index


def test_pattern_products(d4):
    s = d4.double_coset_of(d4.group.index_of(SIGMA))
    t = d4.double_coset_of(d4.group.index_of(SIGMA2))
    assert phi_pattern(s) @ phi_pattern(s) == phi_pattern(d4.one | t)
    full = SpanPattern.full(4)
    assert full @ full == full
    assert SpanPattern.identity(4) @ phi_pattern(s) == phi_pattern(s)


def patterns(max_n=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n),
            st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n),
        )
    )


@given(patterns(), st.integers(0, 2**32 - 1))
def test_boolean_product_is_support_of_positive_product(case, seed):
    n, rows_a, rows_b = case
    p, q = SpanPattern(n, tuple(rows_a)), SpanPattern(n, tuple(rows_b))
    rng = np.random.default_rng(seed)
    x = ExactMatrix(ZZ, [[int(rng.integers(1, 5)) if (i, j) in p else 0 for j in range(n)] for i in range(n)])
    y = ExactMatrix(ZZ, [[int(rng.integers(1, 5)) if (i, j) in q else 0 for j in range(n)] for i in range(n)])
    assert support_pattern(x @ y) == p @ q
    assert (p @ q).transpose() == q.transpose() @ p.transpose()


@given(patterns())
def test_text_round_trip(case):
    n, rows, _ = case
    p = SpanPattern(n, tuple(rows))
    assert SpanPattern.from_text(p.to_text()) == p


@pytest.mark.parametrize("text", ["01\n1", "012\n000\n000", "ab\ncd"])
def test_bad_pattern_text(text):
    with pytest.raises(ValueError):
        SpanPattern.from_text(text)


@pytest.mark.parametrize("spec", STANDARD_FAMILY)
def test_phi_definition_and_inverse(spec):
    sr = semiring_for(spec)
    for s in sr.all_bisets():
        p = phi_pattern(s)
        assert p == phi_pattern_direct(s)
        assert p.count() == sr.index * s.size // sr.subgroup.order
        assert p.transpose() == phi_pattern(~s)
        if s:
            assert pattern_to_biset(sr, p) == s


@pytest.mark.parametrize("spec", ["symmetric:3", "dihedral:4", "frobenius:7:3:2"])
def test_verify_main_isomorphism(spec):
    report = verify_main_isomorphism(semiring_for(spec), rng=np.random.default_rng(1))
    assert report["failures"] == []
    assert report["pairs_checked"] > 0


def test_patterned_element_validates_support():
    p = SpanPattern.identity(2)
    with pytest.raises(ValueError):
        PatternedElement(p, ExactMatrix(QQ, [[1, 1], [0, 1]]))


# generation and invertibility ---------------------------------------------------


def test_generation_examples():
    F = GF(101)
    ones = ExactMatrix(F, [[1] * 3 for _ in range(3)])
    theta = ExactMatrix.diag(F, [1, 2, 3])
    assert generation_test(ones, theta)
    assert not generation_test(ExactMatrix.diag(F, [4, 5, 6]), theta)
    e12 = ExactMatrix.unit(F, 2, 0, 1)
    assert not generation_test(e12, ExactMatrix.diag(F, [1, 2]))
    with pytest.raises(NotSeparableError):
        generation_test(ones, ExactMatrix.diag(F, [1, 1, 3]))


def test_permutation_elements(d4):
    F5 = GF(5)
    assert permutation_element(d4.one, 0, F5) == ExactMatrix.identity(F5, 4)
    sigma = d4.group.index_of(SIGMA)
    s = d4.double_coset_of(sigma)
    # sigma does not normalize H, so g_i -> g_i sigma H is not a bijection
    assert permutation_element(s, sigma, F5) is None
    w = find_invertible_in_span(s, F5)
    m = w.element.matrix
    assert w.method in ("permutation", "matching")
    assert support_pattern(m).issubset(phi_pattern(s))
    assert all(bin(r).count("1") == 1 for r in support_pattern(m).rows)
    assert m.det() != 0 and w.det == m.det()

    sr = semiring_for("frobenius:7:3:2")
    F2 = GF(2)
    for c in range(1, sr.n_classes):
        w = find_invertible_in_span(sr.atom(c), F2)
        assert w is not None and w.method in ("permutation", "matching") and w.det == 1
        assert all(bin(r).count("1") == 1 for r in support_pattern(w.element.matrix).rows)


def test_trace_zero(d4):
    s = d4.double_coset_of(d4.group.index_of(SIGMA))
    assert not trace_zero_check(d4.one)
    assert trace_zero_check(s)
    assert not trace_zero_check(d4.full)


# centralizers ------------------------------------------------------------------------


def test_centralizer_extremes(d4):
    assert centralizer_pattern(d4, d4.one) == SpanPattern.identity(4)
    assert centralizer_pattern(d4, d4.full) == SpanPattern.full(4)


def test_centralizer_of_klein(d4):
    klein = d4.one | d4.double_coset_of(d4.group.index_of(SIGMA2))
    p = centralizer_pattern(d4, klein)
    assert p.count() == 8
    assert p.to_text() == "1010\n0101\n1010\n0101\n"
    assert set(s.classes for s in intermediate_subgroups(d4)) == {1, klein.classes, d4.full.classes}


def test_twisted_centralizer(d4):
    G = d4.group
    klein = d4.one | d4.double_coset_of(G.index_of(SIGMA2))
    assert twisted_centralizer_pattern(d4, klein, G.identity) == centralizer_pattern(d4, klein)
    p = twisted_centralizer_pattern(d4, klein, G.index_of(SIGMA))
    assert p == phi_pattern(d4.double_coset_of(G.index_of(SIGMA)))
    assert p.count() == 8

    cyc = semiring_for("cyclic:5")
    sigma = cyc.group.index_of((1, 2, 3, 4, 0))
    q = twisted_centralizer_pattern(cyc, cyc.one, sigma)
    assert all(bin(r).count("1") == 1 for r in q.rows)
    assert q.transpose() @ q == SpanPattern.identity(5)


# power chains -----------------------------------------------------------------------


def test_kak_chain_d4(d4):
    rng = np.random.default_rng(3)
    F = GF(101)
    s = d4.double_coset_of(d4.group.index_of(SIGMA))
    a = _invertible_generic(s, F, rng)
    chain = kak_power_chain(a, s, 4, rng=rng)
    assert chain.dims == (2, 2, 2, 2)
    assert chain.algebra_height == chain.biset_height == 1


def test_kak_chain_cyclic():
    sr = semiring_for("cyclic:4")
    rng = np.random.default_rng(4)
    s = sr.double_coset_of(sr.group.index_of((1, 2, 3, 0)))
    a = _invertible_generic(s, GF(101), rng)
    chain = kak_power_chain(a, s, 4, rng=rng)
    assert chain.dims == (1, 1, 1, 1)
    assert chain.patterns[3] == SpanPattern.identity(4)
    assert chain.algebra_height == 0


def test_kak_chain_unit(d4):
    rng = np.random.default_rng(5)
    a = _invertible_generic(d4.one, GF(101), rng)
    chain = kak_power_chain(a, d4.one, 3, rng=rng)
    assert all(p == SpanPattern.identity(4) for p in chain.patterns)


def _invertible_generic(s, ring, rng):
    pattern = phi_pattern(s)
    while True:
        a = PatternedElement.random(pattern, ring, rng)
        if a.matrix.det() != 0:
            return a
