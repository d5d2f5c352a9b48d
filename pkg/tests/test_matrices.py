from fractions import Fraction

import numpy as np
import pytest
import sympy
from helpers import fraction_det
from hypothesis import given
from hypothesis import strategies as st

from bisetalg.fields import GF, QQ, ZZ
from bisetalg.matrices import ExactMatrix, is_separable


def int_matrices(max_n=5, lo=-6, hi=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


@given(int_matrices())
def test_bareiss_det_matches_fraction_elimination(rows):
    assert ExactMatrix(ZZ, rows).det() == fraction_det(rows)


@given(int_matrices(), st.sampled_from([2, 3, 5, 7]))
def test_prime_field_det_is_integer_det_mod_p(rows, p):
    F = GF(p)
    m = ExactMatrix(F, [[x % p for x in r] for r in rows])
    assert m.det() == int(fraction_det(rows)) % p


@given(int_matrices(max_n=4))
def test_charpoly_matches_sympy(rows):
    t = sympy.symbols("t")
    expected = sympy.Poly(sympy.Matrix(rows).charpoly(t).as_expr(), t).all_coeffs()
    assert ExactMatrix(ZZ, rows).charpoly() == [int(c) for c in expected]


@given(int_matrices(max_n=4, lo=-3, hi=3))
def test_charpoly_constant_term_is_signed_det(rows):
    m = ExactMatrix(ZZ, rows)
    n = len(rows)
    assert m.charpoly()[n] == (-1) ** n * m.det()


@given(int_matrices(max_n=5, lo=-2, hi=2))
def test_rank_and_nullspace(rows):
    m = ExactMatrix(QQ, [[Fraction(x) for x in r] for r in rows])
    assert m.rank() == sympy.Matrix(rows).rank()
    basis = m.nullspace()
    assert len(basis) == m.ncols - m.rank()
    for v in basis:
        col = ExactMatrix(QQ, [[x] for x in v])
        assert (m @ col).is_zero()


def test_rank_over_small_field():
    # rank 2 over QQ, rank 1 over GF(2)
    rows = [[1, 1], [1, 3]]
    assert ExactMatrix(QQ, rows).rank() == 2
    assert ExactMatrix(GF(2), [[1, 1], [1, 1]]).rank() == 1


def test_charpoly_over_gf4():
    F = GF(4)
    a = F.generator
    m = ExactMatrix.diag(F, [a, 1])
    # (t - a)(t - 1) = t^2 + (a + 1) t + a in characteristic 2
    assert m.charpoly() == [1, F.add(a, 1), a]


def test_power_and_trace():
    m = ExactMatrix(ZZ, [[1, 2], [3, 4]])
    assert (m @ m).trace() == 29
    assert (m**3) == m @ m @ m
    assert m.trace_of_product(m) == 29


def test_separability():
    assert is_separable(ExactMatrix.diag(QQ, [1, 2, 3]))
    assert not is_separable(ExactMatrix.diag(QQ, [1, 1, 3]))


def test_shape_errors():
    with pytest.raises(ValueError):
        ExactMatrix(ZZ, [[1, 2]]).det()
    with pytest.raises(ValueError):
        ExactMatrix(ZZ, [[1, 2], [3, 4]]) @ ExactMatrix(ZZ, [[1, 2, 3]])


def test_random_matrix_is_reproducible():
    a = ExactMatrix.random(GF(7), 3, np.random.default_rng(5))
    b = ExactMatrix.random(GF(7), 3, np.random.default_rng(5))
    assert a == b
