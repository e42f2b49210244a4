"""Oracle and property tests for integer/rational helpers."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.numtheory import (
    cf_value,
    dedekind_sum,
    floor_continued_fraction,
    jacobi,
    modinv,
    neg_continued_fraction,
    sn,
)


# ---------------------------------------------------------------------------
# frozen single-value oracles
# ---------------------------------------------------------------------------


def test_jacobi_two_fifteen():
    assert jacobi(2, 15) == 1


def test_jacobi_known_values():
    assert jacobi(1, 1) == 1
    assert jacobi(2, 3) == -1
    assert jacobi(3, 5) == -1
    assert jacobi(4, 5) == 1
    assert jacobi(5, 9) == 1
    assert jacobi(0, 3) == 0
    assert jacobi(6, 9) == 0


def test_jacobi_minus_one_rule():
    for r in range(1, 40, 2):
        assert jacobi(-1, r) == (1 if r % 4 == 1 else -1)


def test_jacobi_rejects_even_or_nonpositive():
    with pytest.raises(ValueError):
        jacobi(3, 4)
    with pytest.raises(ValueError):
        jacobi(3, -5)


def test_dedekind_one_three():
    assert dedekind_sum(1, 3) == Fraction(1, 18)


def test_dedekind_one_two():
    assert dedekind_sum(1, 2) == 0


def test_dedekind_unit_modulus():
    assert dedekind_sum(5, 1) == 0
    assert dedekind_sum(7, -1) == 0


def test_dedekind_rejects_non_coprime():
    from artifact.errors import NonCoprime

    with pytest.raises(NonCoprime):
        dedekind_sum(2, 4)


def test_dedekind_three_s_one_a():
    # 3*s(1, a) has the closed form 1/(2a) + (a - 3*sign(a))/4
    for a in list(range(1, 51)) + [-n for n in range(1, 51)]:
        lhs = 3 * dedekind_sum(1, a)
        rhs = Fraction(1, 2 * a) + Fraction(a - 3 * sn(a), 4)
        assert lhs == rhs, a


def test_neg_continued_fraction_examples():
    assert neg_continued_fraction(Fraction(-1, 3)) == [3]
    assert neg_continued_fraction(Fraction(1, 2)) == [-2]
    assert neg_continued_fraction(Fraction(2, 3)) == [2, -1]
    assert neg_continued_fraction(Fraction(3, 2)) == [2, 2, 0]
    assert neg_continued_fraction(Fraction(5)) == [5, 0]


def test_floor_variant_example():
    assert floor_continued_fraction(Fraction(3, 2)) == [-3, -1]


def test_cf_value_round_trip_examples():
    for x in [Fraction(-1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(5)]:
        assert cf_value(neg_continued_fraction(x)) == x
        assert cf_value(floor_continued_fraction(x)) == x


def test_modinv():
    assert modinv(3, 7) == 5
    assert modinv(2, 9) == 5
    with pytest.raises(ValueError):
        modinv(3, 9)


def test_sn():
    assert sn(5) == 1
    assert sn(-2) == -1
    assert sn(0) == 0
    assert sn(Fraction(-1, 3)) == -1


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(
    st.integers(min_value=-40, max_value=40),
    st.integers(min_value=-40, max_value=40),
    st.integers(min_value=0, max_value=19),
)
def test_jacobi_multiplicative_in_top(d1, d2, i):
    r = 2 * i + 1
    assert jacobi(d1 * d2, r) == jacobi(d1, r) * jacobi(d2, r)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=-60, max_value=60), st.integers(min_value=0, max_value=19))
def test_jacobi_periodic_in_top(d, i):
    r = 2 * i + 1
    assert jacobi(d, r) == jacobi(d + r, r)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=-15, max_value=15), st.integers(min_value=-15, max_value=15))
def test_dedekind_symmetries(b, a):
    from math import gcd

    if a == 0 or gcd(a, b) != 1:
        return
    assert dedekind_sum(b, -a) == -dedekind_sum(b, a)
    assert dedekind_sum(-b, a) == -dedekind_sum(b, a)
    assert dedekind_sum(b + a, a) == dedekind_sum(b, a)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=60), st.integers(min_value=1, max_value=60))
def test_dedekind_reciprocity(a, b):
    from math import gcd

    if gcd(a, b) != 1:
        return
    lhs = 12 * (dedekind_sum(a, b) + dedekind_sum(b, a))
    rhs = Fraction(a, b) + Fraction(b, a) + Fraction(1, a * b) - 3
    assert lhs == rhs


@settings(max_examples=120, deadline=None)
@given(
    st.integers(min_value=-60, max_value=60),
    st.integers(min_value=1, max_value=60),
)
def test_continued_fraction_round_trip(num, den):
    if num == 0:
        return
    x = Fraction(num, den)
    for expand in (neg_continued_fraction, floor_continued_fraction):
        ms = expand(x)
        assert all(isinstance(m, int) for m in ms)
        assert cf_value(ms) == x
