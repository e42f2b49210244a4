"""Oracle and property tests for the exact Laurent-polynomial layer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.errors import NonDivisible
from artifact.qring import (
    ONE,
    ZERO,
    QFraction,
    QLaurent,
    curly_fact_ratio,
    div_exact,
    gauss_binom,
    habiro_divisor,
    pochhammer,
    q_mono,
    q_power,
    qbinom,
    qfact,
    qint,
    qnum,
    substitute_power,
)

H = Fraction(1, 2)


def brace(n):
    """Independent construction of q^{n/2} - q^{-n/2} for cross-checking."""
    if n == 0:
        return ZERO
    return q_power(Fraction(n, 2)) - q_power(Fraction(-n, 2))


# ---------------------------------------------------------------------------
# frozen single-value oracles
# ---------------------------------------------------------------------------


def test_qint_zero_is_zero():
    assert qint(0) == ZERO
    assert qint(0).is_zero()


def test_qint_one():
    assert qint(1) == q_power(H) - q_power(-H)


def test_qint_negation_symmetry():
    assert qint(-2) == -qint(2)
    for n in range(7):
        assert qint(-n) == -qint(n)


def test_qnum_two_is_balanced_pair():
    assert qnum(2) == q_power(H) + q_power(-H)


def test_qbinom_two_one():
    assert qbinom(2, 1) == q_power(H) + q_power(-H)


def test_qbinom_four_two():
    expected = (
        q_power(2) + q_power(1) + q_mono(0, 2) + q_power(-1) + q_power(-2)
    )
    assert qbinom(4, 2) == expected


def test_qbinom_k_zero_is_one():
    for n in range(-4, 8):
        assert qbinom(n, 0) == ONE


def test_qbinom_k_above_n_vanishes():
    assert qbinom(3, 5) == ZERO
    assert qbinom(0, 1) == ZERO


def test_pochhammer_basic():
    q = q_power(1)
    got = pochhammer(q, 1, 2)
    assert got == (ONE - q_power(1)) * (ONE - q_power(2))


def test_pochhammer_empty_product_is_one():
    assert pochhammer(q_power(1), 1, 0) == ONE


def test_pochhammer_hitting_one_vanishes():
    # (q^{-1}; q)_2 contains the factor 1 - q^0 = 0.
    assert pochhammer(q_power(-1), 1, 2) == ZERO


def test_pochhammer_fractional_step():
    got = pochhammer(q_power(Fraction(1, 3)), Fraction(1, 3), 2)
    expected = (ONE - q_power(Fraction(1, 3))) * (ONE - q_power(Fraction(2, 3)))
    assert got == expected


def test_substitute_power_square():
    assert substitute_power(q_power(H), 2) == q_power(1)


def test_substitute_power_inversion_on_odd_brace():
    f = brace(3)
    assert substitute_power(f, -1) == -f


def test_substitute_power_palindrome_fixed():
    f = qbinom(4, 2)  # palindromic in q
    assert substitute_power(f, -1) == f


def test_div_exact_braces():
    got = div_exact(brace(4), brace(2))
    assert got == q_power(1) + q_power(-1)


def test_div_exact_by_one():
    f = qbinom(4, 2) + q_power(Fraction(7, 3))
    assert div_exact(f, ONE) == f


def test_div_exact_failure_raises():
    with pytest.raises(NonDivisible):
        div_exact(ONE - q_power(1), ONE - q_power(2))


def test_gauss_binom_matches_balanced():
    # unbalanced Gaussian binomial = balanced one shifted by a half-integer power
    for m in range(7):
        for j in range(m + 1):
            assert gauss_binom(m, j) == qbinom(m, j) * q_power(
                Fraction(j * (m - j), 2)
            )


def test_curly_fact_ratio_identity():
    # {2k+1}!/{k}! equals a signed monomial times (q^{k+1}; q)_{k+1}
    for k in range(8):
        lhs = curly_fact_ratio(k)
        sign = 1 if (k + 1) % 2 == 0 else -1
        rhs = (
            q_mono(Fraction(-(3 * k + 2) * (k + 1), 4), sign)
            * pochhammer(q_power(k + 1), 1, k + 1)
        )
        assert lhs == rhs


def test_habiro_divisor_small():
    assert habiro_divisor(0) == ONE
    assert habiro_divisor(1) == div_exact(brace(3) * brace(2), brace(1))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_text_round_trip():
    f = q_mono(Fraction(3, 2), -2) + q_mono(0, Fraction(1, 3)) + q_power(-1)
    assert QLaurent.from_text(f.to_text()) == f


def test_text_canonical_form():
    f = q_power(H) - q_power(-H)
    assert f.to_text() == "2; -1:-1, 1:1"
    assert ZERO.to_text() == "1;"


def test_json_round_trip():
    f = q_mono(Fraction(-5, 4), Fraction(2, 7)) + q_power(3)
    assert QLaurent.from_json(f.to_json()) == f


def test_scale_is_minimized_in_serialization():
    f = q_mono(Fraction(2, 4), 1)  # exponent 1/2 presented at scale 4
    assert f.to_text() == "2; 1:1"


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

exponents = st.fractions(
    min_value=-4, max_value=4, max_denominator=4
)
coeffs = st.one_of(
    st.integers(min_value=-9, max_value=9),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
)


@st.composite
def laurents(draw):
    n = draw(st.integers(min_value=0, max_value=4))
    f = ZERO
    for _ in range(n):
        f = f + q_mono(draw(exponents), draw(coeffs))
    return f


@settings(max_examples=60, deadline=None)
@given(laurents(), laurents(), laurents())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + ZERO == f
    assert f * ONE == f
    assert f - f == ZERO


@settings(max_examples=40, deadline=None)
@given(laurents(), laurents())
def test_division_inverts_multiplication(f, g):
    if g.is_zero():
        return
    assert div_exact(f * g, g) == f


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=9))
def test_qbinom_symmetry(n):
    for k in range(n + 1):
        assert qbinom(n, k) == qbinom(n, n - k)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=-3, max_value=3),
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=3),
)
def test_pochhammer_splits(e, m, n):
    first = q_power(e)
    step = 1
    lhs = pochhammer(first, step, m + n)
    rhs = pochhammer(first, step, m) * pochhammer(q_power(e + m * step), step, n)
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(laurents())
def test_substitute_power_involution(f):
    assert substitute_power(substitute_power(f, -1), -1) == f


@settings(max_examples=40, deadline=None)
@given(laurents())
def test_serialization_round_trip_property(f):
    assert QLaurent.from_text(f.to_text()) == f
    assert QLaurent.from_json(f.to_json()) == f


# ---------------------------------------------------------------------------
# fractions with factored denominators
# ---------------------------------------------------------------------------


def test_qfraction_equality_cross_multiplies():
    a = QFraction(brace(4), (brace(2),))
    b = QFraction(q_power(1) + q_power(-1), ())
    assert a == b


def test_qfraction_arithmetic():
    half = QFraction(ONE, (brace(1),))
    s = half + half
    assert s == QFraction(ONE + ONE, (brace(1),))
    p = half * QFraction(brace(1), ())
    assert p == QFraction(ONE, ())


def test_qfraction_as_laurent_when_exact():
    f = QFraction(brace(4) * brace(3), (brace(2),))
    assert f.as_laurent() == div_exact(brace(4) * brace(3), brace(2))


def test_qfraction_substitute_power():
    f = QFraction(brace(3), (brace(1),))
    g = f.substitute_power(-1)
    assert g == QFraction(-brace(3), (-brace(1),))
    assert g.as_laurent() == qnum(3)
