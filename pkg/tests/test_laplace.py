"""Oracle and property tests for the Laplace-transform operator and kernels."""

from fractions import Fraction
from math import gcd

import pytest

from artifact.cyclotomic import (
    CycElem,
    QuadMonomialSum,
    divides,
    ev,
    gauss_sum,
    xi_sum,
)
from artifact.errors import PoleHit
from artifact.laplace import (
    laplace_at_root,
    laplace_formal,
    s_n_value,
    y_c,
    y_habiro,
)
from artifact.numtheory import modinv
from artifact.qring import (
    ONE,
    QFraction,
    curly_fact_ratio,
    q_power,
    qbinom,
    qfact,
    qint,
    substitute_power,
)


def mono(beta, gamma=0, coeff=ONE):
    return QuadMonomialSum.single(0, beta, gamma, coeff)


# ---------------------------------------------------------------------------
# laplace_formal
# ---------------------------------------------------------------------------


def test_formal_constant():
    assert laplace_formal(mono(0), 7) == ONE
    assert laplace_formal(mono(0), Fraction(-3, 2)) == ONE


def test_formal_linear():
    assert laplace_formal(mono(1), 1) == q_power(-1)


def test_formal_rational_kernel():
    assert laplace_formal(mono(2), 5) == q_power(Fraction(-4, 5))


def test_formal_is_linear_and_keeps_coefficients():
    f = QuadMonomialSum(
        [(0, 1, Fraction(1, 2), 2 * ONE), (0, -2, 0, q_power(1))]
    )
    got = laplace_formal(f, 3)
    expected = 2 * q_power(Fraction(1, 2) - Fraction(1, 3)) + q_power(
        1 - Fraction(4, 3)
    )
    assert got == expected


def test_formal_rejects_quadratic_part():
    with pytest.raises(ValueError):
        laplace_formal(QuadMonomialSum.single(1, 1, 0), 1)


def test_formal_rejects_non_integer_linear_exponent():
    with pytest.raises(ValueError):
        laplace_formal(mono(Fraction(1, 2)), 1)


# ---------------------------------------------------------------------------
# laplace_at_root
# ---------------------------------------------------------------------------


def test_at_root_killed_by_gcd():
    assert laplace_at_root(mono(1), 3, 9).is_zero()


def test_at_root_shared_factor_survivor():
    got = laplace_at_root(mono(3), 3, 9)
    expected = CycElem.root_power(3, -1).embed(9)
    assert got == expected


def test_at_root_constant():
    assert laplace_at_root(mono(0), 2, 5) == CycElem.one(5)


def brute_force_weighted_sum(d, a, r):
    f = QuadMonomialSum.single(Fraction(d, 4), a, Fraction(-d, 4))
    return xi_sum(f, r)


def test_at_root_matches_brute_force_including_shared_factors():
    for r in (9, 15):
        for d in (3, 5, 6, 2):
            for a in range(-6, 7):
                lhs = brute_force_weighted_sum(d, a, r)
                rhs = gauss_sum(d, r) * laplace_at_root(mono(a), d, r)
                assert lhs == rhs, (r, d, a)


def test_lemma_consistency_formal_vs_sum():
    # for gcd(d, r) = 1 the root value is ev of the formal image
    for r in (5, 7, 9, 15):
        for d in (1, 2, 3, 5, -1):
            if gcd(abs(d), r) != 1:
                continue
            for a in range(-6, 7):
                lhs = brute_force_weighted_sum(d, a, r)
                rhs = gauss_sum(d, r) * ev(laplace_formal(mono(a), d), r)
                assert lhs == rhs, (r, d, a)


# ---------------------------------------------------------------------------
# kernels Y_c, Y, S_N
# ---------------------------------------------------------------------------


def test_y_c_base_cases():
    b = 2
    assert y_c(0, b, 1) == ONE - q_power(b)
    assert y_c(0, 0, 1).is_zero()
    assert y_c(0, b, 3) == ONE


def test_y_habiro_base_cases():
    assert y_habiro(0, 3) == ONE - q_power(Fraction(1, 3))
    assert y_habiro(0, 1) == ONE - q_power(1)


def test_y_habiro_term_pairing():
    # the j-th and (2k+1-j)-th terms carry equal binomials, opposite signs,
    # and exponents that differ by (2(j-k)-1)/a
    for a in (1, 2, 3):
        for k in range(5):
            for j in range(k + 1):
                jj = 2 * k + 1 - j
                assert qbinom(2 * k + 1, j) == qbinom(2 * k + 1, jj)
                assert (-1) ** j == -((-1) ** jj)
                ej = Fraction((j - k) ** 2, 1) / a
                ejj = Fraction((jj - k) ** 2, 1) / a
                assert ej - ejj == Fraction(2 * (j - k) - 1, a)


def test_y_habiro_inversion_symmetry_integer_case():
    # with a=1 the pairing aggregates to a clean monomial relation
    for k in range(6):
        y = y_habiro(k, 1)
        sign = 1 if (k + 1) % 2 == 0 else -1
        expected = sign * q_power(Fraction(-(k + 1) * (k + 2), 2)) * y
        assert substitute_power(y, -1) == expected, k


def test_s_n_single_term():
    got = s_n_value(1, 1, 2, None, False)
    assert got == QFraction(ONE - q_power(2))


def test_s_n_trivial_when_c_large():
    got = s_n_value(2, 4, 1, None, False)
    assert got == QFraction(ONE)


def test_s_n_matches_y_c_symbolically():
    # the relation between Y and S holds as rational functions for every gap
    for c in (1, 2, 3):
        for k in range(5):
            for b in range(-3, 4):
                s = s_n_value(k + 1, c, b, None, False)
                sign = 1 if k % 2 == 0 else -1
                lhs = QFraction(y_c(k, b, c))
                rhs = QFraction(sign * qbinom(2 * k + 1, k) * s.num, s.den_factors)
                assert lhs == rhs, (c, k, b)


def test_s_n_matches_y_c_at_roots():
    # for general gap c the relation is a root-of-unity identity
    from artifact.errors import PoleHit as _PoleHit

    checked = 0
    for r in (7, 11):
        for c in (1, 2, 3):
            for k in range(5):
                for b in range(-3, 4):
                    try:
                        s = s_n_value(k + 1, c, b, r, True)
                    except _PoleHit:
                        continue
                    sign = 1 if k % 2 == 0 else -1
                    lhs = ev(y_c(k, b, c), r)
                    rhs = sign * ev(qbinom(2 * k + 1, k), r) * s
                    assert lhs == rhs, (r, c, k, b)
                    checked += 1
    assert checked > 100


def test_s_n_at_root():
    r = 7
    got = s_n_value(2, 1, 1, r, True)
    s = s_n_value(2, 1, 1, None, False)
    expected = ev(s.num, r) * ev(s.den, r).inv()
    assert got == expected


def test_s_n_pole_reported():
    # at r=3 the denominator (q^{N+1}; q)_{cn} hits a vanishing factor
    with pytest.raises(PoleHit):
        s_n_value(2, 1, 1, 3, True)


# ---------------------------------------------------------------------------
# the divisibility theorem and the binomial summation lemma, as test grids
# ---------------------------------------------------------------------------


def habiro_basis_elem(n, k):
    """qbinom(n+k, 2k+1) * {k}! — the basis the expansions are written in."""
    return qbinom(n + k, 2 * k + 1) * qfact(k)


def test_divisibility_theorem_grid():
    for r in (9, 15):
        for d in (3, 5):
            c = gcd(d, r)
            for b in range(-2, 3):
                for k in range((r - 3) // 2 + 1):
                    if k > 4:
                        break
                    x = gauss_sum(d, r) * gauss_sum(1, r).conj() * ev(y_c(k, b, c), r)
                    y = r * ev(curly_fact_ratio(k), r)
                    assert x.is_integral()
                    assert divides(x, y), (r, d, b, k)


def test_binomial_summation_lemma_grid():
    for r in (9, 15):
        for d in (3, 5):
            c = gcd(d, r)
            r1 = r // c
            d1_star = modinv((d // c) % r1, r1)
            for k in range(min(4, (r - 3) // 2) + 1):
                lhs = CycElem.zero(r)
                for n in range(1, 2 * r, 2):
                    f = (
                        habiro_basis_elem(n, k)
                        * qint(n)
                        * q_power(Fraction(d * (n * n - 1), 4))
                    )
                    lhs = lhs + ev(f, r)
                b = (-d1_star) % r1
                # {k}!/{2k+1}! is one over the factorial quotient
                rhs = (
                    -2
                    * gauss_sum(d, r)
                    * ev(y_c(k, b, c), r)
                    * ev(curly_fact_ratio(k), r).inv()
                )
                assert lhs == rhs, (r, d, k)
