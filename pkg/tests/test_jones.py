"""Oracles and properties for the colored-basis / cyclotomic-basis bridge.

The trefoil value is checked against a test-side Temperley-Lieb skein
evaluation that shares no code with the implementation under test.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.errors import NonDivisible
from artifact.jones import (
    HabiroCoefficients,
    habiro_basis_elem,
    habiro_coeffs_from_colored,
    habiro_expand,
    q_multinomial,
    twist_knot_coeff,
    twist_knot_coeffs,
    unknot_coeffs,
)
from artifact.qring import (
    ONE,
    ZERO,
    QLaurent,
    div_exact,
    habiro_divisor,
    pochhammer,
    q_power,
    qfact,
    qint,
    qnum,
)


# ---------------------------------------------------------------------------
# independent skein-theoretic oracle (Temperley-Lieb on two strands)
# ---------------------------------------------------------------------------


def _jones_of_two_braid(power):
    """Normalized Jones polynomial of the closure of sigma_1^power in B_2,
    via the Kauffman bracket in TL_2.  Completely independent of the
    cyclotomic-basis code: elements are alpha*1 + beta*e with
    e^2 = delta*e, closure trace 1 -> delta^2, e -> delta, and the
    writhe correction (-A^3)^(-w); finally A^(-4) -> q."""
    A, Ainv = q_power(1), q_power(-1)
    delta = ZERO - (q_power(2) + q_power(-2))
    alpha, beta = ONE, ZERO
    for _ in range(power):
        alpha, beta = (
            alpha * A,
            alpha * Ainv + beta * A + beta * Ainv * delta,
        )
    # <closure> = alpha*delta^2 + beta*delta = (alpha*delta + beta)*delta,
    # so dividing by one delta (the unknot bracket) is exact
    reduced = alpha * delta + beta
    sign = 1 if power % 2 == 0 else -1
    v_in_A = q_power(-3 * power) * sign * reduced
    return v_in_A.substitute_power(Fraction(-1, 4))


def test_skein_oracle_sanity():
    # closure of a single positive crossing is the unknot
    assert _jones_of_two_braid(1) == ONE
    # the right trefoil
    assert _jones_of_two_braid(3) == q_power(1) + q_power(3) - q_power(4)


# ---------------------------------------------------------------------------
# basis elements and expansion
# ---------------------------------------------------------------------------


def test_basis_elem_bottom_row():
    for n in range(1, 7):
        assert habiro_basis_elem(n, 0) == qnum(n)


def test_basis_elem_diagonal_and_vanishing():
    for n in range(1, 6):
        assert habiro_basis_elem(n, n - 1) == qfact(n - 1)
        for k in range(n, n + 3):
            assert habiro_basis_elem(n, k) == ZERO


def test_unknot_expansion():
    table = unknot_coeffs()
    for n in range(1, 8):
        assert habiro_expand(table, (n,)) == qnum(n)


def test_expand_at_color_one_reads_off_constant_term():
    table = HabiroCoefficients(
        coeffs={(0, 0): q_power(2), (1, 0): qint(5), (2, 3): qint(7)},
        num_components=2,
    )
    assert habiro_expand(table, (1, 1)) == q_power(2)


def test_expand_rejects_bad_colors():
    with pytest.raises(ValueError):
        habiro_expand(unknot_coeffs(), (0,))
    with pytest.raises(ValueError):
        habiro_expand(unknot_coeffs(), (2, 2))


def test_expand_split_tables_multiply():
    # a product table c_{k,l} = a_k * b_l colors to J_a(n) * J_b(m)
    a = {0: ONE, 1: qint(3)}
    b = {0: q_power(-1), 2: qint(2) * qint(5)}
    table = HabiroCoefficients(
        coeffs={(k, l): av * bv for k, av in a.items() for l, bv in b.items()},
        num_components=2,
    )
    ta = HabiroCoefficients.of_knot(a)
    tb = HabiroCoefficients.of_knot(b)
    for n in (1, 2, 4):
        for m in (1, 3):
            lhs = habiro_expand(table, (n, m))
            rhs = habiro_expand(ta, (n,)) * habiro_expand(tb, (m,))
            assert lhs == rhs, (n, m)


# ---------------------------------------------------------------------------
# twist-knot coefficients
# ---------------------------------------------------------------------------


def test_twist_coeff_k0_is_one():
    for p in (-3, -2, -1, 1, 2, 3):
        assert twist_knot_coeff(p, 0) == ONE


def test_twist_coeff_rejections():
    with pytest.raises(ValueError):
        twist_knot_coeff(0, 1)
    with pytest.raises(ValueError):
        twist_knot_coeff(1, -1)


def test_trefoil_first_coefficient():
    # c_1 = -q^2 * {3}!/({1}! {1}), worked out by hand
    assert twist_knot_coeff(1, 1) == q_power(2) * (-1) * habiro_divisor(1)


def test_trefoil_color_two_matches_skein():
    table = twist_knot_coeffs(1, 2)
    got = habiro_expand(table, (2,))
    expected = qnum(2) * _jones_of_two_braid(3)
    assert got == expected
    # the explicit palindrome-free value, for the record
    assert got == (
        q_power(Fraction(1, 2))
        + q_power(Fraction(3, 2))
        + q_power(Fraction(5, 2))
        - q_power(Fraction(9, 2))
    )


def test_figure_eight_color_two():
    # J(2) of the figure eight = [2] * (q^-2 - q^-1 + 1 - q + q^2)
    table = twist_knot_coeffs(-1, 2)
    got = habiro_expand(table, (2,))
    assert got == q_power(Fraction(5, 2)) + q_power(Fraction(-5, 2))


def test_double_twist_first_coefficient_brute():
    # p=2, k=1: compositions (1,0) and (0,1) give M = q^2 + 1
    expected = (q_power(2) + ONE) * q_power(2) * (-1) * habiro_divisor(1)
    assert twist_knot_coeff(2, 1) == expected


def test_twist_divisibility_small_grid():
    for p in (-2, -1, 1, 2):
        for k in range(5):
            c = twist_knot_coeff(p, k)
            q = div_exact(c, habiro_divisor(k))
            assert all(
                not isinstance(v, Fraction) or v.denominator == 1
                for v in q.terms_dict().values()
            ), (p, k)


def test_twist_normalization_all_p():
    for p in (-3, -2, -1, 1, 2, 3):
        table = twist_knot_coeffs(p, 3)
        assert habiro_expand(table, (1,)) == ONE


def test_validate_catches_bad_table():
    bad = HabiroCoefficients.of_knot({0: ONE, 2: qint(3)})
    with pytest.raises(NonDivisible):
        bad.validate()
    fractional = HabiroCoefficients.of_knot({0: QLaurent.const(Fraction(1, 2))})
    with pytest.raises(NonDivisible):
        fractional.validate()


# ---------------------------------------------------------------------------
# recovering coefficients from colored values
# ---------------------------------------------------------------------------


def test_from_colored_unknot():
    values = [qnum(n) for n in range(1, 6)]
    table = habiro_coeffs_from_colored(values, 5)
    assert table.coeffs == {(0,): ONE}


def test_from_colored_scaled_unknot():
    c = qint(7) * q_power(-2)
    values = [c * qnum(n) for n in range(1, 5)]
    table = habiro_coeffs_from_colored(values, 4)
    assert table.coeffs == {(0,): c}


def test_from_colored_recovers_trefoil():
    source = twist_knot_coeffs(1, 3)
    values = [habiro_expand(source, (n,)) for n in range(1, 5)]
    table = habiro_coeffs_from_colored(values, 4)
    for k in range(4):
        assert table.coeff((k,)) == twist_knot_coeff(1, k), k


def test_from_colored_reports_inconsistency():
    values = [ONE, qnum(2), qnum(3) + ONE]
    with pytest.raises(NonDivisible):
        habiro_coeffs_from_colored(values, 3)


small_polys = st.builds(
    lambda terms: QLaurent(dict(terms), 1),
    st.dictionaries(
        st.integers(min_value=-4, max_value=4),
        st.integers(min_value=-9, max_value=9),
        max_size=3,
    ).map(lambda d: tuple(d.items())),
)


@settings(max_examples=40, deadline=None)
@given(st.lists(small_polys, min_size=1, max_size=4))
def test_expand_invert_round_trip(coeff_list):
    table = HabiroCoefficients.of_knot(coeff_list)
    N = len(coeff_list)
    values = [habiro_expand(table, (n,)) for n in range(1, N + 1)]
    recovered = habiro_coeffs_from_colored(values, N)
    assert recovered.coeffs == table.coeffs


# ---------------------------------------------------------------------------
# utility pieces
# ---------------------------------------------------------------------------


def test_q_multinomial_against_pochhammer_ratio():
    poch = lambda m: pochhammer(q_power(1), 1, m)
    for parts in [(2, 1), (1, 1, 1), (0, 3), (2, 2, 1)]:
        n = sum(parts)
        denom = ONE
        for p in parts:
            denom = denom * poch(p)
        assert q_multinomial(n, parts) == div_exact(poch(n), denom), parts


def test_q_multinomial_rejections():
    with pytest.raises(ValueError):
        q_multinomial(3, (2, 2))
    with pytest.raises(ValueError):
        q_multinomial(1, (2, -1))


def test_json_round_trip():
    table = twist_knot_coeffs(-2, 2)
    again = HabiroCoefficients.from_json(table.to_json())
    assert again == table
    assert again.num_components == 1
