"""Oracles for the state-sum evaluator: unknot closed forms, lens spaces
both ways, signature counting, and structural sanity of realizations."""

import math
from fractions import Fraction

import pytest

from artifact.cyclotomic import CycElem, ev, gauss_sum
from artifact.errors import NonCoprime, ValidationError
from artifact.jones import HabiroCoefficients, twist_knot_coeff, unknot_coeffs
from artifact.numtheory import floor_continued_fraction, neg_continued_fraction
from artifact.qring import ONE, pochhammer, q_power, qint
from artifact.wrt import (
    AlgSplit,
    ConnectedSum,
    Lens,
    Seifert,
    TwistSurgery,
    f_link,
    f_unknot,
    signature_counts,
    tau,
    tau_lens_chain,
    tau_lens_closed,
    _linking_matrix,
    _realize,
)

ORDERS = (3, 5, 7, 9)


def _det(matrix):
    mat = [[Fraction(x) for x in row] for row in matrix]
    n = len(mat)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if mat[i][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        for i in range(col + 1, n):
            f = mat[i][col] / mat[col][col]
            for j in range(col, n):
                mat[i][j] -= f * mat[col][j]
    return det


# ---------------------------------------------------------------------------
# signature counting
# ---------------------------------------------------------------------------


def test_signature_single_entries():
    assert signature_counts([[1]]) == (1, 0)
    assert signature_counts([[-7]]) == (0, 1)
    assert signature_counts([[0]]) == (0, 0)


def test_signature_hyperbolic_block():
    assert signature_counts([[0, 1], [1, 0]]) == (1, 1)
    assert signature_counts([[0, 0, 3], [0, 5, 0], [3, 0, 0]]) == (2, 1)


def test_signature_chain_example():
    assert signature_counts([[2, 1], [1, -1]]) == (1, 1)


def test_signature_rejects_bad_input():
    with pytest.raises(ValueError):
        signature_counts([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        signature_counts([[1, 2, 3], [2, 1, 1]])


def test_signature_matches_sylvester_on_diagonals():
    assert signature_counts([[3, 0], [0, -2]]) == (1, 1)
    assert signature_counts([[1, 1], [1, 1]]) == (1, 0)  # rank one


# ---------------------------------------------------------------------------
# unknot state sums against closed forms
# ---------------------------------------------------------------------------


def test_f_unknot_positive_framing_closed_form():
    for r in ORDERS:
        got = f_unknot(1, r)
        expected = (
            gauss_sum(1, r)
            * ev(q_power(Fraction(-1, 2)), r)
            * ev(qint(1), r).inv()
            * (-2)
        )
        assert got == expected, r


def test_f_unknot_negative_framing_closed_form():
    for r in ORDERS:
        got = f_unknot(-1, r)
        expected = (
            gauss_sum(-1, r)
            * ev(q_power(Fraction(1, 2)), r)
            * ev(qint(1), r).inv()
            * 2
        )
        assert got == expected, r


def test_f_unknot_zero_framing_closed_form():
    for r in ORDERS:
        got = f_unknot(0, r)
        expected = (
            ev(q_power(Fraction(1, 2)) * pochhammer(q_power(2), 1, r - 2), r)
            * ev(qint(1), r).inv()
            * 2
        )
        assert got == expected, r


def test_f_unknot_dual_route():
    # same sum written directly in field arithmetic, no power vectors
    for r in (3, 5, 7):
        for f in (-2, 0, 3):
            total = CycElem.zero(r)
            for n in range(1, 2 * r, 2):
                br = CycElem.zero(r)
                for v in range(-((n - 1) // 2), (n - 1) // 2 + 1):
                    br = br + CycElem.root_power(r, v % r)
                total = total + br * br * CycElem.root_power(
                    r, (f * ((n * n - 1) // 4)) % r
                )
            assert f_unknot(f, r) == total, (f, r)


def test_f_link_of_plus_one_unknot():
    for r in ORDERS:
        assert f_link(Lens(1, 1), r) == f_unknot(1, r)


# ---------------------------------------------------------------------------
# lens spaces
# ---------------------------------------------------------------------------


def test_tau_sphere_is_one():
    for r in ORDERS:
        assert tau(Lens(1, 1), r) == CycElem.one(r)


def test_tau_lens_2_1_at_3():
    assert tau(Lens(2, 1), 3) == CycElem.one(3)


def test_tau_lens_closed_basics():
    for r in ORDERS:
        assert tau_lens_closed(1, 1, r) == CycElem.one(r)
    assert tau_lens_closed(2, 1, 3) == CycElem.one(3)


def test_tau_lens_closed_rejections():
    with pytest.raises(NonCoprime):
        tau_lens_closed(3, 1, 9)
    with pytest.raises(ValueError):
        tau_lens_closed(4, 2, 5)


def test_lens_chain_vs_closed_form_grid():
    checked = 0
    for a in range(1, 6):
        for b in range(1, max(a, 2)):
            if math.gcd(a, b) != 1:
                continue
            for r in (3, 5, 7, 9):
                if math.gcd(a, r) != 1 or math.gcd(b, r) != 1:
                    continue
                assert tau(Lens(a, b), r) == tau_lens_closed(a, b, r), (a, b, r)
                checked += 1
    assert checked > 20


def test_tau_lens_closed_cross_oracle_5_1_3():
    assert tau_lens_closed(5, 1, 3) == tau(Lens(5, 1), 3)


def test_lens_chain_independence():
    for a, b in ((3, 2), (5, 3)):
        slope = Fraction(a, b)
        canonical = neg_continued_fraction(slope)
        variant = floor_continued_fraction(slope)
        assert canonical != variant
        for r in (5, 7):
            got1 = tau_lens_chain(a, b, r, canonical)
            got2 = tau_lens_chain(a, b, r, variant)
            assert got1 == got2, (a, b, r)
            assert got1 == tau(Lens(a, b), r), (a, b, r)


def test_tau_lens_chain_validates_path():
    with pytest.raises(ValidationError):
        tau_lens_chain(3, 2, 5, [7])


def test_lens_integrality_at_shared_order():
    # order sharing a factor with the homology: the hard integrality case
    value = tau(Lens(3, 1), 9)
    assert value.is_integral()


# ---------------------------------------------------------------------------
# realizations: homology orders and linking determinants
# ---------------------------------------------------------------------------


def test_h1_orders():
    assert Lens(5, 2).h1_order() == 5
    assert Lens(0, 1).h1_order() == 0
    assert Seifert(-1, ((2, 1), (3, 1), (5, 1))).h1_order() == 1
    assert Seifert(-2, ((3, 1), (4, 3))).h1_order() == abs(-2 * 12 + 4 + 9)
    assert TwistSurgery(1, Fraction(5)).h1_order() == 5
    assert ConnectedSum((Lens(3, 1), Lens(4, 1))).h1_order() == 12


def test_validation_rejections():
    with pytest.raises(ValidationError):
        Lens(4, 2)
    with pytest.raises(ValidationError):
        Lens(3, 0)
    with pytest.raises(ValidationError):
        Seifert(0, ((4, 2),))
    with pytest.raises(ValidationError):
        Seifert(0, ((2, 3),))
    with pytest.raises(ValidationError):
        TwistSurgery(0, Fraction(1))
    with pytest.raises(ValidationError):
        AlgSplit((Fraction(1), Fraction(2)), unknot_coeffs())


def test_linking_determinant_matches_homology():
    for M in (
        Lens(3, 2),
        Lens(7, 4),
        Lens(5, 1),
        Seifert(-1, ((2, 1), (3, 1), (5, 1))),
        Seifert(-1, ((2, 1), (3, 2), (7, 5))),
        TwistSurgery(-1, Fraction(3, 2)),
    ):
        _, strands = _realize(M)
        det = _det(_linking_matrix(strands))
        assert abs(det) == M.h1_order(), M


def test_seifert_trivial_fibration_is_sphere():
    for r in (5, 7):
        assert tau(Seifert(-1, ((2, 1),)), r) == CycElem.one(r)


# ---------------------------------------------------------------------------
# connected sums and split links
# ---------------------------------------------------------------------------


def test_connected_sum_multiplies():
    M = Lens(3, 1)
    total = tau(ConnectedSum((M, M)), 5)
    single = tau(M, 5)
    assert total == single * single


def test_split_table_equals_connected_sum():
    # a genuinely two-component state sum over a product table must agree
    # with the product of the one-component invariants
    table1 = {0: ONE}
    table2 = {k: twist_knot_coeff(1, k) for k in range(9)}
    product = HabiroCoefficients(
        coeffs={
            (k1, k2): v1 * v2
            for k1, v1 in table1.items()
            for k2, v2 in table2.items()
        },
        num_components=2,
    )
    split = AlgSplit((Fraction(2), Fraction(3)), product)
    merged = ConnectedSum(
        (
            AlgSplit((Fraction(2),), HabiroCoefficients.of_knot(table1)),
            AlgSplit((Fraction(3),), HabiroCoefficients.of_knot(table2)),
        )
    )
    r = 5
    assert tau(split, r) == tau(merged, r)


def test_twist_surgery_matches_algsplit_route():
    r = 5
    p = 1
    table = HabiroCoefficients.of_knot(
        {k: twist_knot_coeff(p, k) for k in range(2 * r - 1)}
    )
    via_table = tau(AlgSplit((Fraction(5),), table), r)
    direct = tau(TwistSurgery(p, Fraction(5)), r)
    assert via_table == direct


def test_twist_surgery_integrality_smoke():
    value = tau(TwistSurgery(1, Fraction(5)), 15)  # gcd(15, 5) > 1
    assert value.is_integral()


# ---------------------------------------------------------------------------
# small Seifert homology spheres
# ---------------------------------------------------------------------------


def test_poincare_like_spheres_distinct():
    small = Seifert(-1, ((2, 1), (3, 1), (5, 1)))
    other = Seifert(-1, ((2, 1), (3, 1), (7, 1)))
    assert small.h1_order() == 1
    assert other.h1_order() == 1
    assert tau(small, 7) != tau(other, 7)


def test_order_validation():
    with pytest.raises(ValueError):
        tau(Lens(1, 1), 4)
    with pytest.raises(ValueError):
        f_link(Lens(1, 1), 1)
