from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from momentforge.errors import MixedFieldError, ParseError
from momentforge.exact_arith import (
    Ordering,
    QuadExt,
    format_rat,
    parse_quad,
    parse_rat,
    quad_cmp,
    quad_sign,
    rational_between,
    simplest_between,
    squarefree_decompose,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)
radicands = st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13])


@pytest.mark.parametrize("text, expected", [
    ("3/4", Fraction(3, 4)),
    ("-7", Fraction(-7)),
    (" 10 / 4 ", Fraction(5, 2)),
    (5, Fraction(5)),
])
def test_parse_rat(text, expected):
    assert parse_rat(text) == expected


@pytest.mark.parametrize("text", ["1/0", "abc", "1.5", "", None])
def test_parse_rat_rejects(text):
    with pytest.raises(ParseError):
        parse_rat(text, "radius")


def test_format_rat_omits_unit_denominator():
    assert format_rat(Fraction(6, 3)) == "2"
    assert format_rat(Fraction(-3, 8)) == "-3/8"


@pytest.mark.parametrize("n, expected", [(12, (2, 3)), (49, (7, 1)), (18, (3, 2)), (7, (1, 7)), (0, (0, 0))])
def test_squarefree_decompose(n, expected):
    assert squarefree_decompose(n) == expected


def test_sqrt_of_perfect_square_is_rational():
    assert QuadExt.sqrt_of(Fraction(9, 4)) == Fraction(3, 2)
    assert QuadExt.sqrt_of(Fraction(9, 4)).is_rational


def test_sqrt_of_normalizes_radicand():
    r = QuadExt.sqrt_of(Fraction(7, 4))
    assert (r.a, r.b, r.d) == (0, Fraction(1, 2), 7)
    assert QuadExt.sqrt_of(12) == QuadExt(0, 2, 3)


def test_mixed_fields_raise():
    with pytest.raises(MixedFieldError):
        QuadExt(0, 1, 2) + QuadExt(0, 1, 3)


def test_comparison_across_fields():
    # √2 + √3 > √10
    lhs = QuadExt(0, 1, 2)
    assert quad_cmp(QuadExt(1, 1, 2), QuadExt(0, 1, 3)) is Ordering.GT
    assert quad_cmp(lhs, QuadExt(Fraction(7, 5))) is Ordering.GT
    assert quad_cmp(QuadExt(0, 1, 2), QuadExt(0, 1, 2)) is Ordering.EQ


def test_sign_of_conjugate_pair():
    # 3 - 2√2 > 0, 2 - √5 < 0
    assert quad_sign(QuadExt(3, -2, 2)) == 1
    assert quad_sign(QuadExt(2, -1, 5)) == -1


@given(rationals, rationals, radicands)
def test_multiplication_by_inverse(a, b, d):
    q = QuadExt(a, b, d)
    if q:
        assert q * q.inverse() == 1


@given(rationals, rationals, radicands, rationals, rationals, radicands)
@settings(max_examples=300)
def test_ordering_agrees_with_high_precision(a1, b1, d1, a2, b2, d2):
    q1, q2 = QuadExt(a1, b1, d1), QuadExt(a2, b2, d2)
    exact = quad_cmp(q1, q2)
    with mpmath.workdps(80):
        diff = q1.to_mpf(80) - q2.to_mpf(80)
    if abs(diff) > mpmath.mpf(10) ** -60:
        assert exact is (Ordering.GT if diff > 0 else Ordering.LT)


@given(rationals, rationals, radicands)
def test_ordering_is_antisymmetric(a, b, d):
    q = QuadExt(a, b, d)
    r = QuadExt(b, a, 3 if d != 3 else 5)
    assert int(quad_cmp(q, r)) == -int(quad_cmp(r, q))


def test_randomized_comparisons_against_mpmath():
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(10_000):
        a1, b1, a2, b2 = (Fraction(int(rng.integers(-200, 201)), int(rng.integers(1, 40))) for _ in range(4))
        d1, d2 = (int(x) for x in rng.choice([2, 3, 5, 7, 11], size=2))
        q1, q2 = QuadExt(a1, b1, d1), QuadExt(a2, b2, d2)
        diff = q1.to_mpf(60) - q2.to_mpf(60)
        expected = Ordering.EQ if diff == 0 else (Ordering.GT if diff > 0 else Ordering.LT)
        if quad_cmp(q1, q2) is not expected:
            mismatches += 1
    assert mismatches == 0


def test_rational_between_separates_close_values():
    lo = QuadExt(0, 1, 2)
    hi = QuadExt(Fraction(1415, 1000))
    t = rational_between(lo, hi)
    assert quad_cmp(lo, t) is Ordering.LT
    assert quad_cmp(t, hi) is Ordering.LT


def test_rational_between_requires_order():
    with pytest.raises(ValueError):
        rational_between(QuadExt(1), QuadExt(1))


def test_simplest_between_prefers_small_denominators():
    assert simplest_between(Fraction(1, 3), Fraction(2, 3)) == Fraction(1, 2)
    assert simplest_between(Fraction(-1, 2), Fraction(3, 2)) == 0


@pytest.mark.parametrize("text", ["5/4 + 1/4*sqrt(7)", "-1/2 - 3*sqrt(2)", "3/7"])
def test_parse_quad_inverts_str(text):
    q = parse_quad(text)
    assert parse_quad(str(q)) == q


def test_to_decimal():
    assert QuadExt(0, 1, 2).to_decimal(6) == "1.41421"
