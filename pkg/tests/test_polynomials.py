from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from momentforge.arrangement import Circle
from momentforge.errors import ParseError
from momentforge.exact_arith import QuadExt
from momentforge.polynomials import (
    Poly,
    circle_poly,
    parse_poly,
    poly_eval,
    poly_evalf,
    poly_from_json,
    poly_grad,
    poly_to_json,
    poly_to_text,
    x_names,
)

XY = ("x1", "x2")
small = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def test_circle_poly_orientation():
    inside = circle_poly(Circle(1, (0, 0), 1, "inside"))
    outside = circle_poly(Circle(2, (0, 0), 1, "outside"))
    assert poly_to_text(inside) == "1 - 1*x1^2 - 1*x2^2"
    assert inside == -outside


def test_canonical_text_orders_by_degree():
    p = parse_poly("x2^2 + 3 - 2*x1 + x1^2", XY)
    assert poly_to_text(p) == "3 - 2*x1 + 1*x1^2 + 1*x2^2"


def test_parse_rejects_undeclared_variable():
    with pytest.raises(ParseError) as exc:
        parse_poly("x1 + z", XY, field="region.polynomials[0]")
    assert exc.value.field == "region.polynomials[0]"


def test_parse_rejects_irrational_coefficient():
    with pytest.raises(ParseError):
        parse_poly("sqrt(2)*x1", XY)


def test_exact_eval_in_quadratic_field():
    p = parse_poly("x1^2 + x2^2 - 2", XY)
    point = (QuadExt(0, 1, 2), QuadExt(0))
    assert poly_eval(p, point) == 0


def test_gradient():
    p = parse_poly("x1^2*x2 - 3*x2", XY)
    gx, gy = poly_grad(p)
    assert poly_to_text(gx) == "2*x1*x2"
    assert poly_to_text(gy) == "-3 + 1*x1^2"


def test_vectorized_float_eval():
    p = parse_poly("1 - x1^2 - x2^2", XY)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]])
    np.testing.assert_allclose(poly_evalf(p, pts), [1.0, 0.0, 0.5])


@given(small, small, small, small)
def test_evaluation_is_a_ring_homomorphism(a, b, x, y):
    p = parse_poly("x1^2 - 3*x2 + 1", XY)
    q = Poly.constant(XY, a) + Poly.variable(XY, "x1") * b
    point = (x, y)
    assert poly_eval(p * q, point) == poly_eval(p, point) * poly_eval(q, point)
    assert poly_eval(p + q, point) == poly_eval(p, point) + poly_eval(q, point)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), small), max_size=6))
def test_text_parse_identity(terms):
    p = Poly(XY)
    for e1, e2, c in terms:
        p.add_term((e1, e2), c)
    assert parse_poly(poly_to_text(p), XY) == p


def test_json_form():
    p = parse_poly("1/2 - x1*x2", XY)
    assert poly_from_json(poly_to_json(p)) == p


def test_extend_to_more_variables():
    p = parse_poly("1 - x1^2", XY)
    names = x_names(2) + ["y_1_1"]
    q = p.extend(names)
    assert poly_eval(q, (Fraction(1, 2), 0, 7)) == Fraction(3, 4)


@given(st.tuples(small, small))
def test_gradient_matches_central_differences(point):
    p = parse_poly("x1^3*x2 - 2*x1*x2^2 + 5*x2 - 1/3", XY)
    grads = poly_grad(p)
    x = np.array([float(c) for c in point])
    h = 1e-6
    for k, g in enumerate(grads):
        step = np.zeros(2)
        step[k] = h
        numeric = (poly_evalf(p, x + step) - poly_evalf(p, x - step)) / (2 * h)
        exact = float(poly_eval(g, point))
        assert numeric == pytest.approx(exact, rel=1e-6, abs=1e-5)
