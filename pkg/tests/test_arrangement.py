from fractions import Fraction

import numpy as np
import pytest

from momentforge.arrangement import (
    INTERIOR,
    OUTSIDE,
    Circle,
    circle_intersections,
    locate_point,
    on_circles,
    region_from_seed,
    validate_arrangement,
    vertical_poles,
)
from momentforge.errors import (
    PreconditionError,
    SeedOutsideError,
    TangencyError,
    UnboundedRegionError,
)
from momentforge.exact_arith import QuadExt
from momentforge.fixtures import random_arrangement

BIG = Circle(1, (0, 0), 2, "inside")
HOLE = Circle(2, (0, 0), 1, "outside")


def test_crossing_in_quadratic_field():
    c1 = Circle(1, (0, 0), 2, "inside")
    c2 = Circle(2, (2, 1), 2, "inside")
    points = circle_intersections(c1, c2)
    assert [p.x for p in points] == [QuadExt(1, Fraction(-1, 10), 55),
                                     QuadExt(1, Fraction(1, 10), 55)]
    for p in points:
        assert c1.raw(p.x, p.y) == 0
        assert c2.raw(p.x, p.y) == 0


def test_crossings_at_equal_height_share_x():
    points = circle_intersections(Circle(1, (0, 0), 2), Circle(2, (2, 0), 1))
    assert {p.x for p in points} == {QuadExt(Fraction(7, 4))}


@pytest.mark.parametrize("c2", [Circle(2, (3, 0), 1), Circle(2, (1, 0), 1)])
def test_tangent_circles_raise(c2):
    with pytest.raises(TangencyError):
        circle_intersections(Circle(1, (0, 0), 2), c2)


def test_disjoint_and_nested_circles_do_not_cross():
    assert circle_intersections(Circle(1, (0, 0), 1), Circle(2, (5, 0), 1)) == []
    assert circle_intersections(BIG, HOLE) == []


def test_vertical_poles():
    left, right = vertical_poles(Circle(3, (1, Fraction(1, 2)), Fraction(3, 2)))
    assert left.point == (Fraction(-1, 2), Fraction(1, 2))
    assert right.point == (Fraction(5, 2), Fraction(1, 2))


def test_annulus_region():
    region = region_from_seed([BIG, HOLE], (Fraction(3, 2), 0))
    assert region.hole_count == 1
    assert sorted(float(p.point[0]) for p in region.boundary_poles) == [-2.0, -1.0, 1.0, 2.0]
    assert validate_arrangement(region).passed


def test_disk_region_has_no_holes():
    region = region_from_seed([Circle(1, (0, 0), 1, "inside")], (0, 0))
    assert region.hole_count == 0
    assert len(region.boundary_poles) == 2


def test_seed_outside_raises():
    with pytest.raises(SeedOutsideError):
        region_from_seed([BIG, HOLE], (0, 0))


def test_unbounded_component_raises():
    with pytest.raises(UnboundedRegionError):
        region_from_seed([Circle(1, (0, 0), 1, "outside")], (5, 0))


def test_ids_must_be_consecutive():
    with pytest.raises(PreconditionError):
        region_from_seed([Circle(1, (0, 0), 2, "inside"), Circle(3, (0, 0), 1)], (Fraction(3, 2), 0))


@pytest.mark.parametrize("point, expected", [
    ((Fraction(3, 2), 0), INTERIOR),
    ((2, 0), on_circles([1])),
    ((0, -1), on_circles([2])),
    ((0, 0), OUTSIDE),
    ((3, 0), OUTSIDE),
])
def test_locate_point_annulus(point, expected):
    region = region_from_seed([BIG, HOLE], (Fraction(3, 2), 0))
    assert locate_point(region, point) == expected


def test_locate_point_at_crossing():
    c1 = Circle(1, (0, 0), 2, "inside")
    c2 = Circle(2, (2, 1), 2, "inside")
    region = region_from_seed([c1, c2], (1, Fraction(1, 2)))
    cp = region.boundary_crossings[0]
    assert locate_point(region, cp.point) == on_circles([1, 2])


def test_genericity_regression_shared_crossing_x():
    region = region_from_seed([Circle(1, (0, 0), 2, "inside"), Circle(2, (2, 0), 1, "outside")], (-1, 0))
    report = validate_arrangement(region)
    assert report.has("genericity")
    assert "7/4" in str(report)


def test_pole_on_other_circle():
    # 圆 2 经过圆 1 的右极点 (2, 0)
    region = region_from_seed([Circle(1, (0, 0), 2, "inside"), Circle(2, (2, 1), 1, "outside")], (-1, 0))
    assert validate_arrangement(region).has("pole_on_circle")


def test_triple_point_example_also_reports_tangency():
    circles = [
        Circle(1, (0, 0), 1, "outside"),
        Circle(2, (2, 0), 1, "outside"),
        Circle(3, (1, 0), 2, "inside"),
        Circle(4, (1, 1), 1, "outside"),
    ]
    region = region_from_seed(circles, (1, Fraction(-3, 2)))
    report = validate_arrangement(region)
    assert region.degenerate
    assert report.has("tangency")
    assert report.has("triple_point")


def test_circle_missing_the_boundary():
    circles = [BIG, Circle(2, (5, 5), 1, "outside")]
    region = region_from_seed(circles, (0, 0))
    assert validate_arrangement(region).has("boundary_miss")


def test_region_to_dict_is_canonical():
    region = region_from_seed([BIG, HOLE], (Fraction(3, 2), 0))
    doc = region.to_dict()
    assert doc["seed"] == ["3/2", "0"]
    assert doc["hole_count"] == 1
    assert doc["circles"][1] == {"id": 2, "center": ["0", "0"], "radius": "1", "orientation": "outside"}


def test_closure_flags_agree_with_float_signs():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(30):
        d = random_arrangement(rng)
        if d is None or d.region.component_count != 1:
            continue
        region = d.region
        for cp in region.crossings:
            others = [c for c in region.circles if c.id not in cp.circles]
            expected = all(c.valuef(float(cp.x), float(cp.y)) >= -1e-12 for c in others)
            assert cp.in_closure == expected
        for pole in region.poles:
            others = [c for c in region.circles if c.id != pole.circle]
            expected = all(c.valuef(float(pole.x), float(pole.y)) >= -1e-12 for c in others)
            assert pole.in_closure == expected
        checked += 1
    assert checked > 0
