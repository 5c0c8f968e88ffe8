from fractions import Fraction

import pytest

from momentforge.arrangement import INTERIOR, OUTSIDE, Circle, on_circles, region_from_seed
from momentforge.errors import DimensionError, OutsideError, PreconditionError, SeedOutsideError
from momentforge.exact_arith import QuadExt
from momentforge.fixtures import load_fixture
from momentforge.moment_map import (
    FiberClass,
    GeneralRegion,
    MomentData,
    emit_manifest,
    emit_system,
    factored_text,
    fiber_class_at,
    fiber_dim_bound,
    locate,
    manifold_is_connected,
    morse_type,
    singular_fibers,
    strata_table,
    validate_moment_data,
)
from momentforge.polynomials import parse_poly, poly_eval, poly_to_text


def test_disk_system(disk):
    system = emit_system(disk)
    assert [poly_to_text(p) for p in system] == ["1 - 1*x1^2 - 1*x2^2 - 1*y_1_1^2 - 1*y_1_2^2"]
    assert disk.variables() == ["x1", "x2", "y_1_1", "y_1_2"]


def test_annulus_system_is_fully_expanded(annulus):
    (p,) = emit_system(annulus)
    assert poly_to_text(p) == ("-4 + 5*x1^2 + 5*x2^2 - 1*y_1_1^2 - 1*y_1_2^2"
                               " - 1*x1^4 - 2*x1^2*x2^2 - 1*x2^4")
    assert factored_text(annulus, 1) == ("(4 - 1*x1^2 - 1*x2^2)*(-1 + 1*x1^2 + 1*x2^2)"
                                         " - 1*y_1_1^2 - 1*y_1_2^2")


def test_annulus_manifest(annulus):
    manifest = emit_manifest(annulus)
    assert (manifest["n"], manifest["l1"], manifest["l2"], manifest["m"]) == (2, 2, 1, 3)
    assert manifest["ambient_dim"] == 4
    assert manifest["connected"] is True
    assert manifest["morse_type"] == "morse"


def test_lens_is_morse_bott(lens):
    manifest = emit_manifest(lens)
    assert manifest["l2"] == 2
    assert manifest["m"] == 2 + 1 + 2
    assert manifest["morse_type"] == "morse_bott"
    assert len(manifest["variables"]) == manifest["ambient_dim"] == 7


def test_system_vanishes_on_a_fiber_point(annulus):
    # (3/2, 0) 处 f1*f2 = (7/4)*(5/4) = 35/16，取 y = (1/2, √31/4)
    system = emit_system(annulus)
    point = [QuadExt(Fraction(3, 2)), QuadExt(0), QuadExt(Fraction(1, 2)), QuadExt(0, Fraction(1, 4), 31)]
    assert all(poly_eval(p, point) == 0 for p in system)


def test_lens_strata(lens):
    rows = {(r["stratum"], r["circles"]): r["dims"] for r in strata_table(lens)}
    assert rows[("interior", "")] == [1, 2]
    assert rows[("arc", "1")] == [2]
    assert rows[("arc", "2")] == [1]
    assert rows[("crossing", "1,2")] == []


def test_fiber_class_at(annulus):
    assert fiber_class_at(annulus, (Fraction(3, 2), 0)) == FiberClass((1,))
    assert fiber_class_at(annulus, (2, 0)).is_point
    with pytest.raises(OutsideError):
        fiber_class_at(annulus, (0, 0))


def test_locate_matches_region(annulus):
    assert locate(annulus, (Fraction(3, 2), 0)) == INTERIOR
    assert locate(annulus, (0, 1)) == on_circles([2])
    assert locate(annulus, (5, 5)) == OUTSIDE


def test_fiber_dim_bound(lens):
    assert fiber_dim_bound(lens) == lens.m - lens.n == 3


def test_singular_fibers_cover_poles_and_crossings(lens):
    kinds = sorted(s["kind"] for s in singular_fibers(lens))
    assert kinds == ["crossing", "crossing", "pole", "pole"]


def test_group_map_must_be_surjective():
    region = region_from_seed([Circle(1, (0, 0), 1, "inside")], (0, 0))
    d = MomentData(region, (1,), (1, 2))
    report = validate_moment_data(d)
    assert report.has("not_surjective")


def test_crossing_circles_in_one_group_are_rejected():
    region = region_from_seed([Circle(1, (0, 0), 2, "inside"), Circle(2, (2, 1), 2, "inside")], (1, Fraction(1, 2)))
    report = validate_moment_data(MomentData(region, (1, 1), (1,)))
    assert report.has("injectivity")


def test_group_outside_range():
    region = region_from_seed([Circle(1, (0, 0), 1, "inside")], (0, 0))
    with pytest.raises(PreconditionError):
        MomentData(region, (2,), (1,))


def test_negative_dimension():
    region = region_from_seed([Circle(1, (0, 0), 1, "inside")], (0, 0))
    with pytest.raises(DimensionError):
        MomentData(region, (1,), (-1,))


def test_general_region_system():
    ball = parse_poly("1 - x1^2 - x2^2 - x3^2", ("x1", "x2", "x3"))
    d = MomentData(GeneralRegion((ball,), (0, 0, 0)), (1,), (0,))
    assert d.n == 3 and d.m == 3
    assert d.variables() == ["x1", "x2", "x3", "y_1_1"]
    assert poly_to_text(emit_system(d)[0]) == "1 - 1*x1^2 - 1*x2^2 - 1*x3^2 - 1*y_1_1^2"
    assert validate_moment_data(d).flags["hypotheses_unverified"] is True
    assert locate(d, (1, 0, 0)) == on_circles([1])


def test_general_region_seed_must_be_positive():
    ball = parse_poly("1 - x1^2 - x2^2", ("x1", "x2"))
    with pytest.raises(SeedOutsideError):
        GeneralRegion((ball,), (1, 1))


def test_connectedness_and_morse_type(annulus, lens):
    assert manifold_is_connected(annulus)
    assert not manifold_is_connected(load_fixture("annulus_zero_dim"))
    assert morse_type(annulus) == "morse"
    assert morse_type(lens) == "morse_bott"
    assert emit_manifest(load_fixture("annulus_zero_dim"))["connected"] is False
