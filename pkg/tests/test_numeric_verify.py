from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest

from momentforge.arrangement import Circle, region_from_seed
from momentforge.constructions import attach_pendant_circles, construct_gp
from momentforge.errors import NotInteriorError, ToleranceError
from momentforge.fixtures import VALID_PLANAR, load_fixture, random_arrangement
from momentforge.graph_ops import is_isomorphic, path_graph
from momentforge.moment_map import MomentData, emit_system, strata_table
from momentforge.numeric_verify import (
    Tolerances,
    _rank_gap,
    boundary_points,
    fiber_point,
    hole_count_oracle,
    image_check,
    localize_singular_x,
    morse_bott_spot_check,
    oracle_agrees,
    random_interior_points,
    rank_check,
    reeb_oracle,
    sample_fiber,
    system_jacobian,
    tangent_check,
    verify,
)
from momentforge.reeb_sweep import reeb_graph


def _fiber_points(d, count, seed=7):
    interior = random_interior_points(d, count // 2, seed)
    points = [fiber_point(d, p, idx, seed) for idx, p in enumerate(interior)]
    boundary = boundary_points(d, count - len(points))
    points += [fiber_point(d, p, 1000 + idx, seed) for idx, (p, _) in enumerate(boundary)]
    return points


@pytest.fixture(scope="module")
def rank_suite():
    data = {name: load_fixture(name) for name in VALID_PLANAR}
    data["gp_2_1_1"] = construct_gp(2, 1, 1)[0]
    return data


def test_sample_fiber_radius():
    d = load_fixture("annulus")
    points = sample_fiber(d, (Fraction(3, 2), 0), 5, 7)
    assert points.shape == (5, 4)
    np.testing.assert_allclose((points[:, 2:] ** 2).sum(axis=1), 35 / 16, rtol=1e-12)
    np.testing.assert_allclose(points[:, :2], [[1.5, 0.0]] * 5)


def test_sample_fiber_is_deterministic(disk):
    a = sample_fiber(disk, (0, 0), 4, 7)
    b = sample_fiber(disk, (0, 0), 4, 7)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose((a[:, 2:] ** 2).sum(axis=1), 1.0)


@pytest.mark.parametrize("p", [(0, 0), (2, 0), (3, 3)])
def test_sample_fiber_needs_interior(annulus, p):
    with pytest.raises(NotInteriorError):
        sample_fiber(annulus, p, 1, 7)


def test_rank_suite(rank_suite):
    for name, d in rank_suite.items():
        report = rank_check(d, _fiber_points(d, 100))
        assert report.samples >= 90, name
        assert report.passed, (name, report.failures[:2])
        assert report.min_rank_gap > 1e3


def test_rank_two_over_a_crossing(lens):
    for cp in lens.region.boundary_crossings:
        q = fiber_point(lens, (cp.x, cp.y), 0, 7)
        assert np.linalg.matrix_rank(system_jacobian(lens, q)) == 2
        assert rank_check(lens, [q]).passed


def test_rank_drop_at_tangency():
    d = load_fixture("tangent", validate=False)
    report = rank_check(d, [np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])])
    assert not report.passed
    assert report.failures[0]["rank_gap"] <= 1e3


@pytest.mark.parametrize("name", VALID_PLANAR)
def test_image_check(name):
    report = image_check(load_fixture(name), grid=200)
    assert report.passed, report.failures[:3]
    assert report.extra["interior"] > 0


def test_image_check_sees_the_hole(annulus):
    report = image_check(annulus, grid=41)
    assert report.passed
    assert report.extra["outside"] > 0


def test_tangent_at_pole(annulus):
    diag = tangent_check(annulus, np.array([2.0, 0.0, 0.0, 0.0]), stratum=[1])
    assert diag["pushforward_dim"] == diag["expected_dim"] == 1
    assert diag["max_angle"] < 1e-5


def test_tangent_at_crossing_is_zero_dimensional(lens):
    cp = lens.region.boundary_crossings[0]
    q = fiber_point(lens, (cp.x, cp.y), 0, 7)
    diag = tangent_check(lens, q, stratum=[1, 2])
    assert diag["pushforward_dim"] == 0


def test_tangent_at_interior_point(disk):
    q = fiber_point(disk, (0, 0), 0, 7)
    diag = tangent_check(disk, q)
    assert diag["pushforward_dim"] == 2
    assert diag["singular"] is False


def test_tangent_wrong_stratum_raises(disk):
    q = fiber_point(disk, (Fraction(1, 2), 0), 0, 7)
    with pytest.raises(ToleranceError) as exc:
        tangent_check(disk, q, stratum=[1])
    assert exc.value.diagnostics["pushforward_dim"] == 2
    assert exc.value.diagnostics["expected_dim"] == 1


def test_tangent_vanishing_normal_raises(disk):
    q = fiber_point(disk, (0, 0), 0, 7)
    with pytest.raises(ToleranceError) as exc:
        tangent_check(disk, q, stratum=[1])
    assert exc.value.diagnostics["normal_singular_values"] == [0.0]


@pytest.mark.parametrize("name", VALID_PLANAR)
def test_tangent_suite(name):
    d = load_fixture(name)
    points = boundary_points(d, 20)
    assert len(points) == 20
    for idx, (p, circles) in enumerate(points):
        q = fiber_point(d, p, idx, 7)
        diag = tangent_check(d, q, stratum=circles)
        assert diag["pushforward_dim"] == d.n - len(circles)
        assert diag["max_angle"] < 1e-5


def test_oracle_small_cases(disk, annulus):
    assert is_isomorphic(reeb_oracle(disk), path_graph(2))
    g = reeb_oracle(annulus)
    assert (g.n_vertices, g.n_edges) == (4, 4)


@pytest.mark.parametrize("name", VALID_PLANAR)
def test_oracle_matches_sweep_on_fixtures(name):
    d = load_fixture(name)
    assert oracle_agrees(d, reeb_graph(d).to_multigraph())


def test_oracle_matches_decorated_annulus(annulus):
    d, _ = attach_pendant_circles(annulus, {0: 1}, total_dim=4)
    g = reeb_oracle(d)
    assert (g.n_vertices, g.n_edges) == (7, 7)
    assert oracle_agrees(d, reeb_graph(d).to_multigraph())


def test_oracle_matches_sweep_on_random_arrangements():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 100:
        d = random_arrangement(rng)
        if d is None:
            continue
        exact = reeb_graph(d)
        assert oracle_agrees(d, exact.to_multigraph()), [c.to_dict() for c in d.region.circles]
        assert exact.betti1 == d.region.hole_count
        checked += 1


@pytest.mark.parametrize("name", VALID_PLANAR)
def test_hole_count_oracle(name):
    d = load_fixture(name)
    assert hole_count_oracle(d.region, grid=200) == d.region.hole_count


@pytest.mark.parametrize("name", ["disk", "annulus", "lens"])
def test_singular_x_localisation(name):
    report = localize_singular_x(load_fixture(name))
    assert report.passed, report.failures
    assert report.extra["max_deviation"] <= 1e-6


def test_morse_bott_spot_check(lens):
    report = morse_bott_spot_check(lens, count=5)
    assert report.samples == 4
    assert report.passed, report.extra["sites"]


def test_zero_dimension_group_still_verifies():
    d = load_fixture("annulus_zero_dim")
    assert len(emit_system(d)) == 1
    assert strata_table(d)[0]["dims"] == [0]
    result = verify(d, Tolerances(samples=20, grid=60))
    assert "reeb_oracle" not in result["checks"]
    assert result["checks"]["rank"]["passed"]


def test_verify_disk():
    result = verify(load_fixture("disk"), Tolerances(samples=100, seed=7))
    assert result["passed"], {k: v["failures"][:2] for k, v in result["checks"].items()}
    assert set(result["checks"]) == {"rank", "image", "tangent", "hole_count", "reeb_oracle",
                                     "singular_x", "morse_bott"}


def test_verify_general_region_runs_sampled_checks_only():
    result = verify(load_fixture("tangent", validate=False), Tolerances(samples=20, grid=60))
    assert set(result["checks"]) == {"rank", "image"}
    assert result["checks"]["image"]["hypotheses_unverified"] is True


def test_tolerances_from_mapping_and_override():
    tol = Tolerances.from_mapping({"grid": "60", "tol_rank": 100, "colour": "red"})
    assert tol.grid == 60 and tol.tol_rank == 100.0
    assert tol.override(grid=None, samples=5).samples == 5
    assert tol.override(grid=None).grid == 60


@pytest.mark.parametrize("resolution", [6, 24])
def test_oracle_follows_thin_slabs_near_a_crossing(resolution):
    circles = [
        Circle(1, (0, 0), 8, "inside"),
        Circle(2, (Fraction(17, 4), 1), Fraction(7, 8), "outside"),
        Circle(3, (Fraction(-5, 8), Fraction(-1, 8)), Fraction(9, 8), "outside"),
        Circle(4, (Fraction(-15, 4), Fraction(7, 2)), 1, "outside"),
        Circle(5, (-5, Fraction(23, 8)), Fraction(1, 2), "outside"),
    ]
    d = MomentData(region_from_seed(circles, (Fraction(15, 2), 0)), (1, 2, 3, 4, 5), (1,) * 5)
    assert oracle_agrees(d, reeb_graph(d).to_multigraph(), resolution)


def test_singular_x_includes_crossing_corners(lens):
    report = localize_singular_x(lens)
    root = 55 ** 0.5 / 10
    np.testing.assert_allclose(report.extra["detected"], [0.0, 1 - root, 1 + root, 2.0], atol=1e-6)


def test_verify_lens():
    result = verify(load_fixture("lens"), Tolerances(samples=60, seed=7))
    assert result["checks"]["singular_x"]["passed"]
    assert result["passed"], {k: v["failures"][:2] for k, v in result["checks"].items()}


def test_rank_two_on_fibers_above_each_crossing(lens):
    crossings = lens.region.boundary_crossings
    points = [fiber_point(lens, (cp.x, cp.y), idx, 11) for cp in crossings for idx in range(5)]
    for q in points:
        assert np.linalg.matrix_rank(system_jacobian(lens, q)) == 2
    report = rank_check(lens, points)
    assert report.passed
    assert report.samples == 5 * len(crossings)
    assert report.min_rank_gap > 1e3


def test_threaded_sampling_matches_serial(annulus):
    p = (Fraction(3, 2), Fraction(1, 4))
    serial = sample_fiber(annulus, p, 16, 7)
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = list(pool.map(lambda idx: fiber_point(annulus, p, idx, 7), reversed(range(16))))
    np.testing.assert_array_equal(np.array(threaded[::-1]), serial)
    assert rank_check(annulus, list(serial)).to_dict() == rank_check(annulus, threaded[::-1]).to_dict()


def test_rank_gap_is_relative_to_rounding_noise():
    gap, sv = _rank_gap(np.diag([2.0, 1e-12]))
    assert sv.tolist() == pytest.approx([2.0, 1e-12])
    assert gap == pytest.approx(1e-12 / (2 * np.finfo(float).eps * 2.0))
    assert _rank_gap(np.zeros((2, 3)))[0] == 0.0
