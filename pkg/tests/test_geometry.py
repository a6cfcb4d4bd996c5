import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdnet.errors import DomainError, GeometryError, InputError
from crowdnet.geometry import (
    Corridor,
    Region,
    WallFunction,
    classify_region,
    default_walls,
    mid_curve_width,
    neck_location,
    nearest_obstacle_point,
    tangent_chord_width,
    wall_eval,
)

from oracles import dense_width_profile, grid_tangent_chord, sampled_nearest


@pytest.fixture(scope="module")
def funnel():
    upper, lower = default_walls()
    return Corridor(upper, lower, (-60.0, 15.0))


@pytest.fixture(scope="module")
def flat():
    return Corridor(WallFunction((6.0,), "upper"), WallFunction((0.0,), "lower"), (-20.0, 20.0))


def interior_points(corridor, n, seed):
    rng = np.random.default_rng(seed)
    lo, hi = corridor.x_domain
    pts = []
    while len(pts) < n:
        x = rng.uniform(lo, hi)
        y = rng.uniform(corridor.lower(x), corridor.upper(x))
        if corridor.contains((x, y), strict=True):
            pts.append((x, y))
    return np.array(pts)


def test_wall_eval_vertices(funnel):
    assert wall_eval(funnel, "upper", 10.0) == pytest.approx((20.0, 0.0), abs=1e-12)
    assert wall_eval(funnel, "lower", -10.0) == pytest.approx((14.0, 0.0), abs=1e-12)
    assert wall_eval(funnel, "upper", 0.0) == pytest.approx((20.8, -0.16), abs=1e-12)


def test_wall_eval_outside_domain(funnel):
    with pytest.raises(DomainError):
        wall_eval(funnel, "upper", 16.0)


def test_walls_match_vertex_form():
    upper, lower = default_walls()
    for x in np.linspace(-60, 15, 31):
        assert upper(x) == pytest.approx(0.008 * (x - 10) ** 2 + 20, abs=1e-12)
        assert lower(x) == pytest.approx(0.008 * (x + 10) ** 2 + 14, abs=1e-12)
        assert upper(x) - lower(x) == pytest.approx(6 - 0.32 * x, abs=1e-11)


def test_corridor_rejects_crossing_walls():
    upper, lower = default_walls()
    with pytest.raises(InputError):
        Corridor(upper, lower, (-40.0, 40.0))  # walls cross at x = 18.75


def test_wall_degree_limit():
    with pytest.raises(InputError):
        WallFunction((1, 0, 0, 0, 0, 1), "upper")


def test_nearest_point_flat(flat):
    nb = nearest_obstacle_point(flat, (3.0, 2.0))
    np.testing.assert_allclose(nb.point, [3.0, 0.0])
    assert nb.distance == pytest.approx(2.0) and nb.wall == "lower"


def test_nearest_point_at_parabola_vertex(funnel):
    nb = nearest_obstacle_point(funnel, (-10.0, 16.0))
    np.testing.assert_allclose(nb.point, [-10.0, 14.0], atol=1e-9)
    assert nb.distance == pytest.approx(2.0) and nb.wall == "lower"


def test_nearest_point_matches_dense_sampling(funnel):
    nb = nearest_obstacle_point(funnel, (0.0, 18.0))
    point, dist, wall = sampled_nearest(funnel, (0.0, 18.0), samples=1_000_000)
    assert wall == nb.wall
    np.testing.assert_allclose(nb.point, point, atol=1e-3)
    assert abs(nb.distance - dist) <= 1e-3


def test_nearest_point_is_optimal(funnel):
    for p in interior_points(funnel, 100, seed=11):
        nb = nearest_obstacle_point(funnel, p)
        _, dist, _ = sampled_nearest(funnel, p, samples=100_000)
        assert dist >= nb.distance - 1e-6
        assert nb.distance == pytest.approx(math.hypot(*(p - nb.point)))


def test_nearest_point_outside(funnel):
    with pytest.raises(GeometryError):
        nearest_obstacle_point(funnel, (0.0, 30.0))


def test_classify_examples(flat):
    assert classify_region(flat, (0, 3), (0.5, 3), 2.0) is Region.I
    assert classify_region(flat, (0, 1), (0.5, 1), 2.0) is Region.II
    assert classify_region(flat, (0, 5.5), (0, 6.5), 2.0) is Region.III
    assert classify_region(flat, (0, 2), (0, 2), 2.0) is Region.I  # boundary is not Region II


def test_classify_outside_is_error(flat):
    with pytest.raises(GeometryError):
        classify_region(flat, (0, 7), (0, 3), 2.0)


@given(st.floats(-19.9, 19.9), st.floats(0.01, 5.99), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.1, 4))
def test_classify_total_and_consistent(x, y, dx, dy, d):
    flat = Corridor(WallFunction((6.0,), "upper"), WallFunction((0.0,), "lower"), (-20.0, 20.0))
    label = classify_region(flat, (x, y), (x + dx, y + dy), d)
    assert label in set(Region)
    outside = not flat.contains((x + dx, y + dy))
    assert (label is Region.III) == outside
    if not outside:
        assert (label is Region.II) == (min(y, 6 - y) < d)


@pytest.mark.parametrize("y", [0.5, 3.0, 5.9])
def test_tangent_chord_parallel_walls(flat, y):
    tc = tangent_chord_width(flat, (1.5, y))
    assert not tc.fallback_used
    assert tc.width == pytest.approx(6.0, abs=1e-12)
    assert tc.tangent_upper[0] == pytest.approx(1.5) and tc.tangent_lower[0] == pytest.approx(1.5)


def test_tangent_chord_mid_curve_matches_oracle(funnel):
    p = (0.0, funnel.mid_y(0.0))
    tc = tangent_chord_width(funnel, p)
    oracle = grid_tangent_chord(funnel, p)
    assert oracle["residual"] < 1e-8
    assert abs(tc.width - oracle["width"]) <= 1e-3


def _tangency_residuals(corridor, tc, agent):
    res = []
    for wall in (corridor.upper, corridor.lower):
        pts = np.polynomial.polynomial.polyval(np.linspace(-200, 200, 400_001), wall.coeffs)
        xs = np.linspace(-200, 200, 400_001)
        near = int(np.argmin(np.hypot(xs - tc.center[0], pts - tc.center[1])))
        lo, hi = xs[max(near - 1, 0)], xs[near + 1]
        fine = np.linspace(lo, hi, 20001)
        d = np.min(np.hypot(fine - tc.center[0],
                            np.polynomial.polynomial.polyval(fine, wall.coeffs) - tc.center[1]))
        res.append(abs(d - tc.radius))
    chord = tc.tangent_upper - tc.tangent_lower
    a = np.asarray(agent) - tc.tangent_lower
    incidence = abs(chord[0] * a[1] - chord[1] * a[0]) / np.hypot(*chord)
    return res, incidence


def test_tangent_chord_residuals_on_random_points(funnel):
    for p in interior_points(funnel, 50, seed=5):
        tc = tangent_chord_width(funnel, p)
        assert not tc.fallback_used
        (ru, rl), incidence = _tangency_residuals(funnel, tc, p)
        assert ru <= 1e-6 and rl <= 1e-6 and incidence <= 1e-6
        assert corridor_contains_segment(funnel, tc.tangent_lower, tc.tangent_upper, p)
        assert tc.width == pytest.approx(np.hypot(*(tc.tangent_upper - tc.tangent_lower)))


def corridor_contains_segment(corridor, a, b, p):
    t = np.dot(p - a, b - a) / np.dot(b - a, b - a)
    return -1e-9 <= t <= 1 + 1e-9


def test_same_chord_same_width(funnel):
    tc = tangent_chord_width(funnel, (-20.0, funnel.mid_y(-20.0)))
    for t in (0.2, 0.35, 0.8):
        q = tc.tangent_lower + t * (tc.tangent_upper - tc.tangent_lower)
        other = tangent_chord_width(funnel, q)
        assert other.width == pytest.approx(tc.width, abs=1e-6)


def test_fallback_reports_vertical_gap(funnel):
    p = (-5.0, funnel.mid_y(-5.0))
    tc = tangent_chord_width(funnel, p, max_iter=0)
    assert tc.fallback_used
    assert tc.width == pytest.approx(funnel.upper(-5.0) - funnel.lower(-5.0))


def test_tangent_chord_outside(funnel):
    with pytest.raises(GeometryError):
        tangent_chord_width(funnel, (0.0, 10.0))


def test_neck_flat_is_leftmost(flat):
    x, w = neck_location(flat, 1.0)
    assert x == -20.0 and w == pytest.approx(6.0)


def test_neck_of_funnel_is_right_end(funnel):
    x, w = neck_location(funnel, 0.5)
    xs, gaps = dense_width_profile(funnel)
    assert np.all(np.diff(gaps) < 0)  # vertical gap 6 - 0.32 x shrinks to the right
    widths = [mid_curve_width(funnel, xx) for xx in xs[::50]]
    assert np.all(np.diff(widths) < 0)
    assert x == pytest.approx(15.0) and w == pytest.approx(min(widths), abs=1e-9)


def test_neck_of_hourglass_is_centre():
    c = Corridor(WallFunction((2.0, 0.0, 0.01), "upper"), WallFunction((-2.0, 0.0, -0.01), "lower"),
                 (-30.0, 30.0))
    x, w = neck_location(c, 0.7)
    assert x == pytest.approx(0.0, abs=1e-4)
    assert w == pytest.approx(4.0, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(-59, 14), st.floats(0.05, 0.95))
def test_tangent_chord_is_total(x, frac):
    upper, lower = default_walls()
    c = Corridor(upper, lower, (-60.0, 15.0))
    y = lower(x) + frac * (upper(x) - lower(x))
    tc = tangent_chord_width(c, (x, y))
    assert tc.width > 0 and math.isfinite(tc.width)
