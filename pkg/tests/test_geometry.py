import numpy as np
import pytest

from probqos import (
    Box,
    HPolytope,
    Simplex,
    analytic_center,
    bounding_box,
    estimate_volume,
    solve_lp,
)
from probqos.geometry import (
    DegenerateSimplexError,
    DimensionMismatchError,
    EmptyInteriorError,
    GeometryError,
    LPInfeasibleError,
    LPUnboundedError,
    UnboundedPolytopeError,
    _lp_min,
    simplex_contains,
)


def simplex3():
    # x_i >= 0, sum x_i <= 1 in R^3
    A = np.vstack([-np.eye(3), np.ones((1, 3))])
    b = np.array([0.0, 0.0, 0.0, 1.0])
    return HPolytope(A, b, ("a", "b", "c"))


class TestLP:
    def test_min_on_square(self, unit_square):
        x, value = solve_lp(np.array([1.0, 1.0]), unit_square, sense="min")
        assert value == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(x, [0.0, 0.0], atol=1e-9)

    def test_max_on_square(self, unit_square):
        _, value = solve_lp(np.array([1.0, 0.0]), unit_square, sense="max")
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_max_on_triangle(self, triangle):
        _, value = solve_lp(np.array([1.0, 1.0]), triangle, sense="max")
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_infeasible(self):
        # x <= 0 and x >= 1 cannot hold together
        with pytest.raises(LPInfeasibleError):
            _lp_min(np.array([1.0]), np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]))

    def test_unbounded(self):
        with pytest.raises(LPUnboundedError):
            _lp_min(np.array([1.0]), np.array([[1.0]]), np.array([1.0]))

    def test_negative_rhs(self):
        # x >= 2, x <= 5: minimum of x is 2 (rhs -2 exercises phase 1)
        x, value = _lp_min(np.array([1.0]), np.array([[-1.0], [1.0]]),
                           np.array([-2.0, 5.0]))
        assert value == pytest.approx(2.0, abs=1e-9)


class TestBox:
    def test_volume_and_contains(self):
        box = Box(np.array([0.0, -1.0]), np.array([2.0, 1.0]))
        assert box.volume == pytest.approx(4.0)
        assert box.contains([1.0, 0.0])
        assert not box.contains([3.0, 0.0])

    def test_invalid_bounds(self):
        with pytest.raises(GeometryError):
            Box(np.array([1.0]), np.array([0.0]))


class TestHPolytope:
    def test_bounding_box_square(self, unit_square):
        box = bounding_box(unit_square)
        np.testing.assert_allclose(box.lower, [0.0, 0.0], atol=1e-9)
        np.testing.assert_allclose(box.upper, [1.0, 1.0], atol=1e-9)

    def test_membership(self, triangle):
        assert triangle.contains([0.25, 0.25])
        assert not triangle.contains([0.75, 0.75])
        mask = triangle.contains_all(np.array([[0.1, 0.1], [0.9, 0.9]]))
        assert mask.tolist() == [True, False]

    def test_boundary_included(self, triangle):
        assert triangle.contains([0.0, 0.0])
        assert triangle.contains([0.5, 0.5])

    def test_unbounded_rejected(self):
        with pytest.raises(UnboundedPolytopeError):
            HPolytope(np.array([[1.0, 0.0]]), np.array([1.0]))

    def test_infeasible_rejected(self):
        with pytest.raises(LPInfeasibleError):
            HPolytope(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]))

    def test_zero_row_rejected(self):
        with pytest.raises(GeometryError):
            HPolytope(np.array([[0.0, 0.0]]), np.array([1.0]))

    def test_dimension_mismatch(self, triangle):
        with pytest.raises(DimensionMismatchError):
            triangle.contains([0.1, 0.1, 0.1])

    def test_structural_key_dedup(self, triangle):
        other = HPolytope(triangle.constraint_matrix, triangle.bounds, ("x", "y"))
        assert triangle.structural_key() == other.structural_key()


class TestSimplex:
    def test_contains(self):
        s = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        assert simplex_contains(s, [0.2, 0.2])
        assert not simplex_contains(s, [0.8, 0.8])

    def test_barycentric_sums_to_one(self):
        s = Simplex(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]))
        t = s.barycentric([0.5, 0.5])
        assert t.sum() == pytest.approx(1.0)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateSimplexError):
            Simplex(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))


class TestAnalyticCenter:
    def test_triangle_center(self, triangle):
        # minimizing the log barrier of {x,y >= 0, x+y <= 1} gives (1/3, 1/3)
        np.testing.assert_allclose(analytic_center(triangle), [1 / 3, 1 / 3],
                                   atol=1e-6)

    def test_square_center(self, unit_square):
        np.testing.assert_allclose(analytic_center(unit_square), [0.5, 0.5],
                                   atol=1e-6)

    def test_strict_interior(self, triangle):
        c = analytic_center(triangle)
        assert np.all(triangle.slacks(c) > 0.0)

    def test_empty_interior(self):
        # the slab 0 <= x <= 0 has no interior point
        thin = HPolytope(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
                         np.array([0.0, 0.0, 1.0, 0.0]))
        with pytest.raises(EmptyInteriorError):
            analytic_center(thin)


class TestVolume:
    def test_square_exact(self, unit_square):
        volume, se = estimate_volume(unit_square, 10_000, rng_seed=0)
        assert volume == 1.0
        assert se == 0.0

    def test_triangle(self, triangle):
        volume, se = estimate_volume(triangle, 100_000, rng_seed=3)
        assert abs(volume - 0.5) <= 3 * se

    def test_3simplex(self):
        volume, se = estimate_volume(simplex3(), 1_000_000, rng_seed=5)
        assert abs(volume - 1 / 6) <= 3 * se

    def test_measure_zero(self):
        thin = HPolytope(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
                         np.array([0.0, 0.0, 1.0, 0.0]))
        assert estimate_volume(thin, 10_000, rng_seed=0) == (0.0, 0.0)

    def test_deterministic(self, triangle):
        a = estimate_volume(triangle, 50_000, rng_seed=11)
        b = estimate_volume(triangle, 50_000, rng_seed=11)
        assert a == b

    def test_workers_deterministic(self, triangle):
        a = estimate_volume(triangle, 50_000, rng_seed=11, workers=4)
        b = estimate_volume(triangle, 50_000, rng_seed=11, workers=4)
        assert a == b
