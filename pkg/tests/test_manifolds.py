import math

import numpy as np
import pytest

from mvmds import (
    Circle,
    Euclidean,
    Sphere,
    distance_gradient,
    geodesic_distance,
    grid,
    manifold_spec,
    pairwise_distances,
    parse_manifold,
    random_points,
    retract,
    validate_metric,
)

TWO_PI = 2 * math.pi


class TestParsing:
    @pytest.mark.parametrize("text,expected", [
        ("circle:r=1.0", Circle(1.0)),
        ("sphere:r=6371", Sphere(6371.0)),
        ("euclidean:d=2", Euclidean(2)),
        ("circle", Circle(1.0)),
    ])
    def test_roundtrip(self, text, expected):
        manifold = parse_manifold(text)
        assert manifold == expected
        assert parse_manifold(manifold_spec(manifold)) == manifold

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            parse_manifold("torus:r=1")

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            parse_manifold("circle:r=zero")
        with pytest.raises(ValueError):
            Circle(-1.0)
        with pytest.raises(ValueError):
            Euclidean(0)


class TestGeodesicDistance:
    def test_circle_quarter_turn(self):
        assert geodesic_distance(Circle(2.0), 0.0, math.pi / 2) == pytest.approx(math.pi)

    def test_circle_wraparound(self):
        assert geodesic_distance(Circle(1.0), 0.1, TWO_PI - 0.1) == pytest.approx(0.2)

    def test_sphere_pole_to_equator(self):
        north = np.array([0.0, 0.0, 1.0])
        equator = np.array([1.0, 0.0, 0.0])
        assert geodesic_distance(Sphere(1.0), north, equator) == pytest.approx(math.pi / 2)

    def test_euclidean(self):
        assert geodesic_distance(Euclidean(2), [0, 0], [3, 4]) == pytest.approx(5.0)

    def test_radius_covariance(self, rng):
        a, b = rng.uniform(0, TWO_PI, 2)
        assert geodesic_distance(Circle(3.0), a, b) == pytest.approx(
            3.0 * geodesic_distance(Circle(1.0), a, b))
        u, v = random_points(Sphere(1.0), 2, rng)
        assert geodesic_distance(Sphere(5.0), u, v) == pytest.approx(
            5.0 * geodesic_distance(Sphere(1.0), u, v))


class TestDistanceGradient:
    def test_coincident_points_zero(self):
        tangent, scale = distance_gradient(Circle(1.0), 1.3, 1.3)
        assert tangent == 0.0 and scale == 0.0
        u = np.array([0.0, 1.0, 0.0])
        tangent, scale = distance_gradient(Sphere(2.0), u, u)
        assert np.all(tangent == 0.0)

    def test_antipodal_zero(self):
        tangent, _ = distance_gradient(Circle(1.0), 0.0, math.pi)
        assert tangent == 0.0
        u = np.array([0.0, 0.0, 1.0])
        tangent, _ = distance_gradient(Sphere(1.0), u, -u)
        assert np.all(tangent == 0.0)

    def test_circle_finite_differences(self):
        tangent, scale = distance_gradient(Circle(1.0), 0.0, 1.0)
        step = 1e-6
        fd = (geodesic_distance(Circle(1.0), step, 1.0)
              - geodesic_distance(Circle(1.0), -step, 1.0)) / (2 * step)
        assert tangent == pytest.approx(fd, abs=1e-6)
        assert tangent == pytest.approx(-1.0)
        assert scale == pytest.approx(1.0)  # d itself

    def test_sphere_finite_differences(self, rng):
        manifold = Sphere(1.0)
        count = 0
        while count < 25:
            u, v = random_points(manifold, 2, rng)
            ang = math.acos(float(np.clip(u @ v, -1, 1)))
            if ang < 0.1 or math.pi - ang < 0.1:
                continue
            count += 1
            tangent, scale = distance_gradient(manifold, u, v)
            step = 1e-6
            for axis in range(3):
                e = np.zeros(3)
                e[axis] = step
                # compare against the ambient directional derivative through
                # the renormalizing retraction
                plus = retract(manifold, u, e)
                minus = retract(manifold, u, -e)
                fd = (geodesic_distance(manifold, plus, v)
                      - geodesic_distance(manifold, minus, v)) / (2 * step)
                assert tangent[axis] == pytest.approx(fd, abs=1e-5)
            assert scale == pytest.approx(geodesic_distance(manifold, u, v))

    def test_euclidean_gradient(self):
        tangent, scale = distance_gradient(Euclidean(2), np.zeros(2), np.array([3.0, 4.0]))
        assert np.allclose(tangent, [-0.6, -0.8])
        assert scale == 0.0


class TestRetract:
    def test_zero_step(self):
        assert retract(Circle(1.0), 1.0, 0.0) == pytest.approx(1.0)
        u = np.array([0.0, 0.0, 1.0])
        assert np.allclose(retract(Sphere(1.0), u, np.zeros(3)), u)

    def test_circle_wrap(self):
        assert retract(Circle(1.0), 6.0, 0.5) == pytest.approx(6.5 - TWO_PI, abs=1e-12)
        assert retract(Circle(1.0), 6.0, 0.5) == pytest.approx(0.21681, abs=1e-5)

    def test_sphere_unit_norm(self, rng):
        pts = random_points(Sphere(1.0), 10, rng)
        steps = rng.normal(0, 0.3, (10, 3))
        out = retract(Sphere(1.0), pts, steps)
        assert np.max(np.abs(np.linalg.norm(out, axis=1) - 1.0)) <= 1e-12

    def test_sphere_zero_vector_rejected(self):
        u = np.array([0.0, 0.0, 1.0])
        with pytest.raises(FloatingPointError):
            retract(Sphere(1.0), u, -u)


class TestGrid:
    def test_circle_exact_without_jitter(self):
        angles = grid(Circle(1.0), 4, jitter=0.0)
        assert np.allclose(angles, [0, math.pi / 2, math.pi, 3 * math.pi / 2])

    def test_seed_determinism(self):
        for manifold in (Circle(1.0), Sphere(1.0), Euclidean(2)):
            a = grid(manifold, 37, jitter=0.2, seed=5)
            b = grid(manifold, 37, jitter=0.2, seed=5)
            assert np.array_equal(a, b)

    def test_sphere_lattice_separated(self):
        pts = grid(Sphere(1.0), 100, jitter=0.0)
        D = pairwise_distances(Sphere(1.0), pts)
        off = D[~np.eye(100, dtype=bool)]
        assert off.min() > 0.0

    def test_euclidean_covers_cube(self):
        pts = grid(Euclidean(2), 9, jitter=0.0)
        assert pts.shape == (9, 2)
        assert pts.min() == 0.0 and pts.max() == 1.0

    def test_jitter_bounds(self):
        with pytest.raises(ValueError):
            grid(Circle(1.0), 4, jitter=0.5)
        with pytest.raises(ValueError):
            grid(Circle(1.0), 0)


class TestPairwiseDistances:
    def test_single_point(self):
        assert np.array_equal(pairwise_distances(Circle(1.0), [0.3]), [[0.0]])

    def test_antipodal_circle_points(self):
        D = pairwise_distances(Circle(1.0), [0.0, math.pi])
        assert D[0, 1] == pytest.approx(math.pi)

    @pytest.mark.parametrize("manifold", [Circle(1.3), Sphere(2.0), Euclidean(3)])
    def test_valid_metric_with_triangle(self, rng, manifold):
        pts = random_points(manifold, 12, rng)
        D = pairwise_distances(manifold, pts)
        report = validate_metric(D, check_triangle=True)
        assert report.valid
        assert report.triangle_defect <= 1e-9

    @pytest.mark.parametrize("manifold", [Circle(1.0), Sphere(4.0)])
    def test_diameter_bound(self, rng, manifold):
        pts = random_points(manifold, 20, rng)
        D = pairwise_distances(manifold, pts)
        assert D.max() <= math.pi * manifold.radius + 1e-12

    def test_matches_single_pair_function(self, rng):
        # arccos has unbounded slope near coincident points, so matrix-product
        # and single-pair dot products may legitimately differ by ~sqrt(eps)
        for manifold in (Circle(1.5), Sphere(2.5), Euclidean(2)):
            pts = random_points(manifold, 6, rng)
            D = pairwise_distances(manifold, pts)
            for i in range(6):
                for j in range(6):
                    assert D[i, j] == pytest.approx(
                        geodesic_distance(manifold, pts[i], pts[j]), abs=1e-7)
