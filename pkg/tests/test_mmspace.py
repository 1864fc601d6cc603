import numpy as np
import pytest

from mvmds import MetricMeasureSpace, p_diameter, validate_metric

from conftest import euclidean_metric


class TestValidateMetric:
    def test_two_point_metric_is_valid(self):
        report = validate_metric([[0, 1], [1, 0]])
        assert report.valid
        assert report.symmetric and report.zero_diagonal and report.nonnegative

    def test_asymmetry_located(self):
        report = validate_metric([[0, 1], [2, 0]])
        assert not report.symmetric
        assert report.worst_asymmetry == pytest.approx(1.0)
        assert report.worst_asymmetry_at == (0, 1) or report.worst_asymmetry_at == (1, 0)
        assert any("symmetry" in m for m in report.messages)

    def test_triangle_defect_enumeration(self):
        D = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
        report = validate_metric(D, check_triangle=True)
        # oracle: enumerate all triples
        worst = max(
            D[i, k] - D[i, j] - D[j, k]
            for i in range(3) for j in range(3) for k in range(3)
        )
        assert worst == pytest.approx(1.0)
        assert report.triangle_defect == pytest.approx(worst)
        assert report.worst_triple == (0, 2, 1)
        assert not report.valid

    def test_nonsquare_raises(self):
        with pytest.raises(ValueError):
            validate_metric([[0, 1, 2], [1, 0, 1]])

    def test_genuine_metric_passes_triangle(self, rng):
        D = euclidean_metric(rng, 15)
        report = validate_metric(D, check_triangle=True)
        assert report.valid
        assert report.triangle_defect <= 1e-12


class TestMetricMeasureSpace:
    def test_uniform_weight_default(self):
        space = MetricMeasureSpace([[0, 1], [1, 0]])
        assert np.allclose(space.weights, [0.5, 0.5])

    def test_zero_weight_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            MetricMeasureSpace([[0, 1], [1, 0]], weights=[1.0, 0.0])

    def test_bad_weight_sum_rejected(self):
        with pytest.raises(ValueError, match="sum"):
            MetricMeasureSpace([[0, 1], [1, 0]], weights=[0.6, 0.6])

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            MetricMeasureSpace([[0, 1], [2, 0]])

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            MetricMeasureSpace([[0, -1], [-1, 0]])

    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(ValueError, match="diagonal"):
            MetricMeasureSpace([[1, 1], [1, 0]])

    def test_arrays_frozen(self):
        space = MetricMeasureSpace([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            space.distances[0, 1] = 5.0
        with pytest.raises(ValueError):
            space.weights[0] = 0.9


class TestPDiameter:
    def test_one_point_space(self):
        space = MetricMeasureSpace([[0.0]])
        for p in (1, 2, 7.5, float("inf")):
            assert p_diameter(space, p) == 0.0

    def test_two_point_p2(self):
        space = MetricMeasureSpace([[0, 1], [1, 0]])
        # direct double sum: (2 * 1 * 1/4)^(1/2)
        assert p_diameter(space, 2) == pytest.approx((2 * 0.25) ** 0.5, abs=1e-12)
        assert p_diameter(space, 2) == pytest.approx(0.70711, abs=1e-5)

    def test_two_point_infinity(self):
        space = MetricMeasureSpace([[0, 1], [1, 0]])
        assert p_diameter(space, float("inf")) == 1.0

    def test_p_below_one_rejected(self):
        space = MetricMeasureSpace([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            p_diameter(space, 0.5)

    def test_monotone_in_p(self, rng):
        D = euclidean_metric(rng, 8)
        w = rng.random(8) + 0.1
        space = MetricMeasureSpace(D, weights=w / w.sum())
        values = [p_diameter(space, p) for p in (1, 1.5, 2, 4, 10, float("inf"))]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))

    def test_scaling_covariance(self, rng):
        D = euclidean_metric(rng, 6)
        space = MetricMeasureSpace(D)
        scaled = MetricMeasureSpace(3.5 * D)
        for p in (1, 2, float("inf")):
            assert p_diameter(scaled, p) == pytest.approx(3.5 * p_diameter(space, p), rel=1e-12)

    def test_permutation_invariance(self, rng):
        D = euclidean_metric(rng, 7)
        w = rng.random(7) + 0.1
        w = w / w.sum()
        perm = rng.permutation(7)
        space = MetricMeasureSpace(D, weights=w)
        permuted = MetricMeasureSpace(D[np.ix_(perm, perm)], weights=w[perm])
        for p in (1, 2, 3, float("inf")):
            assert p_diameter(permuted, p) == pytest.approx(p_diameter(space, p), rel=1e-12)
