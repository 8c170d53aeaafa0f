import math

import numpy as np
import pytest

from zigzagtda import filters, metric
from zigzagtda.metric import PointCloud


class TestCodensity:
    def test_two_points(self):
        dm = metric.distance_matrix(PointCloud([[0.0], [3.0]]))
        assert filters.codensity(dm, 1).values == pytest.approx([3.0, 3.0])

    def test_collinear_enumeration(self):
        dm = metric.distance_matrix(PointCloud([[0.0], [1.0], [10.0]]))
        assert filters.codensity(dm, 1).values == pytest.approx([1.0, 1.0, 9.0])
        assert filters.codensity(dm, 2).values == pytest.approx([10.0, 9.0, 10.0])

    def test_order_is_ascending(self):
        dm = metric.distance_matrix(PointCloud([[0.0], [3.0]]))
        assert filters.codensity(dm, 1).order == "ascending"

    def test_matches_brute_force_knn(self):
        cloud = metric.generate("circle", 1000, 13)
        dm = metric.distance_matrix(cloud)
        got = filters.codensity(dm, 15).values
        arr = dm.toarray()
        for i in range(0, 1000, 37):
            others = np.sort(np.delete(arr[i], i))
            assert got[i] == pytest.approx(others[14])

    def test_monotone_in_k(self):
        cloud = metric.generate("figure8", 80, 3)
        dm = metric.distance_matrix(cloud)
        prev = filters.codensity(dm, 1).values
        for k in range(2, 10):
            cur = filters.codensity(dm, k).values
            assert np.all(np.asarray(cur) >= np.asarray(prev))
            prev = cur

    def test_k_bounds(self):
        dm = metric.distance_matrix(PointCloud([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            filters.codensity(dm, 2)


class TestGaussianKde:
    def test_single_point_value(self):
        cloud = PointCloud([[0.4, -2.0]])
        sigma = 0.7
        fv = filters.gaussian_kde(cloud, sigma)
        assert fv.values == pytest.approx([(math.sqrt(2 * math.pi) * sigma) ** -2])

    def test_coincident_points(self):
        cloud = PointCloud([[1.0, 1.0], [1.0, 1.0]])
        fv = filters.gaussian_kde(cloud, 0.5)
        single = (math.sqrt(2 * math.pi) * 0.5) ** -2
        assert fv.values == pytest.approx([single, single])

    def test_order_is_descending(self):
        assert filters.gaussian_kde(PointCloud([[0.0]]), 1.0).order == "descending"

    def test_matches_naive_double_loop(self):
        cloud = metric.generate("circle", 100, 21)
        sigma = 0.2
        got = np.asarray(filters.gaussian_kde(cloud, sigma).values)
        pts = cloud.points
        d = pts.shape[1]
        norm = (math.sqrt(2 * math.pi) * sigma) ** (-d)
        want = np.array([
            sum(norm * math.exp(-np.sum((p - q) ** 2) / (2 * sigma ** 2))
                for q in pts) / len(pts)
            for p in pts
        ])
        assert np.allclose(got, want, rtol=1e-12)

    def test_positive_and_rigid_motion_invariant(self):
        rng = np.random.default_rng(5)
        pts = rng.normal(size=(40, 2))
        base = np.asarray(filters.gaussian_kde(PointCloud(pts), 0.4).values)
        assert np.all(base > 0)
        theta = 1.1
        rot = np.array([[math.cos(theta), -math.sin(theta)],
                        [math.sin(theta), math.cos(theta)]])
        moved = pts @ rot.T + [5.0, -3.0]
        assert np.allclose(
            np.asarray(filters.gaussian_kde(PointCloud(moved), 0.4).values), base)

    def test_sigma_positive(self):
        with pytest.raises(ValueError):
            filters.gaussian_kde(PointCloud([[0.0]]), 0.0)


class TestTopPercent:
    def test_full_percent(self):
        fv = filters.FilterValues([2.0, 1.0, 3.0], "ascending")
        assert filters.top_percent(fv, 100) == (0, 1, 2)

    def test_ceiling_count(self):
        fv = filters.FilterValues([5.0, 1.0, 3.0], "ascending")
        assert filters.top_percent(fv, 34) == (1, 2)

    def test_descending_order(self):
        fv = filters.FilterValues([5.0, 1.0, 3.0], "descending")
        assert filters.top_percent(fv, 34) == (0, 2)

    def test_tie_breaks_lowest_index(self):
        fv = filters.FilterValues([1.0, 1.0, 1.0], "ascending")
        assert filters.top_percent(fv, 50) == (0, 1)

    def test_nested_levelsets(self):
        rng = np.random.default_rng(2)
        fv = filters.FilterValues(rng.normal(size=200).tolist(), "descending")
        prev = set()
        for t in (5, 20, 40, 80, 100):
            cur = set(filters.top_percent(fv, t))
            assert prev <= cur
            prev = cur

    def test_sort_oracle_large(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=10_000)
        fv = filters.FilterValues(vals.tolist(), "ascending")
        for t in (1, 13.7, 50, 99.9):
            sel = filters.top_percent(fv, t)
            assert len(sel) == math.ceil(t * len(vals) / 100)
            inc = vals[list(sel)].max()
            excluded = np.delete(vals, list(sel))
            assert excluded.size == 0 or np.all(excluded >= inc)

    def test_percent_bounds(self):
        fv = filters.FilterValues([1.0], "ascending")
        with pytest.raises(ValueError):
            filters.top_percent(fv, 0)
        with pytest.raises(ValueError):
            filters.top_percent(fv, 101)
