import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from nncoop import NetworkConfig, derive_constants
from nncoop.pointprocess import (ClusterSet, PointPattern, cluster_mutual_nn, nearest_neighbours,
                                 pair_distance_samples, read_pattern_csv, sample_ppp,
                                 sample_superposition, write_pattern_csv)


def _brute_nn(points):
    """O(n^2) nearest neighbours; ties go to the lexicographically smallest point."""
    n = len(points)
    nn = np.empty(n, int)
    for i in range(n):
        d = np.hypot(*(points - points[i]).T)
        d[i] = np.inf
        cand = [j for j in range(n) if d[j] == d.min()]
        nn[i] = min(cand, key=lambda j: (points[j, 0], points[j, 1]))
    return nn


def _brute_pairs(points):
    nn = _brute_nn(points)
    return {tuple(sorted((i, int(nn[i])))) for i in range(len(points)) if nn[nn[i]] == i}


# points on a quarter-unit lattice: exact distances, frequent ties
points_strategy = st.lists(st.tuples(st.integers(-40, 40), st.integers(-40, 40)),
                           min_size=1, max_size=60, unique=True).map(
    lambda p: np.array(p, dtype=float) / 4.0)


class TestSamplePpp:
    def test_mean_count(self, rng):
        counts = [len(sample_ppp(0.25, 40.0, rng)) for _ in range(400)]
        mean = 0.25 * math.pi * 1600
        assert abs(np.mean(counts) - mean) < 3 * math.sqrt(mean / 400)

    def test_points_in_window(self, rng):
        p = sample_ppp(0.25, 10.0, rng)
        assert np.all(np.hypot(*p.points.T) <= 10.0)

    @pytest.mark.parametrize("kw", [{"intensity": 0.25, "window_radius": 0.0},
                                    {"intensity": 0.0, "window_radius": 5.0}])
    def test_rejects_bad_parameters(self, rng, kw):
        with pytest.raises(ValueError):
            sample_ppp(rng=rng, **kw)

    def test_seed_reproducible(self):
        a = sample_ppp(0.25, 20.0, np.random.default_rng(5))
        b = sample_ppp(0.25, 20.0, np.random.default_rng(5))
        np.testing.assert_array_equal(a.points, b.points)

    def test_mean_nearest_neighbour_distance(self, rng):
        d = []
        for _ in range(40):
            pts = sample_ppp(0.25, 40.0, rng).points
            nn = nearest_neighbours(pts)
            inner = np.hypot(*pts.T) < 30.0
            d.append(np.hypot(*(pts - pts[nn]).T)[inner])
        d = np.concatenate(d)
        assert d.mean() == pytest.approx(1.0, abs=3 * d.std() / math.sqrt(d.size))


class TestClustering:
    def test_two_points(self):
        c = cluster_mutual_nn(PointPattern(np.array([[0.0, 0.0], [1.0, 2.0]]), 5.0))
        assert len(c.pair_index) == 1 and len(c.single_index) == 0

    def test_single_point(self):
        c = cluster_mutual_nn(np.array([[1.0, 1.0]]))
        assert c.single_index.tolist() == [0] and c.pair_index.shape == (0, 2)

    def test_three_point_chain(self):
        # x, y mutual neighbours; w's neighbour is x but x's is y
        x, y, w = [0.0, 0.0], [1.0, 0.0], [-1.5, 0.0]
        c = cluster_mutual_nn(np.array([x, y, w]))
        assert c.pair_index.tolist() == [[0, 1]]
        assert c.single_index.tolist() == [2]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            cluster_mutual_nn(np.zeros((0, 2)))

    def test_coincident_points_partitioned(self):
        pts = np.array([[1e-191, 0.0], [0.0, 0.0], [3.0, 0.0], [7.0, 0.0]])
        c = cluster_mutual_nn(pts)
        members = np.concatenate([c.single_index, c.pair_index.ravel()])
        assert sorted(members.tolist()) == [0, 1, 2, 3]

    def test_tie_break_is_lexicographic(self):
        # the origin is equidistant from (1, 0) and (-1, 0): the lexicographically smaller wins
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [-1.0, 5.0], [1.0, 5.0]])
        assert nearest_neighbours(pts)[0] == 2

    @given(points_strategy)
    def test_partition_and_mutuality(self, pts):
        c = cluster_mutual_nn(pts)
        members = np.concatenate([c.single_index, c.pair_index.ravel()])
        assert sorted(members.tolist()) == list(range(len(pts)))
        np.testing.assert_array_equal(nearest_neighbours(pts), _brute_nn(pts) if len(pts) > 1 else [-1])
        assert {tuple(p) for p in c.pair_index.tolist()} == (_brute_pairs(pts) if len(pts) > 1 else set())

    @given(points_strategy, st.integers(0, 2 ** 32 - 1))
    def test_order_independent(self, pts, seed):
        perm = np.random.default_rng(seed).permutation(len(pts))
        a = cluster_mutual_nn(pts)
        b = cluster_mutual_nn(pts[perm])
        pairs_a = {frozenset(map(tuple, pts[p])) for p in a.pair_index}
        pairs_b = {frozenset(map(tuple, pts[perm][p])) for p in b.pair_index}
        assert pairs_a == pairs_b

    def test_idempotent(self, rng):
        pts = sample_ppp(0.25, 20.0, rng).points
        a, b = cluster_mutual_nn(pts), cluster_mutual_nn(pts)
        np.testing.assert_array_equal(a.pair_index, b.pair_index)
        np.testing.assert_array_equal(a.single_index, b.single_index)

    def test_brute_force_on_ppp(self, rng):
        pts = sample_ppp(0.25, 25.0, rng).points
        c = cluster_mutual_nn(pts)
        assert {tuple(p) for p in c.pair_index.tolist()} == _brute_pairs(pts)

    def test_pair_fraction(self, rng):
        paired = total = 0
        for _ in range(60):
            pts = sample_ppp(0.25, 40.0, rng).points
            c = cluster_mutual_nn(pts)
            partner = np.zeros(len(pts), bool)
            partner[c.pair_index.ravel()] = True
            inner = np.hypot(*pts.T) < 34.0
            paired += partner[inner].sum()
            total += inner.sum()
        assert paired / total == pytest.approx(0.6215, abs=0.01)


class TestPairDistances:
    def test_345(self):
        c = cluster_mutual_nn(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert pair_distance_samples(c).tolist() == [5.0]

    def test_no_pairs(self):
        with pytest.raises(ValueError):
            pair_distance_samples(ClusterSet(np.array([[0.0, 0.0]]), np.array([0]),
                                             np.zeros((0, 2), int)))

    @given(st.floats(0, 2 * np.pi))
    def test_rotation_invariant(self, theta):
        pts = np.random.default_rng(3).uniform(-10, 10, (80, 2))
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        a = np.sort(pair_distance_samples(cluster_mutual_nn(pts)))
        b = np.sort(pair_distance_samples(cluster_mutual_nn(pts @ rot.T)))
        np.testing.assert_allclose(a, b, rtol=1e-12)


class TestSuperposition:
    @pytest.fixture
    def model(self):
        cfg = NetworkConfig(lam=0.25)
        return cfg, derive_constants(cfg)

    def test_intensities(self, model, rng):
        cfg, c = model
        assert (1 - c.delta) * cfg.lam == pytest.approx(0.09462, abs=1e-5)
        assert c.delta * cfg.lam / 2 == pytest.approx(0.07769, abs=1e-5)
        n_s = n_p = 0
        for _ in range(40):
            pat = sample_superposition(cfg, c, 40.0, rng)
            assert len(pat.parents) == len(pat.daughters)
            n_s += len(pat.singles)
            n_p += len(pat.parents)
        # chi-square on the split of stations into singles and pair members
        total = n_s + 2 * n_p
        expected = np.array([1 - c.delta, c.delta]) * total
        assert stats.chisquare([n_s, 2 * n_p], expected).pvalue > 0.01

    def test_pair_distance_law(self, model, rng):
        cfg, c = model
        w = []
        for _ in range(30):
            pat = sample_superposition(cfg, c, 40.0, rng)
            w.append(np.hypot(*(pat.daughters - pat.parents).T))
        w = np.concatenate(w)
        assert w.mean() == pytest.approx(0.7883, abs=3 * w.std() / math.sqrt(w.size))
        assert stats.kstest(w, stats.rayleigh(scale=c.alpha).cdf).pvalue > 0.01

    def test_daughter_of_central_parent_is_rayleigh(self, model, rng):
        _, c = model
        z = np.hypot(*(c.alpha * rng.standard_normal((2, 50_000))))
        assert stats.kstest(z, stats.rayleigh(scale=c.alpha).cdf).pvalue > 0.01


class TestCsv:
    def test_round_trip(self, tmp_path, rng):
        pts = sample_ppp(0.25, 10.0, rng).points
        c = cluster_mutual_nn(pts)
        path = tmp_path / "clusters.csv"
        write_pattern_csv(path, c)
        rows = read_pattern_csv(path)
        assert len(rows) == len(pts)
        assert sum(r[2] == "pair" for r in rows) == 2 * len(c.pair_index)
        got = {(x, y) for x, y, _, _ in rows}
        assert got == {tuple(p) for p in pts.tolist()}

    def test_superposition_roles(self, tmp_path, rng):
        cfg = NetworkConfig()
        pat = sample_superposition(cfg, derive_constants(cfg), 8.0, rng)
        path = tmp_path / "sup.csv"
        write_pattern_csv(path, pat)
        roles = [r[2] for r in read_pattern_csv(path)]
        assert roles.count("parent") == roles.count("daughter") == len(pat.parents)
