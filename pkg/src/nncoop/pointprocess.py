"""Point patterns: Poisson sampling, mutually-nearest-neighbour pairing and the
singles-plus-marked-parents superposition model."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree


@dataclass
class PointPattern:
    points: np.ndarray
    window_radius: float
    seed: object = None

    def __len__(self):
        return len(self.points)


@dataclass
class ClusterSet:
    """Partition of a pattern into singles and mutually-nearest-neighbour pairs.

    ``single_index`` and ``pair_index`` index into the clustered pattern;
    each row of ``pair_index`` is sorted.
    """

    points: np.ndarray
    single_index: np.ndarray
    pair_index: np.ndarray

    @property
    def singles(self):
        return self.points[self.single_index]

    @property
    def pairs(self):
        return self.points[self.pair_index]

    @property
    def paired_fraction(self):
        n = len(self.points)
        return 2 * len(self.pair_index) / n if n else 0.0


@dataclass
class SuperpositionPattern:
    singles: np.ndarray
    parents: np.ndarray
    daughters: np.ndarray
    window_radius: float = 0.0
    seed: object = field(default=None, repr=False)


def uniform_disk(rng, n, radius):
    """``n`` points uniform in the disc of the given radius."""
    rad = radius * np.sqrt(rng.random(n))
    ang = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


def sample_ppp(intensity, window_radius, rng, *, seed=None):
    if not intensity > 0:
        raise ValueError(f"intensity must be > 0, got {intensity}")
    if not window_radius > 0:
        raise ValueError(f"window_radius must be > 0, got {window_radius}")
    n = rng.poisson(intensity * np.pi * window_radius ** 2)
    return PointPattern(uniform_disk(rng, n, window_radius), float(window_radius), seed)


def nearest_neighbours(points):
    """Index of each point's nearest neighbour.

    Exact distance ties go to the lexicographically smallest ``(x, y)``.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < 2:
        return np.full(n, -1)
    k = min(n, 3)
    dist, idx = cKDTree(points).query(points, k=k)
    # column 0 is the point itself
    nn = idx[:, 1].copy()
    # ties, and coincident points (which can list the twin before the point itself)
    suspect = idx[:, 0] != np.arange(n)
    if k == 3:
        suspect |= dist[:, 2] == dist[:, 1]
    if suspect.any():
        for i in np.flatnonzero(suspect):
            d = np.hypot(*(points - points[i]).T)
            d[i] = np.inf
            cand = np.flatnonzero(d == d.min())
            order = np.lexsort((points[cand, 1], points[cand, 0]))
            nn[i] = cand[order[0]]
    return nn


def mutual_partner(points):
    """Partner index of each point, or -1 for singles."""
    nn = nearest_neighbours(points)
    n = len(nn)
    if n < 2:
        return np.full(n, -1)
    mutual = nn[nn] == np.arange(n)
    return np.where(mutual, nn, -1)


def cluster_mutual_nn(pattern):
    points = pattern.points if isinstance(pattern, PointPattern) else np.asarray(pattern, float)
    if len(points) == 0:
        raise ValueError("cannot cluster an empty pattern")
    partner = mutual_partner(points)
    idx = np.arange(len(points))
    first = (partner > idx)
    pairs = np.column_stack([idx[first], partner[first]])
    return ClusterSet(points, np.flatnonzero(partner < 0), pairs.reshape(-1, 2))


def pair_distance_samples(clusters):
    if len(clusters.pair_index) == 0:
        raise ValueError("no pairs in the cluster set")
    p = clusters.pairs
    return np.hypot(*(p[:, 0] - p[:, 1]).T)


def sample_superposition(cfg, consts, window_radius, rng, *, seed=None):
    """Singles PPP of intensity (1-delta) lam plus parents PPP of intensity
    delta lam / 2, each parent carrying a daughter at a Gaussian offset of
    per-axis standard deviation alpha."""
    singles = sample_ppp((1 - consts.delta) * cfg.lam, window_radius, rng).points
    parents = sample_ppp(consts.delta * cfg.lam / 2, window_radius, rng).points
    daughters = parents + consts.alpha * rng.standard_normal(parents.shape)
    return SuperpositionPattern(singles, parents, daughters, float(window_radius), seed)


def write_pattern_csv(path, obj):
    """Write ``x,y,role,pair_id`` rows for a cluster set or superposition pattern."""
    rows = []
    if isinstance(obj, ClusterSet):
        for i in obj.single_index:
            rows.append((*obj.points[i], "single", -1))
        for k, (i, j) in enumerate(obj.pair_index):
            rows.append((*obj.points[i], "pair", k))
            rows.append((*obj.points[j], "pair", k))
    elif isinstance(obj, SuperpositionPattern):
        rows += [(x, y, "single", -1) for x, y in obj.singles]
        for k, (p, d) in enumerate(zip(obj.parents, obj.daughters)):
            rows.append((*p, "parent", k))
            rows.append((*d, "daughter", k))
    elif isinstance(obj, PointPattern):
        rows += [(x, y, "point", -1) for x, y in obj.points]
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "role", "pair_id"])
        for x, y, role, pid in rows:
            w.writerow([repr(float(x)), repr(float(y)), role, pid])


def read_pattern_csv(path):
    with open(Path(path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["x"]), float(r["y"]), r["role"], int(r["pair_id"])) for r in rows]
