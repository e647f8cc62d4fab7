"""Monte Carlo coverage for the NN model, the superposition model and the
non-cooperative PPP baseline.

Trials are simulated in fixed-size chunks, each vectorised over its trials and
seeded from ``SeedSequence(base_seed, spawn_key=(chunk,))``. Chunks run on a
thread pool and return integer success counts, so the merged curve does not
depend on the number of workers or on completion order.

Interference beyond the window radius ``R`` is replaced by its mean,
``2 pi R**(2-beta) / (beta-2)`` times the emitted power density; without it
the truncation bias at ``beta = 2.5`` would exceed the Monte Carlo error.
"""
from __future__ import annotations

import enum
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import ClosestCluster, FixedTransmitter, NetworkConfig
from .curves import CoverageCurve
from .pointprocess import mutual_partner, uniform_disk
from .signals import scheme_label


class Model(str, enum.Enum):
    NN = "nn"
    SUPERPOSITION = "superposition"
    BASELINE = "baseline"


def _as_model(m):
    try:
        return Model(m.value if isinstance(m, Model) else str(m).lower())
    except ValueError:
        raise ValueError(f"unknown model {m!r}; expected nn | superposition | baseline") from None


@dataclass(frozen=True)
class SimulationPlan:
    """What to simulate. Scheme and association come from the ``NetworkConfig``.

    ``exclusion`` only matters for the superposition model under closest-cluster
    association: ``"literal"`` drops every pair with a station closer than the
    serving distance (the convention of the analytic formulas), ``"none"`` lets
    every non-serving cluster interfere.
    """

    model: Model = Model.SUPERPOSITION
    thresholds: tuple = (1.0,)
    trials: int = 10_000
    window_radius: float | None = None
    guard_radius: float | None = None
    base_seed: int = 0
    chunk_size: int = 256
    far_field: bool = True
    exclusion: str = "literal"

    def __post_init__(self):
        object.__setattr__(self, "model", _as_model(self.model))
        t = tuple(float(v) for v in np.atleast_1d(self.thresholds))
        if not t or any(v <= 0 for v in t):
            raise ValueError("thresholds must be positive")
        object.__setattr__(self, "thresholds", t)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.exclusion not in ("literal", "none"):
            raise ValueError("exclusion must be 'literal' or 'none'")
        if self.window_radius is not None and self.guard_radius is not None:
            if not self.window_radius > self.guard_radius > 0:
                raise ValueError("need window_radius > guard_radius > 0")

    def resolved(self, cfg):
        """Fill default window (15/sqrt(lambda)) and guard (3/sqrt(lambda)) radii."""
        w = self.window_radius if self.window_radius is not None else 15.0 / math.sqrt(cfg.lam)
        g = self.guard_radius if self.guard_radius is not None else 3.0 / math.sqrt(cfg.lam)
        if not w > g > 0:
            raise ValueError("need window_radius > guard_radius > 0")
        return SimulationPlan(self.model, self.thresholds, self.trials, w, g, self.base_seed,
                              self.chunk_size, self.far_field, self.exclusion)


def worker_count():
    env = os.environ.get("NNCOOP_THREADS")
    n = os.cpu_count() or 1
    if env:
        try:
            n = max(1, min(n, int(env)))
        except ValueError:
            warnings.warn(f"ignoring NNCOOP_THREADS={env!r}", stacklevel=2)
    return n


def chunk_rng(base_seed, chunk):
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(chunk,)))


# -- per-trial group helpers ------------------------------------------------------

def _group_argmin(values, trial, n_trials):
    """Index of the smallest value of each trial (-1 for empty trials).

    ``trial`` must be sorted (points are generated trial by trial).
    """
    counts = np.bincount(trial, minlength=n_trials)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    order = np.lexsort((values, trial))
    out = np.full(n_trials, -1)
    has = counts > 0
    out[has] = order[starts[has]]
    return out


def _sum_by_trial(weights, trial, n_trials):
    return np.bincount(trial, weights=weights, minlength=n_trials)


def _poisson_disk(rng, intensity, radius, n_trials):
    counts = rng.poisson(intensity * math.pi * radius ** 2, size=n_trials)
    pts = uniform_disk(rng, int(counts.sum()), radius)
    return pts, np.repeat(np.arange(n_trials), counts)


def _far_field(cfg, consts, plan, emit_density):
    if not plan.far_field:
        return 0.0
    b = cfg.beta
    return 2.0 * math.pi * plan.window_radius ** (2.0 - b) / (b - 2.0) * emit_density


def _pair_mean(scheme, cfg):
    return float(np.asarray(scheme.mean_signal(1.0, 1.0, cfg)))


def _single_power(rng, dist, cfg):
    return cfg.power * rng.standard_exponential(dist.shape) * dist ** -cfg.beta


# -- one chunk of each model ----------------------------------------------------

def _chunk_superposition(rng, n, cfg, consts, plan):
    R = plan.window_radius
    beta = cfg.beta
    singles, ts = _poisson_disk(rng, (1 - consts.delta) * cfg.lam, R, n)
    parents, tp = _poisson_disk(rng, consts.delta * cfg.lam / 2, R, n)
    daughters = parents + consts.alpha * rng.standard_normal(parents.shape)
    ds = np.hypot(singles[:, 0], singles[:, 1])
    dp = np.hypot(parents[:, 0], parents[:, 1])
    dd = np.hypot(daughters[:, 0], daughters[:, 1])
    emit = (1 - consts.delta) * cfg.lam * cfg.power + consts.delta * cfg.lam / 2 * _pair_mean(
        cfg.interference_scheme, cfg)
    noise = cfg.sigma2 + _far_field(cfg, consts, plan, emit)

    p_single = _single_power(rng, ds, cfg)
    p_pair = cfg.interference_scheme.sample(dp, dd, cfg, rng)
    assoc = cfg.association

    if isinstance(assoc, FixedTransmitter):
        signal = cfg.power * rng.standard_exponential(n) * assoc.r0 ** -beta
        interference = _sum_by_trial(p_single, ts, n) + _sum_by_trial(p_pair, tp, n)
        return signal / (noise + interference)

    i1 = _group_argmin(ds, ts, n)
    j2 = _group_argmin(dp, tp, n)
    r1 = np.where(i1 >= 0, ds[i1], np.inf)
    r2 = np.where(j2 >= 0, dp[j2], np.inf)
    z2 = np.where(j2 >= 0, dd[j2], np.inf)
    single_case = r1 < np.minimum(r2, z2)
    pair_case = ~single_case & (j2 >= 0)

    signal = np.zeros(n)
    signal[single_case] = p_single[i1[single_case]]
    signal[pair_case] = cfg.scheme.sample(r2[pair_case], z2[pair_case], cfg, rng)

    serving_single = np.zeros(ds.size, bool)
    serving_single[i1[single_case]] = True
    serving_pair = np.zeros(dp.size, bool)
    serving_pair[j2[pair_case]] = True
    keep_s = ~serving_single
    keep_p = ~serving_pair
    if plan.exclusion == "literal":
        # singles beyond min(R1, Z2) are all of them; pairs must clear R1 or R2
        rho_pairs = np.where(single_case, r1, r2)
        keep_p &= (dp > rho_pairs[tp]) & (dd > rho_pairs[tp])
    interference = (_sum_by_trial(np.where(keep_s, p_single, 0.0), ts, n)
                    + _sum_by_trial(np.where(keep_p, p_pair, 0.0), tp, n))
    return signal / (noise + interference)


def _chunk_baseline(rng, n, cfg, consts, plan):
    beta = cfg.beta
    pts, tr = _poisson_disk(rng, cfg.lam, plan.window_radius, n)
    d = np.hypot(pts[:, 0], pts[:, 1])
    noise = cfg.sigma2 + _far_field(cfg, consts, plan, cfg.lam * cfg.power)
    power = _single_power(rng, d, cfg)
    total = _sum_by_trial(power, tr, n)
    if isinstance(cfg.association, FixedTransmitter):
        signal = cfg.power * rng.standard_exponential(n) * cfg.association.r0 ** -beta
        return signal / (noise + total)
    i = _group_argmin(d, tr, n)
    signal = np.where(i >= 0, power[np.maximum(i, 0)], 0.0)
    return signal / (noise + total - signal)


def _chunk_nn(rng, n, cfg, consts, plan):
    beta = cfg.beta
    R = plan.window_radius
    pts, tr = _poisson_disk(rng, cfg.lam, R, n)
    d = np.hypot(pts[:, 0], pts[:, 1])
    # shift trials far apart so one tree clusters them all independently
    shifted = pts + np.column_stack([tr * 4.0 * R, np.zeros(tr.size)])
    partner = mutual_partner(shifted)
    idx = np.arange(d.size)
    single = partner < 0
    lead = partner > idx
    # random station order inside each pair (matters only for asymmetric schemes)
    a, b = idx[lead], partner[lead]
    swap = rng.random(a.size) < 0.5
    a, b = np.where(swap, b, a), np.where(swap, a, b)

    emit = (1 - consts.delta) * cfg.lam * cfg.power + consts.delta * cfg.lam / 2 * _pair_mean(
        cfg.interference_scheme, cfg)
    noise = cfg.sigma2 + _far_field(cfg, consts, plan, emit)

    p_single = np.where(single, _single_power(rng, d, cfg), 0.0)
    p_pair = cfg.interference_scheme.sample(d[a], d[b], cfg, rng)
    pair_trial = tr[a]
    assoc = cfg.association

    if isinstance(assoc, FixedTransmitter):
        signal = cfg.power * rng.standard_exponential(n) * assoc.r0 ** -beta
        interference = _sum_by_trial(p_single, tr, n) + _sum_by_trial(p_pair, pair_trial, n)
        return signal / (noise + interference)

    i = _group_argmin(d, tr, n)
    ok = i >= 0
    i = np.maximum(i, 0)
    mate = partner[i]
    paired = ok & (mate >= 0)
    signal = np.zeros(n)
    signal[ok & ~paired] = p_single[i[ok & ~paired]]
    signal[paired] = cfg.scheme.sample(d[i[paired]], d[mate[paired]], cfg, rng)
    # remove the serving cluster from the interference sums
    serving_pair = np.zeros(d.size, bool)
    serving_pair[i[paired]] = True
    serving_pair[mate[paired]] = True
    keep_pair = ~serving_pair[a]
    p_single_i = p_single.copy()
    p_single_i[i[ok & ~paired]] = 0.0
    interference = (_sum_by_trial(p_single_i, tr, n)
                    + _sum_by_trial(np.where(keep_pair, p_pair, 0.0), pair_trial, n))
    return signal / (noise + interference)


_CHUNKS = {
    Model.SUPERPOSITION: _chunk_superposition,
    Model.BASELINE: _chunk_baseline,
    Model.NN: _chunk_nn,
}


def sample_sinr(plan, cfg, consts, chunk):
    """SINR samples of one chunk (exposed for tests and diagnostics)."""
    plan = plan.resolved(cfg)
    start = chunk * plan.chunk_size
    n = min(plan.chunk_size, plan.trials - start)
    if n <= 0:
        return np.zeros(0)
    return _CHUNKS[plan.model](chunk_rng(plan.base_seed, chunk), n, cfg, consts, plan)


def _chunk_counts(plan, cfg, consts, chunk, thresholds):
    sinr = sample_sinr(plan, cfg, consts, chunk)
    # common random numbers: one SINR sample is compared with every threshold
    return (sinr[:, None] > thresholds[None, :]).sum(axis=0).astype(np.int64)


def _association_name(assoc):
    return "fixed" if isinstance(assoc, FixedTransmitter) else "closest"


def simulate_coverage(plan: SimulationPlan, cfg: NetworkConfig, consts, *, workers=None):
    """Estimate ``P(SINR > T)`` on the plan's threshold grid."""
    plan = plan.resolved(cfg)
    if not isinstance(cfg.association, (FixedTransmitter, ClosestCluster)):
        raise TypeError(f"unknown association {cfg.association!r}")
    thresholds = np.asarray(plan.thresholds)
    n_chunks = -(-plan.trials // plan.chunk_size)
    workers = min(workers or worker_count(), n_chunks)
    t0 = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda k: _chunk_counts(plan, cfg, consts, k, thresholds),
                                  range(n_chunks)))
    else:
        parts = [_chunk_counts(plan, cfg, consts, k, thresholds) for k in range(n_chunks)]
    successes = np.sum(parts, axis=0, dtype=np.int64)

    meta_warnings = []
    if plan.window_radius * math.sqrt(cfg.lam) < 10.0:
        meta_warnings.append("window holds fewer than ~300 base stations; "
                             "edge effects may bias the estimate")
    if not plan.far_field and cfg.beta < 3.0:
        meta_warnings.append("far-field correction disabled at beta < 3: "
                             "truncation bias may exceed the confidence interval")
    meta = {
        "plan": {k: (v.value if isinstance(v, Model) else v) for k, v in asdict(plan).items()},
        "runtime_s": time.perf_counter() - t0,
        "workers": workers,
        "warnings": meta_warnings,
    }
    return CoverageCurve.from_counts(
        thresholds, successes, plan.trials, model=plan.model.value,
        scheme=scheme_label(cfg) if plan.model is not Model.BASELINE else "none",
        association=_association_name(cfg.association), metadata=meta)


# -- pair statistics -----------------------------------------------------------

@dataclass
class PairStatistics:
    pair_fraction: float
    interior_points: int
    pair_distances: np.ndarray
    r2: np.ndarray
    z2: np.ndarray
    extra: dict = field(default_factory=dict)


def simulate_pair_statistics(cfg, consts, trials, rng, *, window_radius=None, guard_radius=None,
                             chunk_size=64, rz_samples=None):
    """Pairing statistics from repeated NN clusterings plus (R2, Z2) samples
    from the superposition model.

    Only points at distance below ``window_radius - guard_radius`` from the
    centre count towards the pair fraction; pair distances are collected for
    pairs whose midpoint is interior, which keeps them free of length bias.
    ``rz_samples`` superposition realisations (default ``trials``) each give
    one (R2, Z2) sample: the distance of the closest parent to the origin and
    of that parent's daughter.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rz_samples = trials if rz_samples is None else int(rz_samples)
    if rz_samples < 0:
        raise ValueError("rz_samples must be >= 0")
    R = window_radius if window_radius is not None else 15.0 / math.sqrt(cfg.lam)
    g = guard_radius if guard_radius is not None else 3.0 / math.sqrt(cfg.lam)
    if not R > g > 0:
        raise ValueError("need window_radius > guard_radius > 0")
    inner = R - g
    paired = 0
    interior = 0
    dists = []
    r2s, z2s = [], []
    # (R2, Z2) only needs parents near the origin
    sup_radius = min(R, 12.0 * consts.zeta)
    done = 0
    while done < trials:
        n = min(chunk_size, trials - done)
        pts, tr = _poisson_disk(rng, cfg.lam, R, n)
        partner = mutual_partner(pts + np.column_stack([tr * 4.0 * R, np.zeros(tr.size)]))
        rad = np.hypot(pts[:, 0], pts[:, 1])
        inside = rad < inner
        interior += int(inside.sum())
        paired += int((inside & (partner >= 0)).sum())
        idx = np.arange(pts.shape[0])
        lead = partner > idx
        a, b = idx[lead], partner[lead]
        mid = 0.5 * (pts[a] + pts[b])
        ok = np.hypot(mid[:, 0], mid[:, 1]) < inner
        dists.append(np.hypot(*(pts[a[ok]] - pts[b[ok]]).T))
        done += n

    done = 0
    while done < rz_samples:
        n = min(4096, rz_samples - done)
        parents, tp = _poisson_disk(rng, consts.delta * cfg.lam / 2, sup_radius, n)
        daughters = parents + consts.alpha * rng.standard_normal(parents.shape)
        dp = np.hypot(parents[:, 0], parents[:, 1])
        j = _group_argmin(dp, tp, n)
        j = j[j >= 0]
        r2s.append(dp[j])
        z2s.append(np.hypot(daughters[j, 0], daughters[j, 1]))
        done += n
    return PairStatistics(
        pair_fraction=paired / interior if interior else float("nan"),
        interior_points=interior,
        pair_distances=np.concatenate(dists),
        r2=np.concatenate(r2s) if r2s else np.zeros(0),
        z2=np.concatenate(z2s) if z2s else np.zeros(0),
        extra={"window_radius": R, "guard_radius": g},
    )
