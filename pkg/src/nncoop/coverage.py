"""Coverage probability of the superposition model.

Two association rules are covered. With a fixed transmitter at distance
``r0`` the serving signal is a single Rayleigh-faded link and the whole field
interferes. With closest-cluster association the user is served by whichever
is nearest among the closest single (distance R1), the closest parent (R2) and
that parent's daughter (Z2):

    P = int G(r) P(min(R2, Z2) > r) f_R1(r) dr
      + int int_{z>r} H(r, z) (1 - F_R1(r)) f(r, z) dz dr
      + int int_{z<r} K(r, z) (1 - F_R1(z)) f(r, z) dz dr,

where ``f`` is the joint density of (R2, Z2) and G, H, K are the conditional
success probabilities. Serving pairs enter through their exponential-mixture
tail ``sum c_i exp(-d_i T)``, so each conditional success probability is a
sum of interference transforms evaluated at ``T d_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ClosestCluster, FixedTransmitter, NetworkConfig
from .distributions import GAUSS_SPAN, RayleighLaw, joint_pdf_r2z2, min_r2z2_ccdf
from .interference import PairLtTable, lt_pairs, singles_exponent_exact
from .quadrature import QuadratureError, integrate


@dataclass(frozen=True)
class ParentClosest:
    """Serving pair found through its parent: both exclusion radii equal ``r``."""


@dataclass(frozen=True)
class DaughterClosest:
    """Serving pair found through its daughter: singles excluded within ``z``,
    pairs within the parent distance ``r``."""


@dataclass(frozen=True)
class CoverageQuery:
    thresholds: np.ndarray
    cfg: NetworkConfig
    consts: object

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.thresholds, float))
        if t.size == 0 or np.any(t <= 0) or np.any(np.diff(t) < 0):
            raise ValueError("thresholds must be positive and sorted ascending")
        object.__setattr__(self, "thresholds", t)


def db_to_linear(t_db):
    return 10.0 ** (np.asarray(t_db, float) / 10.0)


def linear_to_db(t):
    return 10.0 * np.log10(np.asarray(t, float))


def threshold_grid(t_min_db=-10.0, t_max_db=20.0, t_steps=31):
    if t_steps < 2:
        raise ValueError("t_steps must be >= 2")
    if not t_max_db > t_min_db:
        raise ValueError("t_max_db must exceed t_min_db")
    return db_to_linear(np.linspace(t_min_db, t_max_db, t_steps))


# -- interference transform helpers -------------------------------------------

def _singles_lt(s, rho, cfg, consts):
    if consts.delta >= 1.0:
        return np.ones(np.broadcast(s, rho).shape)
    j = singles_exponent_exact(s, rho, cfg)
    return np.exp(-2.0 * np.pi * cfg.lam * (1.0 - consts.delta) * j)


def _direct_pair_lt(cfg, consts):
    scheme = cfg.interference_scheme

    def pair_lt(s, rho):
        return lt_pairs(s, rho, scheme, cfg, consts)

    return pair_lt


def _success(c, d, T, rho1, rho2, cfg, consts, pair_lt):
    """``sum_i c_i exp(-T d_i sigma2) L1(T d_i; rho1) L2(T d_i; rho2)``.

    ``c`` and ``d`` have shape (m, n), ``rho1``/``rho2`` shape (n,), ``T``
    shape (k,). Returns shape (n, k).
    """
    s = d[:, :, None] * T[None, None, :]
    val = c[:, :, None] * np.exp(-s * cfg.sigma2) * _singles_lt(s, rho1[None, :, None], cfg, consts)
    if consts.delta > 0:
        rho = np.broadcast_to(rho2[None, :, None], s.shape)
        val = val * pair_lt(s, rho)
    return np.sum(val, axis=0)


def _serving_single(r, cfg):
    r = np.asarray(r, float)
    return np.ones((1,) + r.shape), (r ** cfg.beta / cfg.power)[None]


# -- fixed transmitter ----------------------------------------------------------

def coverage_fixed(T, r0, cfg, consts, *, pair_lt=None):
    """``P(SINR > T)`` for a serving BS at distance ``r0`` outside the field."""
    T = np.asarray(T, float)
    if np.any(T < 0):
        raise ValueError("thresholds must be >= 0")
    if not r0 > 0:
        raise ValueError("r0 must be > 0")
    pair_lt = pair_lt or _direct_pair_lt(cfg, consts)
    c, d = _serving_single(np.array([r0]), cfg)
    out = _success(c, d, T.ravel(), np.zeros(1), np.zeros(1), cfg, consts, pair_lt)
    return out[0].reshape(T.shape)


# -- conditional success probabilities -------------------------------------------

def cond_success_single(r, T, cfg, consts, *, pair_lt=None):
    """``G(r)``: serving single at ``r``, every interferer beyond ``r``.

    ``r`` has shape (n,) and ``T`` shape (k,); the result has shape (n, k).
    """
    r = np.atleast_1d(np.asarray(r, float))
    T = np.atleast_1d(np.asarray(T, float))
    if np.any(r <= 0):
        raise ValueError("r must be > 0")
    pair_lt = pair_lt or _direct_pair_lt(cfg, consts)
    c, d = _serving_single(r, cfg)
    return _success(c, d, T, r, r, cfg, consts, pair_lt)


def cond_success_pair(r, z, T, scheme, cfg, consts, exclusion, *, pair_lt=None):
    """``H(r, z)`` (parent closest) or ``K(r, z)`` (daughter closest).

    ``r`` is the parent distance and ``z`` the daughter distance, both shape
    (n,); ``T`` has shape (k,). Returns shape (n, k).
    """
    r, z = np.broadcast_arrays(np.atleast_1d(np.asarray(r, float)),
                               np.atleast_1d(np.asarray(z, float)))
    T = np.atleast_1d(np.asarray(T, float))
    if np.any(r <= 0) or np.any(z <= 0):
        raise ValueError("r and z must be > 0")
    c, d = scheme.mixture(cfg).coefficients(r, z)
    pair_lt = pair_lt or _direct_pair_lt(cfg, consts)
    if isinstance(exclusion, ParentClosest):
        rho1 = r
    elif isinstance(exclusion, DaughterClosest):
        rho1 = z
    else:
        raise TypeError(f"unknown exclusion rule {exclusion!r}")
    return _success(np.asarray(c, float), np.asarray(d, float), T, rho1, r, cfg, consts, pair_lt)


# -- closest cluster ---------------------------------------------------------------

def _radial_cutoff(consts):
    # beyond this radius every term's density is below exp(-21)
    scales = [consts.xi] + ([consts.z2_scale] if consts.delta > 0 else [])
    return 6.5 * max(scales)


def build_pair_table(scheme, cfg, consts, T_max, *, r_max=None, **kwargs):
    """Pair transform table covering every argument the closest-cluster
    integral can produce for thresholds up to ``T_max``."""
    r_max = _radial_cutoff(consts) if r_max is None else r_max
    far = r_max + GAUSS_SPAN * consts.alpha
    s_max = 1.05 * T_max * 2.0 * far ** cfg.beta / cfg.power
    return PairLtTable(cfg.interference_scheme, cfg, consts, rho_max=r_max, s_max=s_max, **kwargs)


@dataclass
class CoverageTerms:
    """The three association terms of the closest-cluster coverage."""

    single: np.ndarray
    parent: np.ndarray
    daughter: np.ndarray

    @property
    def total(self):
        return self.single + self.parent + self.daughter


def association_masses(consts, *, atol=1e-9):
    """``P(R1 smallest), P(R2 smallest), P(Z2 smallest)``.

    These are the coverage terms with G = H = K = 1, so they must sum to one.
    """
    terms = _closest_terms(lambda r: np.ones((r.size, 1)),
                           lambda r, z: np.ones((r.size, 1)),
                           lambda r, z: np.ones((r.size, 1)),
                           consts, atol=atol)
    return tuple(float(v[0]) for v in (terms.single, terms.parent, terms.daughter))


def _closest_terms(g, h, k, consts, *, atol):
    """Integrate the three association terms given the conditional success
    functions ``g(r)``, ``h(r, z)``, ``k(r, z)`` (each returning (n, S))."""
    r_max = _radial_cutoff(consts)
    span = GAUSS_SPAN * consts.alpha
    r1 = RayleighLaw(consts.xi)
    third = atol / 3.0

    def first(r, _own):
        w = r1.pdf(r)
        if consts.delta > 0:
            w = w * min_r2z2_ccdf(r, consts, atol=1e-12, rtol=1e-9)
        return g(r) * w[:, None]

    try:
        single, _ = integrate(first, [0.0], [r_max], atol=third, rtol=1e-9,
                              label="coverage (single closest)")
    except QuadratureError as exc:
        raise QuadratureError(f"single-closest term: {exc}") from exc
    if consts.delta <= 0:
        zero = np.zeros_like(single[0])
        return CoverageTerms(single[0], zero, zero)

    zeta, alpha = consts.zeta, consts.alpha

    def parent_outer(r, _own):
        lo = r
        hi = r + span

        def inner(z, o):
            w = joint_pdf_r2z2(r[o], z, zeta, alpha) * r1.sf(r[o])
            return h(r[o], z) * w[:, None]

        val, _ = integrate(inner, lo, hi, atol=third / (10 * r_max), rtol=1e-9,
                           label="coverage (parent closest, inner)")
        return val

    def daughter_outer(r, _own):
        lo = np.maximum(0.0, r - span)
        hi = r

        def inner(z, o):
            w = joint_pdf_r2z2(r[o], z, zeta, alpha) * r1.sf(z)
            return k(r[o], z) * w[:, None]

        val, _ = integrate(inner, lo, hi, atol=third / (10 * r_max), rtol=1e-9,
                           label="coverage (daughter closest, inner)")
        return val

    out = []
    for name, fn in (("parent-closest", parent_outer), ("daughter-closest", daughter_outer)):
        try:
            v, _ = integrate(fn, [0.0], [r_max], atol=third, rtol=1e-9, label=f"coverage ({name})")
        except QuadratureError as exc:
            raise QuadratureError(f"{name} term: {exc}") from exc
        out.append(v[0])
    return CoverageTerms(single[0], out[0], out[1])


def coverage_closest_terms(T, scheme, cfg, consts, *, table=None, use_table=True, atol=1e-4):
    T = np.atleast_1d(np.asarray(T, float))
    if np.any(T <= 0):
        raise ValueError("thresholds must be > 0")
    if consts.delta > 0 and not scheme.analytic:
        from .signals import UnsupportedSchemeError

        raise UnsupportedSchemeError(f"{scheme.name}: closest-cluster coverage is simulation-only")
    if consts.delta > 0 and use_table:
        table = table or build_pair_table(scheme, cfg, consts, T.max())
        pair_lt = table
    else:
        pair_lt = _direct_pair_lt(cfg, consts)

    def g(r):
        return cond_success_single(np.maximum(r, 1e-300), T, cfg, consts, pair_lt=pair_lt)

    def h(r, z):
        return cond_success_pair(r, z, T, scheme, cfg, consts, ParentClosest(), pair_lt=pair_lt)

    def k(r, z):
        return cond_success_pair(r, np.maximum(z, 1e-300), T, scheme, cfg, consts,
                                 DaughterClosest(), pair_lt=pair_lt)

    return _closest_terms(g, h, k, consts, atol=atol)


def coverage_closest(T, scheme, cfg, consts, **kwargs):
    """Closest-cluster coverage at every threshold in ``T``.

    By default the pairs' interference transform is read from a
    :class:`PairLtTable` (interpolation error a few 1e-6); ``use_table=False``
    evaluates it directly, which is accurate but slow.
    """
    T = np.asarray(T, float)
    return np.clip(coverage_closest_terms(T.ravel(), scheme, cfg, consts, **kwargs).total,
                   0.0, 1.0).reshape(T.shape)


def coverage(query: CoverageQuery, **kwargs):
    """Dispatch on the association rule of ``query.cfg``."""
    cfg = query.cfg
    assoc = cfg.association
    if isinstance(assoc, FixedTransmitter):
        return coverage_fixed(query.thresholds, assoc.r0, cfg, query.consts)
    if isinstance(assoc, ClosestCluster):
        return coverage_closest(query.thresholds, cfg.scheme, cfg, query.consts, **kwargs)
    raise TypeError(f"unknown association {assoc!r}")


# -- non-cooperative baseline ------------------------------------------------------

def baseline_closest_closed_form(T, beta):
    """Nearest-BS coverage of a PPP without noise: ``1 / (1 + rho(T, beta))`` with
    ``rho = T^(2/beta) int_{T^(-2/beta)}^inf du / (1 + u^(beta/2))``.

    The integral is ``(T^(-2/beta))^(1-beta/2) / (beta/2 - 1) * 2F1(1, 1-2/beta; 2-2/beta; -T)``.
    """
    from scipy.special import hyp2f1

    T = np.asarray(T, float)
    a = beta / 2.0
    u0 = T ** (-1.0 / a)
    tail = u0 ** (1.0 - a) / (a - 1.0) * hyp2f1(1.0, 1.0 - 1.0 / a, 2.0 - 1.0 / a, -u0 ** (-a))
    return 1.0 / (1.0 + T ** (1.0 / a) * tail)

