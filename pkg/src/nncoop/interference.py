"""Laplace transforms of the singles' and pairs' interference fields.

Both are Poisson shot noises, so

    L1(s; rho) = exp(-2 pi lam (1 - delta) J1(s, rho)),
    J1(s, rho) = int_rho^inf (1 - r^b / (s p + r^b)) r dr,

    L2(s; rho) = exp(-pi lam delta J2(s, rho)),
    J2(s, rho) = int_rho^inf E[(1 - exp(-s g(r, Z_r))) 1{Z_r > rho}] r dr.

A pair whose daughter falls inside ``rho`` is dropped entirely, as is a pair
whose parent does: that is the exclusion convention the coverage formulas use.
A dropped pair contributes nothing to the exponent. (Writing the integrand as
``1 - E[exp(-s g) 1{Z_r > rho}]`` would instead charge it a full unit, which
is the transform of the field times the indicator that no such pair exists.)

``J2`` is a nested integral. :func:`pair_exponent` evaluates it for a whole
vector of ``s`` per exclusion radius on shared nodes; :class:`PairLtTable`
tabulates it on a (sqrt rho, log s) grid for the closest-cluster coverage integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.interpolate import RectBivariateSpline

from .distributions import GAUSS_SPAN, rice_pdf
from .quadrature import integrate
from .signals import UnsupportedSchemeError


def _tail_power(beta):
    # integrands decay like r**(1 - beta); this map makes them regular at t = 1
    return 2.0 / (beta - 2.0)


# -- singles ------------------------------------------------------------------

def singles_exponent(s, rho, cfg, *, atol=1e-14, rtol=1e-11):
    """``J1(s, rho)`` by adaptive quadrature."""
    s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
    shape = s.shape
    s, rho = s.ravel(), rho.ravel()
    if np.any(s < 0) or np.any(rho < 0):
        raise ValueError("singles_exponent: s and rho must be >= 0")
    out = np.zeros(s.size)
    live = np.flatnonzero(s > 0)
    if live.size:
        sp = s[live] * cfg.power
        rho_l = rho[live]
        beta = cfg.beta

        def f(r, own):
            return sp[own] * r / (sp[own] + r ** beta)

        scale = np.maximum(rho_l, sp ** (1 / beta))
        out[live], _ = integrate(f, rho_l, np.full(live.size, np.inf), scale=scale,
                                 tail_power=_tail_power(beta), atol=atol, rtol=rtol,
                                 label="singles LT")
    return out.reshape(shape)


def singles_exponent_exact(s, rho, cfg):
    """``J1(s, rho)`` in closed form.

    With ``c = 1 - 2/beta`` and ``t = s p / (s p + rho**beta)``,

        J1 = (s p)**(2/beta) * pi / (beta sin(2 pi / beta)) * I_t(c, 1 - c),

    ``I_t`` being the regularised incomplete beta function. At ``rho = 0`` this
    is the cosecant form of the full-plane transform.
    """
    s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
    beta = cfg.beta
    sp = s * cfg.power
    c = 1.0 - 2.0 / beta
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(rho > 0, sp / (sp + rho ** beta), 1.0)
    full = np.pi / (beta * math.sin(2 * math.pi / beta))
    out = sp ** (2.0 / beta) * full * special.betainc(c, 1.0 - c, t)
    return np.where(sp > 0, out, 0.0)


def lt_singles(s, rho, cfg, consts, *, exact=False):
    """Laplace transform of the singles' interference outside ``rho``."""
    j = singles_exponent_exact(s, rho, cfg) if exact else singles_exponent(s, rho, cfg)
    return np.exp(-2.0 * np.pi * cfg.lam * (1.0 - consts.delta) * j)


def lt_singles_closed(s, cfg, consts):
    """Full-plane singles transform, ``exp(-lam (1-delta) 2 pi^2 (s p)^(2/beta) csc(2 pi/beta) / beta)``."""
    if not cfg.beta > 2:
        raise ValueError("lt_singles_closed needs beta > 2")
    s = np.asarray(s, float)
    expo = (cfg.lam * (1.0 - consts.delta) * 2.0 * np.pi ** 2 * (s * cfg.power) ** (2.0 / cfg.beta)
            / cfg.beta / math.sin(2.0 * math.pi / cfg.beta))
    return np.exp(-expo)


# -- pairs --------------------------------------------------------------------

def pair_exponent(s, rho, scheme, cfg, consts, *, atol=1e-12, rtol=1e-9, chunk=4):
    """``J2`` for a matrix of transform arguments.

    Parameters
    ----------
    s : array, shape (B, S)
        Transform arguments; row ``j`` shares the exclusion radius ``rho[j]``.
    rho : array, shape (B,)

    Returns
    -------
    array, shape (B, S)
    """
    if not scheme.analytic:
        raise UnsupportedSchemeError(f"{scheme.name}: pair interference transform is simulation-only")
    s = np.atleast_2d(np.asarray(s, float))
    rho = np.atleast_1d(np.asarray(rho, float))
    if s.shape[0] != rho.size:
        raise ValueError("s must have one row per rho")
    if np.any(s < 0) or np.any(rho < 0):
        raise ValueError("pair_exponent: s and rho must be >= 0")
    out = np.empty_like(s)
    for start in range(0, rho.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = _pair_exponent_block(s[sl], rho[sl], scheme, cfg, consts.alpha, atol, rtol)
    return out


# Beyond the cut radius the pair term is linear in s to this relative accuracy.
_LINEAR_TAIL = 1e-7


def _pair_exponent_block(s, rho, scheme, cfg, alpha, atol, rtol):
    beta = cfg.beta
    span = GAUSS_SPAN * alpha
    inner_atol, inner_rtol = atol / 10, rtol / 10

    # geometric mean of the positive arguments of each row (1 for an all-zero row)
    pos = s > 0
    log_sum = np.sum(np.log(np.where(pos, s, 1.0)), axis=1)
    typical = np.exp(log_sum / np.maximum(pos.sum(axis=1), 1))
    scale = np.maximum(np.maximum(rho, alpha), (typical * cfg.power) ** (1 / beta))
    # Cut radius: far enough that 1 - E exp(-s g) = s E g to _LINEAR_TAIL and
    # that the Gaussian offset is negligible against the distance. The nested
    # integral cannot go much further anyway: z - r would drown in roundoff.
    s_top = np.max(s, axis=1) * cfg.power
    cut = np.maximum(1e3 * scale, (s_top / _LINEAR_TAIL) ** (1 / beta))

    def outer(v, own):
        # r = rho + L (e^v - 1)
        ev = np.exp(v)
        r = rho[own] + scale[own] * (ev - 1.0)
        jac = scale[own] * ev
        # daughters inside the exclusion disc drop their pair: no contribution
        lo_b = np.maximum(np.maximum(rho[own], r - span), 0.0)
        hi_b = np.maximum(r + span, lo_b)
        s_own = s[own]

        def g(z, o):
            return (scheme.one_minus_lt(s_own[o], r[o][:, None], z[:, None], cfg)
                    * rice_pdf(z, r[o], alpha)[:, None])

        outside, _ = integrate(g, lo_b, hi_b, atol=inner_atol, rtol=inner_rtol,
                               label="pair LT (outside)")
        return (r * jac)[:, None] * outside

    v_max = np.log1p((cut - rho) / scale)
    val, _ = integrate(outer, np.zeros(rho.size), v_max, atol=atol, rtol=rtol,
                       initial=8, label="pair LT")
    # homogeneity: E g(r, r) = m r**-beta
    m = float(np.asarray(scheme.mean_signal(cut[0], cut[0], cfg))) * cut[0] ** beta
    tail = s * m * (cut ** (2.0 - beta) / (beta - 2.0))[:, None]
    return val + tail


def lt_pairs(s, rho, scheme, cfg, consts, **kwargs):
    """Laplace transform of the pairs' interference outside ``rho`` (broadcasting)."""
    s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
    shape = s.shape
    s_flat, rho_flat = s.ravel(), rho.ravel()
    uniq, inv = np.unique(rho_flat, return_inverse=True)
    inv = inv.ravel()
    counts = np.bincount(inv, minlength=uniq.size)
    # position of each entry within its rho group
    order = np.argsort(inv, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    slot = np.empty(s_flat.size, dtype=int)
    slot[order] = np.arange(s_flat.size) - starts[inv[order]]
    grid = np.zeros((uniq.size, counts.max()))
    grid[inv, slot] = s_flat
    j = pair_exponent(grid, uniq, scheme, cfg, consts, **kwargs)[inv, slot]
    return np.exp(-np.pi * cfg.lam * consts.delta * j).reshape(shape)


@dataclass(frozen=True)
class InterferenceLtQuery:
    s: float
    rho_singles: float
    rho_pairs: float
    scheme: object
    cfg: object
    consts: object

    def __post_init__(self):
        if self.s < 0 or self.rho_singles < 0 or self.rho_pairs < 0:
            raise ValueError("s and exclusion radii must be >= 0")


def lt_total(query: InterferenceLtQuery):
    """Transform of the total interference; the two fields are independent."""
    q = query
    return (lt_singles(q.s, q.rho_singles, q.cfg, q.consts)
            * lt_pairs(q.s, q.rho_pairs, q.scheme, q.cfg, q.consts))


# -- tabulated pair transform ----------------------------------------------------

class PairLtTable:
    """``J2(s, rho)`` tabulated on a (sqrt rho, log s) grid.

    The grid is uniform in ``sqrt(rho)`` because ``J2`` bends sharply near
    ``rho = 0`` when ``s`` is small. ``log J2`` is interpolated with a bicubic
    spline. Arguments below ``s_min`` are clamped to it; above ``s_max`` they
    are computed directly.
    """

    def __init__(self, scheme, cfg, consts, *, rho_max, s_max, s_min=1e-9,
                 rho_points=60, per_decade=6, atol=1e-12, rtol=1e-6):
        self.scheme = scheme
        self.cfg = cfg
        self.consts = consts
        self.rho_max = float(rho_max)
        self.u = np.linspace(0.0, math.sqrt(rho_max), max(int(rho_points), 4))
        self.rho = self.u ** 2
        n_s = max(int(math.ceil(per_decade * math.log10(s_max / s_min))), 3) + 1
        self.log_s = np.linspace(math.log(s_min), math.log(s_max), n_s)
        s_grid = np.broadcast_to(np.exp(self.log_s), (self.rho.size, n_s))
        self.values = pair_exponent(s_grid, self.rho, scheme, cfg, consts, atol=atol, rtol=rtol)
        self._spline = RectBivariateSpline(self.u, self.log_s, np.log(self.values), s=0)

    @property
    def s_min(self):
        return math.exp(self.log_s[0])

    @property
    def s_max(self):
        return math.exp(self.log_s[-1])

    def exponent(self, s, rho):
        s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
        shape = s.shape
        s, rho = s.ravel(), rho.ravel()
        if np.any(rho < 0) or np.any(rho > self.rho_max * (1 + 1e-12)):
            raise ValueError("rho outside the tabulated range")
        out = np.empty(s.size)
        over = s > self.s_max
        inside = ~over
        if inside.any():
            u = np.sqrt(np.minimum(rho[inside], self.rho_max))
            x = np.log(np.maximum(s[inside], self.s_min))
            out[inside] = np.exp(self._spline.ev(u, x))
        if over.any():
            grid = s[over][:, None]
            out[over] = pair_exponent(grid, rho[over], self.scheme, self.cfg, self.consts)[:, 0]
        return out.reshape(shape)

    def __call__(self, s, rho):
        return np.exp(-np.pi * self.cfg.lam * self.consts.delta * self.exponent(s, rho))
