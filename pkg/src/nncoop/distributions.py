"""Probability laws of the model and the scaled Bessel function they need.

Every density here pairs ``I0`` with a dominating Gaussian factor, so ``I0`` is
only ever exposed in exponentially scaled form, ``exp(-x) I0(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate

# Chebyshev expansions generated by scripts/gen_i0e_coefficients.py.
_I0E_SMALL = np.array([
    3.383976372047380425e-1,
    -3.0468267234319839868e-1,
    1.7162090152220877535e-1,
    -9.4901097048047644421e-2,
    4.9305284239670708488e-2,
    -2.3737414805899468816e-2,
    1.0546460394594998318e-2,
    -4.3243099950505759443e-3,
    1.6394756169413357984e-3,
    -5.7637557453858236588e-4,
    1.8850288509584165573e-4,
    -5.754195010082103704e-5,
    1.6448448070728897089e-5,
    -4.4167383584587505636e-6,
    1.1173875391201037182e-6,
    -2.6707938539406117339e-7,
    6.0469950225419189493e-8,
    -1.3000250099862480421e-8,
    2.6598237246823866503e-9,
    -5.1897956016352629067e-10,
    9.6758090353732369122e-11,
    -1.7268262914415557072e-11,
    2.9550526631296398346e-12,
    -4.8564467831119294609e-13,
    7.6761854986049356169e-14,
    -1.1685332877993451681e-14,
    1.7153912855551330306e-15,
    -2.4312798465479546936e-16,
    3.3307945188222380978e-17,
    -4.4153416464793393795e-18,
])
_I0E_LARGE = np.array([
    4.022452055070544158e-1,
    3.3691164782556940899e-3,
    6.8897583469168239843e-5,
    2.891370520834756483e-6,
    2.0489185894690637418e-7,
    2.2666689904981780646e-8,
    3.3962320257083863452e-9,
    4.9406023882249695891e-10,
    1.1889147107846438342e-11,
    -3.1499165279632413645e-11,
    -1.3215811840447713119e-11,
    -1.7941785315068061178e-12,
    7.1801244513836662337e-13,
    3.8527783827421427011e-13,
    1.5400862175214098269e-14,
    -4.1505693472872220866e-14,
    -9.5548466988283076487e-15,
    3.8116806693526224207e-15,
    1.7725601330565263836e-15,
    -3.4254856196772191346e-16,
    -2.8276239805165834849e-16,
    3.4612228676974610931e-17,
    4.465621420296759999e-17,
    -4.8305044859441820713e-18,
    -7.2331804878747539546e-18,
    9.9214754121736985989e-19,
    1.1936508908459820855e-18,
])


def _clenshaw(t, coefs):
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    t2 = 2.0 * t
    for c in coefs[:0:-1]:
        b1, b2 = t2 * b1 - b2 + c, b1
    return t * b1 - b2 + coefs[0]


def bessel_i0_scaled(x):
    """``exp(-x) * I0(x)`` for ``x >= 0``.

    Chebyshev expansion of ``exp(-x) I0(x)`` on [0, 8] and of
    ``sqrt(x) exp(-x) I0(x)`` in ``16/x`` above 8.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_i0_scaled requires x >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = x <= 8.0
    if small.any():
        out[small] = _clenshaw(x[small] / 4.0 - 1.0, _I0E_SMALL)
    large = ~small
    if large.any():
        xl = x[large]
        out[large] = _clenshaw(16.0 / xl - 1.0, _I0E_LARGE) / np.sqrt(xl)
    return out[0] if scalar else out


def rice_pdf(z, nu, alpha):
    """Density of the distance ``|nu + alpha * N|`` with ``N`` a standard planar Gaussian."""
    z = np.asarray(z, dtype=float)
    nu = np.asarray(nu, dtype=float)
    a2 = alpha * alpha
    zc = np.maximum(z, 0.0)
    dens = zc / a2 * np.exp(-((zc - nu) ** 2) / (2 * a2)) * bessel_i0_scaled(zc * nu / a2)
    return np.where(z >= 0, dens, 0.0)


def joint_pdf_r2z2(r, z, zeta, alpha):
    """Joint density of the closest parent's distance and its daughter's distance."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    a2 = alpha * alpha
    rc = np.maximum(r, 0.0)
    zc = np.maximum(z, 0.0)
    dens = (rc * zc / (a2 * zeta * zeta)
            * np.exp(-((zc - rc) ** 2) / (2 * a2) - rc * rc / (2 * zeta * zeta))
            * bessel_i0_scaled(rc * zc / a2))
    return np.where((r >= 0) & (z >= 0), dens, 0.0)


@dataclass(frozen=True)
class RayleighLaw:
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"Rayleigh scale must be > 0, got {self.scale}")

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        a2 = self.scale ** 2
        return np.where(r >= 0, r / a2 * np.exp(-r * r / (2 * a2)), 0.0)

    def cdf(self, r):
        r = np.maximum(np.asarray(r, dtype=float), 0.0)
        return -np.expm1(-r * r / (2 * self.scale ** 2))

    def sf(self, r):
        r = np.maximum(np.asarray(r, dtype=float), 0.0)
        return np.exp(-r * r / (2 * self.scale ** 2))

    def sample(self, rng, size=None):
        u = rng.random(size)
        # 1 - u lies in (0, 1], so the log is finite
        return self.scale * np.sqrt(-2.0 * np.log1p(-u))

    @property
    def mean(self):
        return self.scale * math.sqrt(math.pi / 2)

    @property
    def median(self):
        return self.scale * math.sqrt(2 * math.log(2))


@dataclass(frozen=True)
class RiceLaw:
    nu: float
    scale: float

    def __post_init__(self):
        if self.nu < 0 or not self.scale > 0:
            raise ValueError(f"invalid Rice parameters nu={self.nu}, scale={self.scale}")

    def pdf(self, z):
        return rice_pdf(z, self.nu, self.scale)

    def sample(self, rng, size=None):
        gx = rng.standard_normal(size)
        gy = rng.standard_normal(size)
        return np.hypot(self.nu + self.scale * gx, self.scale * gy)


# The Rice law of scale alpha puts mass <= exp(-t**2/2) outside nu +- t*alpha.
GAUSS_SPAN = 10.0


def joint_cdf_r2z2(r, z, consts, *, atol=1e-13, rtol=1e-10):
    """``P(R2 <= r, Z2 <= z)`` by iterated quadrature of the joint density."""
    r, z = np.broadcast_arrays(np.atleast_1d(np.asarray(r, float)),
                               np.atleast_1d(np.asarray(z, float)))
    r = r.ravel()
    z = z.ravel()
    zeta, alpha = consts.zeta, consts.alpha

    def outer(u, own):
        zc = z[own]
        lo = np.maximum(0.0, u - GAUSS_SPAN * alpha)
        hi = np.minimum(zc, u + GAUSS_SPAN * alpha)
        hi = np.maximum(hi, lo)
        inner, _ = integrate(lambda v, o: joint_pdf_r2z2(u[o], v, zeta, alpha),
                             lo, hi, atol=atol / 10, rtol=rtol / 10, label="joint cdf (inner)")
        return inner

    val, _ = integrate(outer, np.zeros_like(r), r, atol=atol, rtol=rtol, label="joint cdf")
    return np.clip(val, 0.0, 1.0)


def min_r2z2_ccdf(r, consts, *, atol=1e-13, rtol=1e-10):
    """``P(min(R2, Z2) > r) = 1 - F_R2(r) - F_Z2(r) + F_{R2,Z2}(r, r)``."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r < 0):
        raise ValueError("min_r2z2_ccdf requires r >= 0")
    f_r2 = RayleighLaw(consts.zeta).cdf(r)
    f_z2 = RayleighLaw(consts.z2_scale).cdf(r)
    out = np.ones_like(r)
    pos = r > 0
    if pos.any():
        joint = joint_cdf_r2z2(r[pos], r[pos], consts, atol=atol, rtol=rtol)
        out[pos] = 1.0 - f_r2[pos] - f_z2[pos] + joint
    out = np.clip(out, 0.0, 1.0)
    return out[0] if scalar else out
