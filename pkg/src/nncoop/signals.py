"""Received signals of single stations and cooperating pairs.

All fading is unit-mean exponential, so a station at distance ``r`` delivers an
exponential signal of rate ``r**beta / p``. Pair schemes combine the two
station signals ``X_r`` and ``X_z``:

    nsc   X_r + X_z                                 (non-coherent sum)
    off   X_r with probability q, else X_z          (one station on)
    max   max(X_r, X_z)                             (strongest station serves)
    ph    |sqrt(X_r) e^{i th_r} + sqrt(X_z) e^{i th_z}|^2   (phase combining)

The first three, and any user-supplied :class:`ExpMixture`, have tails
``sum_i c_i(r, z) exp(-d_i(r, z) T)``; ``ph`` is simulation-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class UnsupportedSchemeError(ValueError):
    """The scheme has no closed-form tail or Laplace transform."""


def rates(r, z, cfg):
    """Exponential rates ``(r**beta / p, z**beta / p)`` of the two station signals."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return r ** cfg.beta / cfg.power, z ** cfg.beta / cfg.power


def single_signal_lt(s, r, cfg):
    """``E exp(-s p h / r**beta) = r**beta / (s p + r**beta)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("single_signal_lt: r must be > 0 (path loss is singular at 0)")
    rb = r ** cfg.beta
    return rb / (np.asarray(s, dtype=float) * cfg.power + rb)


# -- exponential mixtures ------------------------------------------------------

@dataclass(frozen=True)
class ExpMixture:
    """Tail ``P(g > T) = sum_i c_i(r, z) exp(-d_i(r, z) T)``.

    ``terms`` holds ``(c, d)`` pairs of vectorised callables of ``(r, z)``.
    """

    terms: tuple

    def coefficients(self, r, z):
        r, z = np.broadcast_arrays(np.asarray(r, float), np.asarray(z, float))
        c = np.stack([np.broadcast_to(np.asarray(ci(r, z), float), r.shape) for ci, _ in self.terms])
        d = np.stack([np.broadcast_to(np.asarray(di(r, z), float), r.shape) for _, di in self.terms])
        return c, d

    def _terms(self, x, r, z):
        x, r, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(r, float), np.asarray(z, float))
        c, d = self.coefficients(r, z)
        return x, c, d

    def ccdf(self, T, r, z):
        T, c, d = self._terms(T, r, z)
        return np.sum(c * np.exp(-d * T), axis=0)

    def lt(self, s, r, z):
        s, c, d = self._terms(s, r, z)
        return np.sum(c * d / (s + d), axis=0)

    def one_minus_lt(self, s, r, z):
        s, c, d = self._terms(s, r, z)
        return np.sum(c * s / (s + d), axis=0)

    def validate(self, *, n_points=20, seed=0, r_range=(0.05, 20.0), atol=1e-9):
        """Check numerically that the mixture is a tail function.

        The check runs on a log-spaced grid of 50 thresholds plus ``T = 0`` at
        ``n_points`` random ``(r, z)``: value 1 at 0, values in [0, 1],
        nonincreasing in ``T``, positive rates (so the tail vanishes).
        """
        rng = np.random.default_rng(seed)
        r = np.exp(rng.uniform(*np.log(r_range), n_points))
        z = np.exp(rng.uniform(*np.log(r_range), n_points))
        c, d = self.coefficients(r, z)
        if not np.all(d > 0):
            raise ValueError("mixture rates d_i must be positive")
        if not np.all(np.isfinite(c)):
            raise ValueError("mixture weights c_i must be finite")
        T = np.concatenate([[0.0], np.logspace(-6, 6, 50) / np.min(d)])
        tail = np.sum(c[:, None, :] * np.exp(-d[:, None, :] * T[None, :, None]), axis=0)
        if not np.allclose(tail[0], 1.0, atol=atol, rtol=0):
            raise ValueError(f"mixture tail at T=0 is {tail[0].min()}..{tail[0].max()}, not 1")
        if np.any(tail < -atol) or np.any(tail > 1 + atol):
            raise ValueError("mixture tail leaves [0, 1]")
        if np.any(np.diff(tail, axis=0) > atol):
            raise ValueError("mixture tail is not nonincreasing in T")
        return self


# -- schemes -------------------------------------------------------------------

_NSC_MIN_GAP = 1e-7


class CooperationScheme:
    """Base class; subclasses override what they support."""

    name = "scheme"
    analytic = True

    def mixture(self, cfg) -> ExpMixture:
        raise UnsupportedSchemeError(f"{self.name} has no exponential-mixture tail")

    def ccdf(self, T, r, z, cfg):
        return self.mixture(cfg).ccdf(T, r, z)

    def lt(self, s, r, z, cfg):
        return self.mixture(cfg).lt(s, r, z)

    def one_minus_lt(self, s, r, z, cfg):
        return self.mixture(cfg).one_minus_lt(s, r, z)

    def sample(self, r, z, cfg, rng):
        raise NotImplementedError

    def mean_signal(self, r, z, cfg):
        """``E g(r, z)``."""
        c, d = self.mixture(cfg).coefficients(r, z)
        return np.sum(c / d, axis=0)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class NSC(CooperationScheme):
    name = "nsc"

    def ccdf(self, T, r, z, cfg):
        a, b = rates(r, z, cfg)
        T = np.asarray(T, dtype=float)
        a, b, T = np.broadcast_arrays(a, b, T)
        near = np.abs(a - b) < 1e-9 * np.maximum(a, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (a * np.exp(-b * T) - b * np.exp(-a * T)) / (a - b)
        limit = (1.0 + a * T) * np.exp(-a * T)
        return np.where(near, limit, out)

    def mixture(self, cfg):
        def gap(r, z):
            a, b = rates(r, z, cfg)
            # keep the two rates apart so the weights stay finite
            b = np.where(np.abs(a - b) < _NSC_MIN_GAP * np.maximum(a, b),
                         a * (1.0 - _NSC_MIN_GAP), b)
            return a, b

        def c1(r, z):
            a, b = gap(r, z)
            return a / (a - b)

        def c2(r, z):
            a, b = gap(r, z)
            return -b / (a - b)

        return ExpMixture(((c1, lambda r, z: gap(r, z)[1]), (c2, lambda r, z: gap(r, z)[0])))

    def lt(self, s, r, z, cfg):
        a, b = rates(r, z, cfg)
        return a / (s + a) * b / (s + b)

    def one_minus_lt(self, s, r, z, cfg):
        a, b = rates(r, z, cfg)
        return s / (s + a) + a / (s + a) * s / (s + b)

    def sample(self, r, z, cfg, rng):
        a, b = rates(r, z, cfg)
        shape = np.broadcast(a, b).shape
        return rng.standard_exponential(shape) / a + rng.standard_exponential(shape) / b

    def mean_signal(self, r, z, cfg):
        a, b = rates(r, z, cfg)
        return 1 / a + 1 / b


@dataclass(frozen=True)
class Off(CooperationScheme):
    q: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"OFF probability q must lie in [0, 1], got {self.q}")

    @property
    def name(self):
        return f"off:{self.q:g}"

    def mixture(self, cfg):
        q = self.q
        return ExpMixture((
            (lambda r, z: np.full(np.broadcast(r, z).shape, q), lambda r, z: rates(r, z, cfg)[0]),
            (lambda r, z: np.full(np.broadcast(r, z).shape, 1 - q), lambda r, z: rates(r, z, cfg)[1]),
        ))

    def ccdf(self, T, r, z, cfg):
        a, b = rates(r, z, cfg)
        return self.q * np.exp(-a * T) + (1 - self.q) * np.exp(-b * T)

    def lt(self, s, r, z, cfg):
        a, b = rates(r, z, cfg)
        return self.q * a / (s + a) + (1 - self.q) * b / (s + b)

    def one_minus_lt(self, s, r, z, cfg):
        a, b = rates(r, z, cfg)
        return self.q * s / (s + a) + (1 - self.q) * s / (s + b)

    def sample(self, r, z, cfg, rng):
        a, b = rates(r, z, cfg)
        shape = np.broadcast(a, b).shape
        on_r = rng.random(shape) < self.q
        h = rng.standard_exponential(shape)
        return np.where(on_r, h / a, h / b)

    def mean_signal(self, r, z, cfg):
        a, b = rates(r, z, cfg)
        return self.q / a + (1 - self.q) / b


@dataclass(frozen=True)
class Max(CooperationScheme):
    name = "max"

    def mixture(self, cfg):
        def ones(r, z):
            return np.ones(np.broadcast(r, z).shape)

        return ExpMixture((
            (ones, lambda r, z: rates(r, z, cfg)[0]),
            (ones, lambda r, z: rates(r, z, cfg)[1]),
            (lambda r, z: -ones(r, z), lambda r, z: sum(rates(r, z, cfg))),
        ))

    def ccdf(self, T, r, z, cfg):
        a, b = rates(r, z, cfg)
        return np.exp(-a * T) + np.exp(-b * T) - np.exp(-(a + b) * T)

    def lt(self, s, r, z, cfg):
        a, b = rates(r, z, cfg)
        return a / (s + a) + b / (s + b) - (a + b) / (s + a + b)

    def one_minus_lt(self, s, r, z, cfg):
        a, b = rates(r, z, cfg)
        return s / (s + a) + s / (s + b) - s / (s + a + b)

    def sample(self, r, z, cfg, rng):
        a, b = rates(r, z, cfg)
        shape = np.broadcast(a, b).shape
        return np.maximum(rng.standard_exponential(shape) / a, rng.standard_exponential(shape) / b)

    def mean_signal(self, r, z, cfg):
        a, b = rates(r, z, cfg)
        return 1 / a + 1 / b - 1 / (a + b)


def _uniform_phases(rng, shape):
    return rng.uniform(0, 2 * np.pi, shape), rng.uniform(0, 2 * np.pi, shape)


def _coherent_phases(rng, shape):
    theta = rng.uniform(0, 2 * np.pi, shape)
    return theta, theta


@dataclass(frozen=True)
class PhaseCombined(CooperationScheme):
    """Phase-combined pair; ``phase_law`` draws ``(theta_r, theta_z)``.

    ``"uniform"``: independent uniform phases; ``"coherent"``: equal phases, the
    coherent maximum. A callable ``law(rng, shape) -> (theta_r, theta_z)`` is
    also accepted.
    """

    phase_law: str | Callable = "uniform"
    analytic = False

    def __post_init__(self):
        if isinstance(self.phase_law, str) and self.phase_law not in ("uniform", "coherent"):
            raise ValueError(f"unknown phase law {self.phase_law!r}")

    @property
    def name(self):
        if self.phase_law == "uniform":
            return "ph"
        if self.phase_law == "coherent":
            return "ph-coherent"
        return "ph-custom"

    def _phases(self, rng, shape):
        if self.phase_law == "uniform":
            return _uniform_phases(rng, shape)
        if self.phase_law == "coherent":
            return _coherent_phases(rng, shape)
        return self.phase_law(rng, shape)

    def mixture(self, cfg):
        raise UnsupportedSchemeError("phase-combined pairs have no closed-form tail; simulate them")

    def sample(self, r, z, cfg, rng):
        a, b = rates(r, z, cfg)
        shape = np.broadcast(a, b).shape
        x = rng.standard_exponential(shape) / a
        y = rng.standard_exponential(shape) / b
        th_r, th_z = self._phases(rng, shape)
        return x + y + 2.0 * np.sqrt(x * y) * np.cos(th_r - th_z)

    def mean_signal(self, r, z, cfg):
        a, b = rates(r, z, cfg)
        if self.phase_law == "uniform":
            return 1 / a + 1 / b
        if self.phase_law == "coherent":
            # E sqrt(h) = sqrt(pi)/2 for unit exponential h
            return 1 / a + 1 / b + 2 * (math.pi / 4) / np.sqrt(a * b)
        rng = np.random.default_rng(0)
        return np.mean(self.sample(np.full(200_000, np.mean(r)), np.full(200_000, np.mean(z)), cfg, rng))


@dataclass(frozen=True)
class Mixture(CooperationScheme):
    """User-defined pair signal given by its exponential-mixture tail."""

    terms: ExpMixture = None
    name = "mixture"

    def __post_init__(self):
        if self.terms is None:
            raise ValueError("Mixture needs an ExpMixture")
        self.terms.validate()

    def mixture(self, cfg):
        return self.terms

    def sample(self, r, z, cfg, rng):
        """Inverse-tail sampling by bisection."""
        r, z = np.broadcast_arrays(np.asarray(r, float), np.asarray(z, float))
        c, d = self.terms.coefficients(r, z)
        u = rng.random(r.shape)
        lo = np.zeros(r.shape)
        hi = np.full(r.shape, 60.0) / np.min(d, axis=0)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            above = np.sum(c * np.exp(-d * mid), axis=0) > u
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return 0.5 * (lo + hi)


# -- module-level operations -----------------------------------------------------

def pair_ccdf(T, r, z, scheme, cfg):
    """``P(g(r, z) > T)``."""
    if not scheme.analytic:
        raise UnsupportedSchemeError(f"{scheme.name}: no closed-form tail")
    return scheme.ccdf(T, r, z, cfg)


def pair_lt(s, r, z, scheme, cfg):
    """``E exp(-s g(r, z))``."""
    if not scheme.analytic:
        raise UnsupportedSchemeError(f"{scheme.name}: no closed-form Laplace transform")
    return scheme.lt(s, r, z, cfg)


def sample_pair_signal(r, z, scheme, cfg, rng):
    return scheme.sample(r, z, cfg, rng)


def pair_lt_conditional(s, r, rho, scheme, cfg, consts, *, atol=1e-12, rtol=1e-10):
    """``E[exp(-s g(r, Z_r)) 1{Z_r > rho}]`` with ``Z_r`` Rice(r, alpha).

    At ``s = 0`` this is ``P(Z_r > rho)``, not 1.
    """
    from .distributions import GAUSS_SPAN, rice_pdf
    from .quadrature import integrate

    if not scheme.analytic:
        raise UnsupportedSchemeError(f"{scheme.name}: no closed-form Laplace transform")
    s, r, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(r, float), np.asarray(rho, float))
    shape = s.shape
    s, r, rho = s.ravel(), r.ravel(), rho.ravel()
    alpha = consts.alpha
    lo = np.maximum(rho, r - GAUSS_SPAN * alpha)
    lo = np.maximum(lo, 0.0)
    hi = np.maximum(r + GAUSS_SPAN * alpha, lo)

    def f(zz, own):
        return scheme.lt(s[own], r[own], zz, cfg) * rice_pdf(zz, r[own], alpha)

    val, _ = integrate(f, lo, hi, atol=atol, rtol=rtol, label="pair_lt_conditional")
    return val.reshape(shape)


# -- parsing --------------------------------------------------------------------

def parse_scheme(text: str):
    """Parse a scheme name into ``(serving, interferer)``.

    ``interferer`` is ``None`` unless the text names a composite such as
    ``max/off`` (serving MAX, interfering pairs OFF).
    """
    text = text.strip().lower()
    if "/" in text:
        serve, interf = text.split("/", 1)
        s, _ = parse_scheme(serve)
        i, _ = parse_scheme(interf)
        return s, i
    if text == "nsc":
        return NSC(), None
    if text == "max":
        return Max(), None
    if text == "ph":
        return PhaseCombined("uniform"), None
    if text == "ph-coherent":
        return PhaseCombined("coherent"), None
    if text == "off" or text.startswith("off:"):
        q = float(text.split(":", 1)[1]) if ":" in text else 0.5
        return Off(q), None
    raise ValueError(f"unknown scheme {text!r}; expected nsc | off:<q> | max | ph | ph-coherent | max/off:<q>")


def scheme_label(cfg) -> str:
    if cfg.interferer_scheme is None or cfg.interferer_scheme == cfg.scheme:
        return cfg.scheme.name
    return f"{cfg.scheme.name}/{cfg.interferer_scheme.name}"
