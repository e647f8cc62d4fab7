"""Network parameters and the model constants derived from them.

Units are km for distances and Watt for powers; path loss r**-beta is treated
as dimensionless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Union

GAMMA = 2.0 / 3.0 - math.sqrt(3.0) / (2.0 * math.pi)


class ParameterError(ValueError):
    """A model parameter lies outside its domain."""


@dataclass(frozen=True)
class FixedTransmitter:
    """Serving BS at a known distance ``r0`` (km), independent of the field."""

    r0: float = 1.0

    def __post_init__(self):
        if not self.r0 > 0:
            raise ParameterError(f"r0 must be > 0, got {self.r0}")


@dataclass(frozen=True)
class ClosestCluster:
    """Serve the user from the closest cluster (single or pair)."""


Association = Union[FixedTransmitter, ClosestCluster]


def _default_scheme():
    from .signals import NSC

    return NSC()


@dataclass(frozen=True)
class NetworkConfig:
    """Physical parameters of the network.

    ``scheme`` is the signal of the serving pair; ``interferer_scheme`` is what
    interfering pairs emit and defaults to ``scheme``. The two differ only for
    composites such as MAX serving with OFF interferers.
    """

    lam: float = 0.25
    beta: float = 3.0
    power: float = 1.0
    sigma2: float = 0.0
    scheme: object = field(default_factory=_default_scheme)
    association: Association = field(default_factory=FixedTransmitter)
    interferer_scheme: object = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam}")
        if not self.beta > 2:
            raise ParameterError(f"beta must be > 2, got {self.beta}")
        if not self.power > 0:
            raise ParameterError(f"power must be > 0, got {self.power}")
        if not self.sigma2 >= 0:
            raise ParameterError(f"sigma2 must be >= 0, got {self.sigma2}")

    @property
    def interference_scheme(self):
        return self.scheme if self.interferer_scheme is None else self.interferer_scheme

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class DerivedConstants:
    gamma: float
    delta: float
    alpha: float
    xi: float
    zeta: float

    @property
    def z2_scale(self) -> float:
        """Rayleigh scale of the closest parent's daughter distance."""
        return math.hypot(self.alpha, self.zeta)


def derive_constants(cfg: NetworkConfig) -> DerivedConstants:
    lam = cfg.lam
    if not lam > 0:
        raise ParameterError(f"lambda must be > 0, got {lam}")
    if not cfg.beta > 2:
        raise ParameterError(f"beta must be > 2, got {cfg.beta}")
    delta = 1.0 / (2.0 - GAMMA)
    return DerivedConstants(
        gamma=GAMMA,
        delta=delta,
        alpha=(2.0 * lam * math.pi * (2.0 - GAMMA)) ** -0.5,
        xi=((1.0 - delta) * 2.0 * lam * math.pi) ** -0.5,
        zeta=(delta * lam * math.pi) ** -0.5,
    )


def baseline_constants(cfg: NetworkConfig) -> DerivedConstants:
    """The delta -> 0 limit: every BS is single, so the field is a PPP of density lambda."""
    c = derive_constants(cfg)
    return replace(c, delta=0.0, xi=(2.0 * cfg.lam * math.pi) ** -0.5, zeta=math.inf)


# -- key=value config files -------------------------------------------------

_FLOAT_KEYS = {
    "lambda", "beta", "power", "sigma2", "q", "r0", "t_min_db", "t_max_db",
    "window_radius", "guard_radius",
}
_INT_KEYS = {"t_steps", "trials", "seed"}
_STR_KEYS = {"scheme", "association", "model", "out", "format"}


def read_config_file(path: str | Path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment.

    Dashes in keys are normalised to underscores so the file can use the same
    spelling as the command-line flags.
    """
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _INT_KEYS:
            values[key] = int(value)
        elif key in _STR_KEYS:
            values[key] = value
        else:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def config_fields() -> list[str]:
    return [f.name for f in fields(NetworkConfig)]
