import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nncoop import (ClosestCluster, FixedTransmitter, NetworkConfig, ParameterError,
                    baseline_constants, derive_constants)
from nncoop.config import GAMMA, read_config_file


def _oracle(lam):
    mpmath.mp.dps = 30
    lam = mpmath.mpf(lam)
    g = mpmath.mpf(2) / 3 - mpmath.sqrt(3) / (2 * mpmath.pi)
    d = 1 / (2 - g)
    return {
        "gamma": g,
        "delta": d,
        "alpha": (2 * lam * mpmath.pi * (2 - g)) ** -0.5,
        "xi": ((1 - d) * 2 * lam * mpmath.pi) ** -0.5,
        "zeta": (d * lam * mpmath.pi) ** -0.5,
    }


class TestDerivedConstants:
    def test_against_high_precision(self):
        c = derive_constants(NetworkConfig(lam=0.25))
        for name, ref in _oracle(0.25).items():
            assert getattr(c, name) == pytest.approx(float(ref), rel=1e-14)

    def test_reference_values(self):
        c = derive_constants(NetworkConfig(lam=0.25))
        assert round(c.delta, 4) == 0.6215
        assert c.alpha == pytest.approx(0.62902, abs=5e-6)
        assert c.xi == pytest.approx(1.296910, abs=5e-7)
        assert c.zeta == pytest.approx(1.43131, abs=5e-6)
        assert GAMMA == pytest.approx(0.3910022, abs=1e-7)

    def test_scaling_lambda_by_four_halves_scales(self):
        a = derive_constants(NetworkConfig(lam=0.25))
        b = derive_constants(NetworkConfig(lam=1.0))
        for name in ("alpha", "xi", "zeta"):
            assert getattr(b, name) == pytest.approx(getattr(a, name) / 2, rel=1e-14)

    @given(k=st.floats(1e-3, 1e3))
    def test_homogeneity(self, k):
        a = derive_constants(NetworkConfig(lam=0.25))
        b = derive_constants(NetworkConfig(lam=0.25 * k * k))
        for name in ("alpha", "xi", "zeta"):
            assert getattr(b, name) == pytest.approx(getattr(a, name) / k, rel=1e-12)
        assert b.delta == a.delta

    def test_z2_scale(self):
        c = derive_constants(NetworkConfig())
        assert c.z2_scale == pytest.approx(math.sqrt(c.alpha ** 2 + c.zeta ** 2))

    def test_baseline_constants(self):
        c = baseline_constants(NetworkConfig(lam=0.25))
        assert c.delta == 0.0
        assert c.xi == pytest.approx((2 * 0.25 * math.pi) ** -0.5)
        assert math.isinf(c.zeta)


class TestValidation:
    @pytest.mark.parametrize("kw", [
        {"lam": 0.0}, {"lam": -1.0}, {"beta": 2.0}, {"beta": 1.5},
        {"power": 0.0}, {"sigma2": -1e-9},
    ])
    def test_rejects_out_of_domain(self, kw):
        with pytest.raises(ParameterError):
            NetworkConfig(**kw)

    def test_rejects_nonpositive_r0(self):
        with pytest.raises(ParameterError):
            FixedTransmitter(0.0)

    def test_parameter_error_is_value_error(self):
        assert issubclass(ParameterError, ValueError)

    def test_with_returns_modified_copy(self):
        cfg = NetworkConfig()
        other = cfg.with_(beta=4.0, association=ClosestCluster())
        assert other.beta == 4.0 and cfg.beta == 3.0
        with pytest.raises(ParameterError):
            cfg.with_(beta=2.0)


class TestConfigFile:
    def test_parse(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# network\nlambda = 0.5\nbeta=4  # exponent\n\nt-steps = 7\nscheme = off:0.3\n")
        assert read_config_file(p) == {"lambda": 0.5, "beta": 4.0, "t_steps": 7, "scheme": "off:0.3"}

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("lamda = 0.5\n")
        with pytest.raises(ParameterError, match="unknown key"):
            read_config_file(p)

    def test_missing_equals(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("beta 4\n")
        with pytest.raises(ParameterError, match="key=value"):
            read_config_file(p)
