import numpy as np
import pytest
from hypothesis import settings

from nncoop import NetworkConfig, derive_constants

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def cfg3():
    return NetworkConfig(lam=0.25, beta=3.0)


@pytest.fixture
def consts(cfg3):
    return derive_constants(cfg3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_report(request):
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def report(number, passed, detail):
        line = f"[{number:>2}] {'PASS' if passed else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
