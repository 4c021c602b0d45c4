import numpy as np
import pytest

import multicurves as mc

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one acceptance line: record(number, passed, detail)."""
    def _rec(num, ok, detail=""):
        ACCEPTANCE[num] = (bool(ok), detail)
    return _rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def static_curve():
    return mc.build_static_two_curve(0.1, 0.1, 4096)


@pytest.fixture(scope="session")
def tau0():
    return mc.post_compose_tau0(0.1, 0.1, mc.DEFAULT_ALPHA, 4096)


@pytest.fixture(scope="session")
def canonical():
    return mc.canonical_two_curve(0.1, 0.1, mc.DEFAULT_ALPHA, 4096, 60)


@pytest.fixture(scope="session")
def canonical_fast():
    # larger rotation: short Birkhoff transients, so probes resolve quickly
    return mc.canonical_two_curve(0.1, 0.1, 0.1, 4096, 60)


@pytest.fixture(scope="session")
def canonical_fast_tube(canonical_fast):
    return mc.tube_radius(canonical_fast.base_map, canonical_fast.curve, 0, 2000, stride=16)


@pytest.fixture(scope="session")
def rational3():
    return mc.build_rational_3curve(alpha=mc.DEFAULT_ALPHA, N=1024)


def rng(seed=0):
    return np.random.default_rng(seed)
