from dataclasses import replace
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import strategies as st

from abcage.cli import simulate
from abcage.config import preset

ACCEPTANCE_LOG = []


def u2_from_angles(alpha, beta, gamma, theta):
    """Generic U(2) element: a global phase times an SU(2) rotation."""
    a = np.exp(1j * beta) * np.cos(theta)
    b = np.exp(1j * gamma) * np.sin(theta)
    return np.exp(1j * alpha) * np.array([[a, b], [-np.conj(b), np.conj(a)]])


angle = st.floats(min_value=0, max_value=2 * np.pi, allow_nan=False, allow_infinity=False)
unitaries = st.builds(u2_from_angles, angle, angle, angle, angle)


def random_unitaries(rng, count):
    from scipy.stats import unitary_group

    return unitary_group.rvs(2, size=count, random_state=rng)


@lru_cache(maxsize=None)
def run_preset(name, mode="ion", n_max=15, step=None, no_noise=False, n_detect=7):
    cfg = preset(name, mode=mode)
    cfg = replace(cfg, ion=replace(cfg.ion, n_max=n_max, n_detect=n_detect))
    if step is not None:
        cfg = replace(cfg, step=step)
    if no_noise:
        cfg = replace(cfg, noise=None)
    return cfg, simulate(cfg)


def record(number, title, passed, detail=""):
    ACCEPTANCE_LOG.append((number, title, passed, detail))
    assert passed, f"criterion {number} ({title}) failed: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LOG, key=lambda r: (r[0], r[1])):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2} {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
