import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diracsim.core import DIRAC, POSITION, SpinorField, norm

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def random_state(grid, rng, n_packets=3, spread=6.0):
    """Normalized smooth state: a few Gaussian packets with random spinor weights."""
    x = grid.x
    c1 = np.zeros_like(x, dtype=complex)
    c2 = np.zeros_like(x, dtype=complex)
    for _ in range(n_packets):
        x0 = rng.uniform(-spread, spread)
        w = rng.uniform(0.8, 2.0)
        p0 = rng.uniform(-1.5, 1.5)
        env = np.exp(-((x - x0) ** 2) / (4 * w**2) + 1j * p0 * x)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        c1 += a * env
        c2 += b * env
    f = SpinorField(grid, c1, c2, DIRAC, POSITION)
    return f.scaled(1.0 / np.sqrt(norm(f)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- one summary line per acceptance criterion ------------------------------------

_CRITERIA = {}
_NAME = re.compile(r"test_criterion_(\d+)([a-z]?)_")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _NAME.search(report.nodeid)
    if m:
        detail = "; ".join(f"{k}={v}" for k, v in report.user_properties)
        _CRITERIA.setdefault(int(m.group(1)), []).append(
            (m.group(1) + m.group(2), report.outcome, report.nodeid.split("::")[-1], detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        parts = _CRITERIA[num]
        ok = all(part[1] == "passed" for part in parts)
        tr.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}")
        for label, outcome, name, detail in parts:
            tr.write_line(f"    {label:>3} {outcome.upper():6} {name}" + (f"  [{detail}]" if detail else ""))
