import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fieldlab.fock import FockSpace
from fieldlab.lattice import LatticeConfig

_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    entry = _RESULTS.setdefault(number, {"title": title, "failed": [], "count": 0})
    entry["count"] += 1
    if rep.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        status = "FAIL" if e["failed"] else "PASS"
        line = f"{status} criterion {number}: {e['title']} ({e['count'] - len(e['failed'])}/{e['count']} checks)"
        if e["failed"]:
            line += " failing: " + ", ".join(e["failed"])
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_cfg():
    """Three-site lattice, dense Fock dimension 27."""
    return LatticeConfig(n=1, m_ir=3, m_uv=1, mass=Fraction(1), tau=2)


@pytest.fixture(scope="session")
def default_cfg():
    return LatticeConfig()


@pytest.fixture(scope="session")
def small_dense(small_cfg):
    return FockSpace(small_cfg, "dense")


@pytest.fixture(scope="session")
def small_sparse(small_cfg):
    return FockSpace(small_cfg, "sparse", n_max=4)


@pytest.fixture(scope="session")
def default_sparse(default_cfg):
    return FockSpace(default_cfg, "sparse", n_max=3)
