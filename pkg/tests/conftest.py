import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qtower import sampling

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_dims = st.integers(min_value=1, max_value=4)


@st.composite
def complex_matrices(draw, rows=None, cols=None, max_dim=4):
    r = draw(rows if rows is not None else st.integers(1, max_dim))
    c = draw(cols if cols is not None else st.integers(1, max_dim))
    return sampling.gaussian(sampling.rng(draw(seeds)), r, c)


@st.composite
def hermitian_matrices(draw, max_dim=6):
    n = draw(st.integers(1, max_dim))
    m = sampling.gaussian(sampling.rng(draw(seeds)), n, n)
    return 0.5 * (m + m.conj().T)


@st.composite
def contractions(draw, max_dim=5):
    gen = sampling.rng(draw(seeds))
    r, c = draw(st.integers(1, max_dim)), draw(st.integers(1, max_dim))
    return sampling.contraction(gen, r, c)


@pytest.fixture
def gen():
    return sampling.rng(20240611)


def units(n):
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1
            yield e


# Acceptance report: tests marked ``criterion(n, title)`` get one PASS/FAIL line
# each in the terminal summary, independent of output capturing.
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when == "teardown":
        return
    number, title = mark.args
    failed = report.failed or (report.when == "setup" and report.skipped)
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}")
