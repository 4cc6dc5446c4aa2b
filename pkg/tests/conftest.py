import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from balancedyn.state import SignedState

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def signed_states(draw, min_n=3, max_n=12):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    sign = np.zeros((n, n), dtype=np.int8)
    iu = np.triu_indices(n, 1)
    sign[iu] = np.where(bits, 1, -1)
    return SignedState(sign + sign.T)


@st.composite
def states_with_edges(draw, min_n=3, max_n=12, max_edges=30):
    state = draw(signed_states(min_n, max_n))
    n = state.n
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    return state, draw(st.lists(pairs, max_size=max_edges))


def triangle(friends=()):
    return SignedState.from_friendships(3, friends)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance summary: one line per criterion at the end of the run

_CRITERIA = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA.append((report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _CRITERIA:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}  {detail}")
