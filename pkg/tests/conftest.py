import numpy as np
import pytest
from hypothesis import strategies as st

from prefap import Stream
from prefap.oracle import oracle_join, oracle_multiway


def as_sorted_ids(pairs, arity=2):
    """Oracle id tuples as a lexicographically sorted (n, arity) array."""
    arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, arity)
    return arr


def oracle_ids(op, r, s):
    pairs, _ = oracle_join(op, r, s)
    return as_sorted_ids(pairs)


def oracle_multi_ids(streams, thetas):
    return as_sorted_ids(oracle_multiway(streams, thetas), len(streams))


# small value pools make ties and boundary hits common
values_lists = st.lists(
    st.one_of(st.integers(-20, 20).map(float), st.floats(-20, 20, allow_nan=False, allow_infinity=False)),
    max_size=40,
)


@pytest.fixture
def small_streams():
    """R = 0..9 and S = 0..12: after pre-filtering under '>' R spans [1, 9] and S [0, 8]."""
    return Stream("R", np.arange(10.0)), Stream("S", np.arange(13.0))


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        key = name.split("[")[0]
        prev = _acceptance.get(key, "PASS")
        _acceptance[key] = "FAIL" if report.outcome != "passed" or prev == "FAIL" else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key, verdict in _acceptance.items():
        label = key.replace("test_criterion_", "criterion ").replace("_", " ", 1)
        terminalreporter.write_line(f"{verdict}  {label}")
