from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from dyncom import DynamicCommunityStructure, Interaction, LinkStream, TimeDomain

settings.register_profile(
    "default", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

FIXTURE_Q = Fraction(19, 72)
# exhaustive optimum of the three-edge fixture under induced memberships
FIXTURE_OPTIMUM = 0.375


def three_edge_stream() -> LinkStream:
    """Undirected edges (a,b,0), (a,b,1), (b,c,3) on the discrete horizon [0, 4)."""
    return LinkStream(
        TimeDomain("discrete", 0, 4),
        [Interaction("a", "b", 0, 0, 1.0, False), Interaction("a", "b", 1, 1, 1.0, False),
         Interaction("b", "c", 3, 3, 1.0, False)],
    )


def three_edge_structure() -> DynamicCommunityStructure:
    return DynamicCommunityStructure.from_records(
        [(1, "a", 0, 2), (1, "b", 0, 2), (2, "b", 2, 4), (2, "c", 2, 4)], discrete=True
    )


def single_edge_stream() -> LinkStream:
    return LinkStream(TimeDomain("discrete", 0, 2), [Interaction("a", "b", 0, 0, 1.0, False)])


@pytest.fixture
def fixture_stream():
    return three_edge_stream()


@pytest.fixture
def fixture_structure():
    return three_edge_structure()


# acceptance bookkeeping: one pass/fail line per criterion in the summary

_CRITERIA: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    failed = _CRITERIA.setdefault(marker.args[0], [])
    if report.failed:
        failed.append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        failed = _CRITERIA[n]
        status = "FAIL" if failed else "PASS"
        detail = f" ({', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:2d}: {status}{detail}")
