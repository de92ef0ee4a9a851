import json

import pytest

from morphlog.postulates import SuiteSettings, run_suite

CRITERIA = {
    1: "golden examples",
    2: "algebraic laws",
    3: "oracle equivalence",
    4: "revision postulates",
    5: "merging postulates",
    6: "abduction postulates",
    7: "determinism",
}

SUITE_SEED = 0

_outcomes: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = getattr(report, "criterion", None)
    if number is not None:
        _outcomes.setdefault(number, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        results = _outcomes.get(number)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        count = len(results or [])
        terminalreporter.write_line(f"criterion {number} ({CRITERIA[number]}): {status} [{count} tests]")


@pytest.fixture(scope="session")
def suite_settings():
    return SuiteSettings(seed=SUITE_SEED)


@pytest.fixture(scope="session")
def suite_reports(suite_settings):
    """One full seeded run of every postulate checker, shared by the acceptance tests."""
    return run_suite(suite_settings)


@pytest.fixture(scope="session")
def suite_json(suite_reports):
    return json.dumps(suite_reports, sort_keys=True, indent=1)
