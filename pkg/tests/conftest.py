"""Collects the outcome of every acceptance criterion and prints one line each."""

import pytest

_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        key = (number, item.name)
        if _outcomes.get(key, (None,))[0] not in ("FAIL",):
            _outcomes[key] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), (status, title) in sorted(_outcomes.items()):
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}  [{name}]")
