import pytest

# Acceptance tests carry a `criterion` marker; the terminal summary prints
# one pass/fail line per criterion after the run.
_results = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion checked by this test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        _results.append((marker.args[0], report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _results:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}")
