import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    label = mark.args[0]
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    prev = _RESULTS.get(label, "PASS")
    if rep.when == "call" or failed:
        _RESULTS[label] = "FAIL" if failed or prev == "FAIL" else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(f"{_RESULTS[label]}  {label}")
