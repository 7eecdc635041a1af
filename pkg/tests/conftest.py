"""Per-criterion PASS/FAIL lines for tests marked with ``criterion``."""
from collections import defaultdict

_criteria = {}
_titles = {}
_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number = mark.args[0]
            _criteria[item.nodeid] = number
            _titles[number] = mark.args[1] if len(mark.args) > 1 else ""


def pytest_runtest_logreport(report):
    number = _criteria.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[number].append((report.nodeid, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        runs = _outcomes[number]
        passed = sum(ok for _, ok in runs)
        verdict = "PASS" if passed == len(runs) else "FAIL"
        terminalreporter.write_line(
            f"criterion {number}: {verdict} ({passed}/{len(runs)} checks) {_titles.get(number, '')}".rstrip())
