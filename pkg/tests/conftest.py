import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = _CRITERION.search(item.name)
    if not m or not (report.when == "call" or report.failed or report.skipped):
        return
    title = (item.function.__doc__ or item.name).strip().splitlines()[0]
    if report.skipped:
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        verdict = f"SKIPPED ({reason.removeprefix('Skipped: ')})"
    else:
        verdict = "PASS" if report.passed else "FAIL"
    if int(m.group(1)) not in _results or verdict != "PASS":
        _results[int(m.group(1))] = f"{title}: {verdict}"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(_results):
        terminalreporter.write_line(f"criterion {num:2d}  {_results[num]}")
