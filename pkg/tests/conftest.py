import pytest

_criteria: dict[str, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, title = marker.args
    entry = _criteria.setdefault(cid, [title, True, 0.0, False])
    if report.when == "call" or report.failed:
        entry[3] = True
        entry[1] = entry[1] and report.passed
        entry[2] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda c: int(c[2:])):
        title, passed, seconds, ran = _criteria[cid]
        status = "PASS" if passed and ran else "FAIL"
        terminalreporter.write_line(f"{cid:<5} {status}  {title}  ({seconds:.2f}s)")
