import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# acceptance criterion number -> {title, ok, seconds}
_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        report.acceptance, report.acceptance_title = marker.args


def pytest_runtest_logreport(report):
    number = getattr(report, "acceptance", None)
    if number is None:
        return
    entry = _ACCEPTANCE.setdefault(number, {"title": report.acceptance_title, "ok": True, "seconds": 0.0})
    entry["seconds"] += report.duration
    if report.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:>2}: {status}  {entry['title']}  ({entry['seconds']:.2f} s)")
