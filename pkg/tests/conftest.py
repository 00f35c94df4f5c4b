import time

import pytest

from nsc.experiments import ExperimentConfig, emit_reports, run_task

_results: dict[int, tuple[str, str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    status, _, notes = _results.get(number, ("PASS", title, []))
    if report.failed:
        status = "FAIL"
    elif report.skipped and status == "PASS" and report.when == "setup":
        status = "SKIP"
    notes = notes + [text for name, text in report.user_properties if name == "measured"] if report.when == "call" else notes
    _results[number] = (status, title, notes)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, title, notes = _results[number]
        detail = f"  [{'; '.join(notes)}]" if notes else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {title}{detail}")


@pytest.fixture(scope="session")
def desk_rounds(tmp_path_factory):
    """The desk-preset rounds sweep, run once per session: (out_dir, result, seconds)."""
    out = tmp_path_factory.mktemp("rounds")
    t = time.perf_counter()
    result = run_task(ExperimentConfig.preset("desk", "rounds"), out)
    emit_reports(result, out)
    return out, result, time.perf_counter() - t
