from __future__ import annotations

from pathlib import Path

import pytest

from akgraph.ingest import load_tsv_snapshot

ROOT = Path(__file__).resolve().parent.parent

# criterion number -> (label, outcome) gathered while the suite runs
_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, label): acceptance criterion covered by this test")


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return ROOT


@pytest.fixture(scope="session")
def mini_a():
    graph, report = load_tsv_snapshot(ROOT / "fixtures" / "scientometrics-mini")
    assert report.skipped_rows == 0
    return graph


@pytest.fixture(scope="session")
def mini_b():
    graph, report = load_tsv_snapshot(ROOT / "fixtures" / "scientometrics-mini-b")
    assert report.skipped_rows == 0
    return graph


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call":
        num, label = marker.args
        _ACCEPTANCE[num] = (label, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        label, verdict = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num} ({label}): {verdict}")
