from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from stub_server import StubServer  # noqa: E402

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return REPO_ROOT / "data"


@pytest.fixture(scope="session")
def toy_corpus_path(data_dir) -> Path:
    return data_dir / "toy_corpus.jsonl"


@pytest.fixture()
def stub_server():
    server = StubServer()
    yield server
    server.close()


# -- acceptance reporting ---------------------------------------------------
#
# Tests marked @pytest.mark.acceptance print one PASS/FAIL line each in the
# terminal summary, so the acceptance gate is readable at a glance.

_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.get_closest_marker("acceptance"):
        _acceptance_results[item.name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results.items():
        status = "PASS" if outcome == "PASSED" else outcome
        terminalreporter.write_line(f"{status:6s} {name}")
