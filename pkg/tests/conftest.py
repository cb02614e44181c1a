import time
from pathlib import Path

import pytest

from pointdata import fixtures
from pointdata.tableio import parse_metadata, parse_point_table

DATA = Path(fixtures.__file__).parent / "data"
TABLE = DATA / "inh_nyu_table1.csv"
META = DATA / "inh_nyu_table1.meta.json"

_acceptance_lines: list[str] = []
_session_start = time.perf_counter()
SUITE_BUDGET_S = 30.0


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    _acceptance_lines.append(line)
    print(line)


@pytest.fixture(autouse=True)
def _no_fixture_override(monkeypatch):
    monkeypatch.delenv(fixtures.FIXTURE_ENV, raising=False)


@pytest.fixture(scope="session")
def table_text() -> str:
    return TABLE.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def meta():
    return parse_metadata(META.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def inh(table_text, meta):
    return parse_point_table(table_text, meta)


def pytest_sessionstart(session):
    global _session_start
    _session_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        elapsed = time.perf_counter() - _session_start
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
        ok = elapsed < SUITE_BUDGET_S
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] 8 suite runtime: {elapsed:.1f} s (budget {SUITE_BUDGET_S:g} s)")
