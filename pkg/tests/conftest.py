from pathlib import Path

import pytest

from sansum.embeddings import DeterministicProvider
from sansum.text_prep import read_document

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def story15():
    return read_document(FIXTURES / "story15.txt")


@pytest.fixture
def small_provider():
    return DeterministicProvider(dim=8)


_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::test_criterion_")[1]
    if report.when == "call" or report.failed:
        _criteria[name] = "FAIL" if report.failed else ("SKIP" if report.skipped else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        number, _, label = name.partition("_")
        terminalreporter.write_line(f"criterion {int(number):2d} {_criteria[name]}  {label.replace('_', ' ')}")
