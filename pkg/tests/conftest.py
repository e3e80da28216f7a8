from pathlib import Path

import pytest

from tsmr import Election

FIXTURES = Path(__file__).parent / "fixtures"
_LINES = pytest.StashKey[list]()


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def example1() -> Election:
    return Election.from_rankings("abcd", ["bdca", "cabd", "adbc"])


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
