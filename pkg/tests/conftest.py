import pytest

from helpers import ex1

ACCEPTANCE_LINES = []


@pytest.fixture
def tax_ex1():
    return ex1()


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome for the end-of-run summary."""
    def record(number, description, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {description}" + (f" ({detail})" if detail else ""))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
