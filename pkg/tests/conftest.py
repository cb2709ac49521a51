import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Store a one-line verdict for the acceptance summary printed at the end."""

    def record(number, title, passed, detail):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append((number, f"[{status}] criterion {number}: {title} | {detail}"))
        print(ACCEPTANCE_LINES[-1][1])

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
