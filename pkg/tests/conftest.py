import pytest

# (criterion number, passed, detail) lines reported by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture
def report():
    def _report(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append((number, passed, line))
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
