import pytest

# filled by tests/test_acceptance.py: criterion number -> (passed, summary)
ACCEPTANCE_LINES: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        ok, text = ACCEPTANCE_LINES[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {text}")
