import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(num, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:>2} {name}: {status}"
        if detail:
            line += f"  [{detail}]"
        _acceptance_lines.append(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
