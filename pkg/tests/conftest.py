import pytest

# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


@pytest.fixture
def criterion(request):
    """Record the outcome of one criterion; a test that never calls it counts as failed."""
    state = {}

    def record(n, title, ok, detail=""):
        state["n"] = n
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE[n] = line
        print(line)
        return ok

    yield record
