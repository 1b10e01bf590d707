import pytest

ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion (``ok=None`` means skipped)."""

    def record(criterion, ok, detail=""):
        verdict = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"criterion {criterion}: {verdict}  {detail}".rstrip()
        ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
