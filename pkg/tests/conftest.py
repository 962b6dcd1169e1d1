import pytest

ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record one acceptance line: verdict(number, title, ok, detail)."""

    def record(number, title, ok, detail=""):
        ACCEPTANCE.append((number, title, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {title}: {detail}")
