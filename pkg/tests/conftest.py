import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, title, passed, detail)."""

    def record(number: int, title: str, passed: bool | None, detail: str = "") -> bool | None:
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
        _ACCEPTANCE[number] = f"[{status}] {number}. {title}" + (f" -- {detail}" if detail else "")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
