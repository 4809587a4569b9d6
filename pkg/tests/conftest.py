import pytest

_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call with (ok, detail)."""

    def record(ok: bool, detail: str):
        _RESULTS.append((request.node.name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} {request.node.name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
