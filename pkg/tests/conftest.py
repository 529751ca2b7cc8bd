import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Record one verdict line for an acceptance criterion."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    def log(number: int, ok: bool, detail: str) -> None:
        results[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
