import pytest

_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def accept():
    """Record one acceptance line: ``accept(n, name, passed, detail)``."""

    def record(n: int, name: str, passed: bool, detail: str = "") -> bool:
        passed = bool(passed)
        _RESULTS[n] = (name, passed, detail)
        print(f"\nACCEPTANCE {n:2d} {'PASS' if passed else 'FAIL'}  {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        name, passed, detail = _RESULTS[n]
        terminalreporter.write_line(f"[{n:2d}] {'PASS' if passed else 'FAIL'}  {name}: {detail}")
    total = sum(p for _, p, _ in _RESULTS.values())
    terminalreporter.write_line(f"{total}/{len(_RESULTS)} criteria passed")
