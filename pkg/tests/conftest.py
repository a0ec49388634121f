import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# (criterion, case, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES: list[tuple[str, str, bool, str]] = []


@pytest.fixture
def report():
    def _report(criterion: str, case: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append((criterion, case, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion} {case}: {detail}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, case, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {crit:<3} {case:<18} {detail}")
