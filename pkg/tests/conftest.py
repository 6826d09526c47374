import mpmath
import pytest


@pytest.fixture(autouse=True)
def _precision():
    # library calls set their own working precision; this covers test-side arithmetic
    with mpmath.workprec(256):
        yield


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for report in terminalreporter.stats.get(key, []):
            if report.when != "call":
                continue
            lines += [value for name, value in report.user_properties if name == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split()[2]):
            terminalreporter.write_line(line)
