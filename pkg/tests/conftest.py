import pytest

from conjcert.varieties import kummer_model, surface_Y
from conjcert.witness import kernel_structure


@pytest.fixture(scope="session")
def Y1():
    return surface_Y(1)


@pytest.fixture(scope="session")
def Y2():
    return surface_Y(2)


@pytest.fixture(scope="session")
def kummer():
    return kummer_model()


@pytest.fixture(scope="session")
def ks1():
    return kernel_structure(1, 5)


@pytest.fixture(scope="session")
def ks2():
    return kernel_structure(2, 5)


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (number, ok, detail)."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(number, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
