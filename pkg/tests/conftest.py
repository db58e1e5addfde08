import pytest

# Global minima on the registry default domains. Computed independently of
# lipopt.grid_oracle: numpy over 2,000,001 uniform points, then
# scipy.optimize.minimize_scalar(method="bounded", xatol=1e-13) within one
# spacing of the grid winner (see tests/oracles.py).
ORACLE = {
    "f1": (10.0, -5.440211108893697),           # boundary minimum: 10*sin(10)
    "f2": (2.2241159937812784, -5.801148205517009),
    "f3": (36.51713164865304, -0.9900256145968123),
    "quad": (0.5, 0.0),
}

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def oracle():
    return ORACLE


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f"  ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

