import numpy as np
import pytest

from releq.equilibria import lagrange_triangle
from releq.potentials import Homogeneous, Quasihomogeneous


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props and rep.when == "call":
                lines.append((props["criterion"], outcome == "passed", props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(lines, key=lambda t: int(t[0].split()[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def newton_triangle():
    return lagrange_triangle([1.0, 1.0, 1.0], Homogeneous(1.0))


@pytest.fixture
def quasi_triangle():
    return lagrange_triangle([1.0, 2.0, 3.0], Quasihomogeneous(1.5, 0.7), 2.3)
