import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ramanoam import LambdaSystem  # noqa: E402


@pytest.fixture
def gain_system():
    """Pumped gain configuration: coupling 0.1, pump 0.05 (units of Gamma)."""
    return LambdaSystem(gamma_p=0.05, omega_c=0.1)


@pytest.fixture
def eit_system():
    return LambdaSystem(gamma_p=0.0, omega_c=0.1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
