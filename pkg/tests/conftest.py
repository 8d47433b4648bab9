import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shimsign.characters import principal  # noqa: E402
from shimsign.qseries import tau_table  # noqa: E402
from shimsign.shimura import LiftedForm, invert_lift  # noqa: E402

DESK_X = 100_000


@pytest.fixture(scope="session")
def tau():
    """[0, tau(1), ..., tau(DESK_X)]."""
    return tau_table(DESK_X)


@pytest.fixture(scope="session")
def delta_level2(tau):
    chi = principal(4)
    return LiftedForm(12, 2, chi, tuple(tau), 1, chi)


@pytest.fixture(scope="session")
def delta_preimage(delta_level2):
    """values[n] = a(n^2) for the weight 13/2, level 4 preimage of Delta."""
    return invert_lift(delta_level2, 1, principal(4), 4, 6)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record a criterion's one-line outcome; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
