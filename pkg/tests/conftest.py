import numpy as np
import pytest

from encryip.group import GroupParams
from encryip.pke import keys_from_trapdoor


@pytest.fixture
def g7():
    """q=3 subgroup {1, 2, 4} of Z_7^* with generator 2."""
    return GroupParams(q=3, p=7, g1=2)


@pytest.fixture
def worked(g7):
    """t=2, a1=1, b1=2 plus keys with b=0 and b=1: sk1=(1,2), sk2=(2,0), sk3=(0,1)."""
    pk, keys, auth = keys_from_trapdoor(g7, t=2, a1=1, b1=2, bs=[0, 1])
    return pk, keys, auth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
