import sys

import pytest

sys.setrecursionlimit(50_000)

from lamc.arith import default_signature
from lamc.machine import MachineConfig


@pytest.fixture(scope="session")
def sig():
    return default_signature()


@pytest.fixture()
def cfg():
    return MachineConfig()
