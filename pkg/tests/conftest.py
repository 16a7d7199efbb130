from importlib import resources
from pathlib import Path

import pytest

from pasda_mini.minilang import parse_file
from pasda_mini.solver import find_solver_binary

FIXTURES = Path(str(resources.files("pasda_mini") / "fixtures"))

requires_external = pytest.mark.skipif(find_solver_binary(None) is None, reason="no SMT-LIB solver binary")


@pytest.fixture(scope="session")
def loop_pair():
    return parse_file(FIXTURES / "loop_pair.mini")


@pytest.fixture(scope="session")
def tan_pair():
    return parse_file(FIXTURES / "tan_pair.mini")
