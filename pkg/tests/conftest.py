import sys

import numpy as np
import pytest

from gmgpoisson import GridField, LevelGrid


def random_field(dim, n, rng, name=""):
    """Random interior values with a zero boundary ring."""
    grid = LevelGrid(dim, 0, n)
    fld = GridField.zeros(grid, name=name)
    fld.values[(slice(1, n),) * dim] = rng.standard_normal((n - 1,) * dim)
    return fld


def vec(fld):
    return fld.interior.ravel(order="F")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
