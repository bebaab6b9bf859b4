import os
import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message="The TBB threading layer")

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test under both kernel backends."""
    from pseudospec._jit import HAVE_NUMBA

    if request.param == "numba" and not HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setenv("PSEUDOSPEC_DISABLE_JIT", "1" if request.param == "numpy" else "0")
    return request.param


@pytest.fixture(autouse=True)
def _clean_budget(monkeypatch):
    if "PSEUDOSPEC_BUDGET" in os.environ:
        monkeypatch.delenv("PSEUDOSPEC_BUDGET")
