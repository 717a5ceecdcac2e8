import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from chainsched import _kernels  # noqa: E402
from chainsched.model import chain_instance, make_instance  # noqa: E402

BACKENDS = ["numba", "python"] if _kernels.NUMBA_AVAILABLE else ["python"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    previous = _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)


@pytest.fixture
def guards_122():
    """Guard chain of Construction 1 for v = 1 2 2 (p=1, q=2)."""
    return chain_instance([[("g0", 0, 1, 1), ("g1", 2, 1, 3), ("g2", 5, 1, 6), ("g3", 8, 1, 9)]])


DIAMOND_EDGES = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]


@pytest.fixture
def diamond():
    return make_instance([(x, 0, 1, 4) for x in "abcd"], DIAMOND_EDGES)


def as_jobs(inst):
    return {j.id: (j.release, j.processing, j.deadline) for j in inst.jobs}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
