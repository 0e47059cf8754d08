import numpy as np
import pytest

from lejadisk.geometry import make_disk_grid


@pytest.fixture(scope="session")
def grid():
    """The default sup-norm grid (64 rings x 512 angles)."""
    return make_disk_grid()


@pytest.fixture(scope="session")
def coarse_grid():
    return make_disk_grid(16, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Dict of criterion number -> PASS/FAIL line, echoed in the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
