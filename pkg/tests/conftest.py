import numpy as np
import pytest
from hypothesis import settings

from hloc import HurstTrack

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def sell_onset_track():
    """Flat 0.6, a clean 30-session slide to 0.30, then two dips.

    The slide is strictly monotone, so the first local minima are the dips
    confirmed at sessions 80 and 82; session 82 is the first with two
    sub-0.4 minima and therefore the designed Sell onset.
    """
    h = np.concatenate([np.full(50, 0.6), np.linspace(0.55, 0.30, 30),
                        [0.33, 0.30, 0.32, 0.31, 0.33]])
    return HurstTrack.from_values(h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def brownian_1000():
    return np.cumsum(np.random.default_rng(0).standard_normal(1000)) + 100.0


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def report(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
