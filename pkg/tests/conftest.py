import warnings

import hypothesis
import numpy as np
import pytest

from fadingnet.distributions import ChannelModel

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

_CRITERIA = pytest.StashKey[list]()


class FixedStream:
    """Stand-in random stream that replays given uniforms."""

    def __init__(self, *values):
        self.values = list(values)

    def random(self, size=None):
        if size is None:
            return self.values.pop(0)
        out = np.array(self.values[:size])
        del self.values[:size]
        return out


@pytest.fixture
def rayleigh():
    return ChannelModel.rayleigh(1.0)


@pytest.fixture
def pareto3():
    return ChannelModel.pareto(3.0)


def pareto(alpha):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ChannelModel.pareto(alpha)


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; all of them are printed at session end."""
    def record(name, passed, detail=""):
        request.config.stash.setdefault(_CRITERIA, []).append((name, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_CRITERIA, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in rows:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
