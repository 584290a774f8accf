import numpy as np
import pytest
from hypothesis import settings

from splitgof.split import ResidualSet, make_split

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def instance(n, l_n=None, f_n=None, seed=0):
    """A random series with arbitrary checking-sample residuals."""
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n)
    split = make_split(n, "custom", f_n or max(1, n // 2), l_n or n)
    e = rng.standard_normal(split.l_n)
    lo = split.checking_start
    lagged = np.empty(split.l_n)
    if lo == 0:
        lagged[0] = np.nan
        lagged[1:] = y[: n - 1]
    else:
        lagged[:] = y[lo - 1: n - 1]
    return y, ResidualSet.from_arrays(e, lagged, split)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
