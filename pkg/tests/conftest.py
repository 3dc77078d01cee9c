import numpy as np
import pytest
from hypothesis import strategies as st

from adaptive_homodyne.ensemble import from_amplitudes


@pytest.fixture
def rng():
    return np.random.default_rng(20011)


def random_ensemble(rng, k_max=8, scale=2.0):
    k = int(rng.integers(2, k_max + 1))
    amps = scale * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    w = rng.random(k) + 0.05
    return from_amplitudes(amps, w / w.sum())


def random_posterior(rng, k):
    w = rng.dirichlet(np.ones(k))
    return w


finite = st.floats(min_value=-4, max_value=4, allow_nan=False, allow_infinity=False)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
