import numpy as np
import pytest

from pmwctune import TransferFunction, TuneSpec, oracle_tune, tune

# Published PMwc-Tune gains and IAE for 1/(s+1)^n, PM=60 deg, wc=1 rad/s.
TABLE1_GAINS = {1: (0.366, 1.366, 0.000), 2: (1.732, 1.251, 0.251), 3: (2.732, 1.171, 1.903)}
TABLE1_IAE = {1: 1.1500, 2: 1.1466, 3: 1.1469}
PIDTUNE_GAINS = {1: (0.582, 1.289, 0.000), 2: (1.873, 1.336, 0.634), 3: (2.732, 0.977, 1.709)}
PIDTUNE_PM = {1: 69.31, 2: 69.44, 3: 60.00}
PIDTUNE_IAE = {1: 1.0090, 2: 1.0131, 3: 1.1999}


def lag_plant(n):
    # (s+1)^n expanded with binomial coefficients
    from math import comb

    return TransferFunction.from_coeffs([1.0], [comb(n, k) for k in range(n + 1)])


@pytest.fixture(scope="session")
def tuned():
    return {n: tune(lag_plant(n), TuneSpec()) for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def oracled():
    return {n: oracle_tune(lag_plant(n), TuneSpec()) for n in (1, 2, 3)}


@pytest.fixture
def rng():
    return np.random.default_rng(20251016)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
