import numpy as np
import pytest

from tzsolve.spectral import dense_cauchy, to_cauchy_like
from tzsolve.toeplitz import dense_toeplitz, random_toeplitz


class Instance:
    def __init__(self, n, seed):
        self.n = n
        self.T = random_toeplitz(n, np.random.default_rng(seed))
        self.Td = dense_toeplitz(self.T)
        self.C = to_cauchy_like(self.T)
        self.Cd = dense_cauchy(self.C)
        self.normC = np.linalg.norm(self.Cd, 2)


_cache = {}


def instance(n, seed=0):
    key = (n, seed)
    if key not in _cache:
        _cache[key] = Instance(n, seed)
    return _cache[key]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def inst512():
    return instance(512, 0)


@pytest.fixture(scope="session")
def inst1024():
    return instance(1024, 0)


ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
