import numpy as np
import pytest

from tbri_decay.fock_basis import enumerate_basis
from tbri_decay.spectral import diagonalize
from tbri_decay.tbri_model import ModelConfig, build_realization


@pytest.fixture(scope="session")
def basis_6_12():
    return enumerate_basis(6, 12)


@pytest.fixture(scope="session")
def strong_realization(basis_6_12):
    cfg = ModelConfig(6, 12, 0.2, seed=1)
    H = build_realization(cfg, 0, basis_6_12)
    return H, diagonalize(H)


@pytest.fixture(scope="session")
def weak_realization(basis_6_12):
    cfg = ModelConfig(6, 12, 0.05, seed=1)
    H = build_realization(cfg, 0, basis_6_12)
    return H, diagonalize(H)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
