import math
from pathlib import Path

import numpy as np
import pytest

from hardylab.state import ELIGIBLE, MultipartiteState, classify, random_state, schmidt_decompose

DATA = Path(__file__).resolve().parent.parent / "data"


def asym_state():
    """0.6|00> + 0.8|11>."""
    return MultipartiteState.from_amplitudes((2, 2), [0.6, 0, 0, 0.8])


def random_eligible_states(count, seed, max_dim=6, min_dim=2):
    """Random two-party states with side dimensions in ``[min_dim, max_dim]``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        dims = tuple(int(d) for d in rng.integers(min_dim, max_dim + 1, size=2))
        st = random_state(dims, rng)
        if classify(schmidt_decompose(st)).tag == ELIGIBLE:
            out.append(st)
    return out


@pytest.fixture
def asym():
    return asym_state()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def data_dir():
    return DATA


def w_general():
    v = np.zeros(8, dtype=complex)
    v[0b001], v[0b010], v[0b100] = 0.6, 0.64, 0.48
    return MultipartiteState((2, 2, 2), v)


def four_party_tail():
    phi = np.array([0.6, 0, 0, 0.8])
    r = (0.9, math.sqrt(0.19))
    chi = np.zeros((4, 2, 2), dtype=complex)
    for k in range(2):
        chi[:, k, k] = r[k] * phi
    return MultipartiteState((2, 2, 2, 2), chi.reshape(-1))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
