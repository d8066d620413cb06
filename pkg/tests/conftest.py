import pathlib

import numpy as np
import pytest

from starrep.algebra import generate_algebra
from starrep.linalg import orthonormalize
from starrep.representation import Structure

SCENARIO_DIR = pathlib.Path(__file__).parent / "scenarios"

E1 = np.array([1, 0], dtype=complex)
E2 = np.array([0, 1], dtype=complex)
U = np.array([1, 1], dtype=complex) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def diag_structure():
    algebra = generate_algebra([np.diag([1.0, 0.0])])
    return Structure(algebra, vectors={"e1": E1, "e2": E2, "u": U})


@pytest.fixture
def diag_discrete_structure():
    algebra = generate_algebra([np.diag([1.0, 0.0])])
    return Structure(algebra, discrete=orthonormalize([E2], 2),
                     vectors={"e1": E1, "e2": E2, "u": U})


@pytest.fixture
def m2_structure():
    e12 = np.zeros((2, 2), dtype=complex)
    e12[0, 1] = 1
    return Structure(generate_algebra([e12]), vectors={"e1": E1, "e2": E2, "u": U})


@pytest.fixture
def scenario_path():
    return str(SCENARIO_DIR / "diagonal.json")
