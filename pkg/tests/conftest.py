import os
import sys

import numpy as np
import pytest

# Ensure we can import from the project
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from spheresym.geometry.sphere_mesh import build_icosphere

# ----------------------------
# Shared meshes (built once per session)
# ----------------------------

@pytest.fixture(scope="session")
def mesh0():
    return build_icosphere(0)


@pytest.fixture(scope="session")
def mesh3():
    return build_icosphere(3)


@pytest.fixture(scope="session")
def mesh4():
    return build_icosphere(4)


@pytest.fixture(scope="session")
def mesh5():
    return build_icosphere(5)


@pytest.fixture(scope="session")
def mesh6():
    return build_icosphere(6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
