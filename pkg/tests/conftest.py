import numpy as np
import pytest

from nonexp_fp import build_builtin


@pytest.fixture(scope="session")
def shear():
    return build_builtin("oscillating_shear")


@pytest.fixture(scope="session")
def graph():
    return build_builtin("graph_projection")


@pytest.fixture(scope="session")
def disk():
    return build_builtin("disk_projection")


@pytest.fixture(scope="session")
def clamp():
    return build_builtin("coord_clamp")


@pytest.fixture(scope="session")
def rotation():
    return build_builtin("rotation")


@pytest.fixture(scope="session")
def builtins(shear, graph, disk, clamp, rotation):
    return [shear, graph, disk, clamp, rotation]


@pytest.fixture
def rng():
    return np.random.default_rng(20240)
