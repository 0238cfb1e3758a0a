import math

import pytest

from spiralsheet import SpiralParams, solve_matching
from spiralsheet.family import solve_family_matching


@pytest.fixture(scope="session")
def single_target():
    a = 0.8
    mu, g = solve_matching(a)
    return SpiralParams(a, mu, g)


@pytest.fixture(scope="session")
def pair_target():
    a = 0.8
    thetas = (0.0, math.pi)
    return solve_family_matching(a, thetas).as_family(a, thetas)


@pytest.fixture(scope="session")
def triple_target():
    a = 0.8
    thetas = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)
    return solve_family_matching(a, thetas).as_family(a, thetas)
