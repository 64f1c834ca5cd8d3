from fractions import Fraction as F

import pytest

from indefinite_theta import ConeConfig, Lattice, QuadraticSpace

GRAM3 = [[-1, 0, 0], [0, -1, 0], [0, 0, 1]]
CONES_A = [(1, 0, 0), (0, 1, 0), (F(-4, 5), F(-3, 5), 0)]
CONES_B = [(1, 0, 0), (0, 1, 0), (F(3, 5), F(4, 5), 0)]
# valid, with a null vector C_1; pairs (C_4, C_1) and (C_1, C_2) span degenerate planes
CONES_NULL = [(1, 0, 1), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]


@pytest.fixture(scope="session")
def space3():
    return QuadraticSpace(GRAM3)


@pytest.fixture(scope="session")
def space4():
    return QuadraticSpace.diagonal([-1, -1, 1, 1])


@pytest.fixture(scope="session")
def config_a(space3):
    return ConeConfig(space3, CONES_A)


@pytest.fixture(scope="session")
def config_b(space3):
    return ConeConfig(space3, CONES_B)


@pytest.fixture(scope="session")
def config_null(space3):
    return ConeConfig(space3, CONES_NULL)


@pytest.fixture(scope="session")
def z3(space3):
    return Lattice(space3)
