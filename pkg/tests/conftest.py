import numpy as np
import pytest

from hodgefill.geometry import torus_mesh, boundary_tetrahedron, triangle_complex
from hodgefill.whitney import WhitneyStructure


@pytest.fixture(scope="session")
def torus4():
    return torus_mesh(4, 2, 0.25)


@pytest.fixture(scope="session")
def torus8():
    return torus_mesh(8, 2, 0.125)


@pytest.fixture(scope="session")
def torus4_3d():
    return torus_mesh(4, 3, 0.25)


@pytest.fixture(scope="session")
def dtet():
    return boundary_tetrahedron()


@pytest.fixture(scope="session")
def torus4_whitney(torus4):
    K, metric = torus4
    return WhitneyStructure(K, metric)


@pytest.fixture(scope="session")
def torus8_whitney(torus8):
    K, metric = torus8
    return WhitneyStructure(K, metric)


@pytest.fixture(scope="session")
def torus4_3d_whitney(torus4_3d):
    K, metric = torus4_3d
    return WhitneyStructure(K, metric)
