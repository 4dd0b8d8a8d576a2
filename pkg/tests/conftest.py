import pytest

from dgorbits import groups as G
from dgorbits import tuples as T


@pytest.fixture(scope="session")
def s3():
    return G.symmetric(3)


@pytest.fixture(scope="session")
def d4():
    return G.dihedral(4)


@pytest.fixture(scope="session")
def q8():
    return G.quaternion(8)


@pytest.fixture(scope="session")
def d5():
    return G.dihedral(5)


@pytest.fixture(scope="session")
def a5():
    return G.alternating(5)


@pytest.fixture(scope="session")
def s3_n1(s3):
    return T.enumerate_classes(s3, 1)


@pytest.fixture(scope="session")
def s3_n2(s3):
    return T.enumerate_classes(s3, 2)


@pytest.fixture(scope="session")
def d4_n2(d4):
    return T.enumerate_classes(d4, 2)


@pytest.fixture(scope="session")
def a5_n1(a5):
    return T.enumerate_classes(a5, 1)
