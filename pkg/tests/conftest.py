import pytest

from hilbert_shimura.numfield import QuadraticField
from hilbert_shimura.pipeline import FIXTURE_DIR, Example
from hilbert_shimura.quatalg import QuaternionAlgebra, load_order_fixture


@pytest.fixture(scope="session")
def K():
    return QuadraticField(5)


@pytest.fixture(scope="session")
def B(K):
    return QuaternionAlgebra(K, -1, -1)


@pytest.fixture(scope="session")
def R(B):
    return load_order_fixture(FIXTURE_DIR / "qsqrt5_R.json", B)


@pytest.fixture(scope="session")
def I(B):
    return load_order_fixture(FIXTURE_DIR / "qsqrt5_I.json", B)


@pytest.fixture(scope="session")
def example():
    return Example()


@pytest.fixture(scope="session")
def S(example):
    return example.S
