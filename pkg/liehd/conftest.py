# Shared liehd test fixtures

import pytest

from liehd.algebra_core import Algebra, Element, build_block_diagonal, build_matrix_algebra
from liehd.zeroprod_solver import zero_product_span


def unit(algebra: Algebra, label: str) -> Element:
    """Basis element by label"""
    return algebra.basis_element(algebra.labels.index(label))


@pytest.fixture(scope="session")
def m1():
    return build_matrix_algebra(1)


@pytest.fixture(scope="session")
def m2():
    return build_matrix_algebra(2)


@pytest.fixture(scope="session")
def m3():
    return build_matrix_algebra(3)


@pytest.fixture(scope="session")
def m2m2():
    return build_block_diagonal([2, 2])


@pytest.fixture(scope="session")
def m3m2():
    return build_block_diagonal([3, 2])


@pytest.fixture(scope="session")
def span_m2(m2):
    return zero_product_span(m2, seed=0)


@pytest.fixture(scope="session")
def span_m3(m3):
    return zero_product_span(m3, seed=0)


@pytest.fixture(scope="session")
def span_m2m2(m2m2):
    return zero_product_span(m2m2, seed=0)


@pytest.fixture(scope="session")
def span_m3m2(m3m2):
    return zero_product_span(m3m2, seed=0)


@pytest.fixture(scope="session")
def m2m3():
    return build_block_diagonal([2, 3])
