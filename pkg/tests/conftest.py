import pytest

from walklab import build_law
from walklab.kernels import build_kernels

SRW_PAIRS = [(-1, "1/2"), (1, "1/2")]
L1_PAIRS = [(-2, "1/6"), (-1, "1/6"), (0, "1/6"), (1, "1/2")]
SPAN3_PAIRS = [(-1, "2/3"), (2, "1/3")]


@pytest.fixture(scope="session")
def srw():
    return build_law(SRW_PAIRS, "srw")


@pytest.fixture(scope="session")
def l1():
    return build_law(L1_PAIRS, "l1")


@pytest.fixture(scope="session")
def span3():
    return build_law(SPAN3_PAIRS, "span3")


@pytest.fixture(scope="session")
def srw_kernels(srw):
    return build_kernels(srw)


@pytest.fixture(scope="session")
def l1_kernels(l1):
    return build_kernels(l1)


@pytest.fixture(scope="session")
def span3_kernels(span3):
    return build_kernels(span3)
