import pytest

from gwcert.field import NumberField


@pytest.fixture(scope="session")
def nf_q2():
    """Q presented with w = 2."""
    return NumberField([-2, 1])


@pytest.fixture(scope="session")
def nf_q32():
    """Q presented with w = 3/2."""
    return NumberField(["-3/2", 1])


@pytest.fixture(scope="session")
def nf_sqrt2():
    """Q(sqrt 2) with w = sqrt 2."""
    return NumberField([-2, 0, 1])


@pytest.fixture(scope="session")
def nf_gauss():
    """Q(i)."""
    return NumberField([1, 0, 1])
