import pytest

from torusclosure.field import make_field

QUADRATIC = (-2, 0, 1)
CUBIC = (-1, -3, 0, 1)


@pytest.fixture(scope="session")
def q2():
    return make_field(list(QUADRATIC))


@pytest.fixture(scope="session")
def cubic():
    return make_field(list(CUBIC))
