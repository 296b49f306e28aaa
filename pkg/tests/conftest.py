import pytest

from wkac.catalog import all_algebras, load_algebra

ALGEBRA_NAMES = [A.name for A in all_algebras()]


@pytest.fixture(params=ALGEBRA_NAMES)
def algebra(request):
    return load_algebra(request.param)


@pytest.fixture(params=["ns", "ramond"])
def sector(request):
    return request.param
