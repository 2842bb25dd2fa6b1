import pytest

from celldof import catalog


@pytest.fixture(scope="session")
def entry_v():
    return catalog("V")


@pytest.fixture(scope="session")
def entry_d():
    return catalog("D")


@pytest.fixture(scope="session")
def entry_2v():
    return catalog("2V")


@pytest.fixture(scope="session")
def entry_y():
    return catalog("Y")


@pytest.fixture(scope="session")
def entry_2y():
    return catalog("2Y")
