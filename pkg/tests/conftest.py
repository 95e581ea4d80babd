from pathlib import Path

import pytest

import swdelay as sd

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def ex1_path():
    return FIXTURES / "ex1.json"


@pytest.fixture(scope="session")
def ex2_path():
    return FIXTURES / "ex2.json"


@pytest.fixture(scope="session")
def ex1_big_path():
    return FIXTURES / "ex1_big.json"


@pytest.fixture(scope="session")
def infeasible_path():
    return FIXTURES / "infeasible.json"


@pytest.fixture(scope="session")
def ex1(ex1_path):
    return sd.load_system_file(ex1_path)


@pytest.fixture(scope="session")
def ex2(ex2_path):
    return sd.load_system_file(ex2_path)
