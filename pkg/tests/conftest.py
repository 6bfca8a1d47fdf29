import os

import pytest

from pnsieve.ffield import build_field
from pnsieve.oracle import get_tables

HINTS_PATH = os.path.join(os.path.dirname(__file__), "..", "data",
                          "factor_hints_7.txt")


def hints_file():
    return os.path.abspath(HINTS_PATH)


@pytest.fixture(scope="session")
def ctx35():
    return build_field(3, 1, 5)


@pytest.fixture(scope="session")
def ctx75():
    return build_field(7, 1, 5)


@pytest.fixture(scope="session")
def tabs35(ctx35):
    return get_tables(ctx35)


@pytest.fixture(scope="session")
def tabs75(ctx75):
    return get_tables(ctx75)


@pytest.fixture(scope="session")
def hints7():
    from pnsieve.ntheory import parse_hint_file
    hints, problems = parse_hint_file(hints_file())
    assert not problems
    return hints
