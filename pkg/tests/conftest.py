import pytest

from fractions import Fraction

from etacong import search_good_congruences


@pytest.fixture(scope="session")
def search_57_61():
    """One full search run for alpha = 57/61, shared across test modules."""
    return search_good_congruences(Fraction(57, 61))
