import numpy as np
import pytest

from mechpoly import matching_pennies_game, screening_game


@pytest.fixture
def mp2():
    return matching_pennies_game()


@pytest.fixture
def screen1():
    return screening_game()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
