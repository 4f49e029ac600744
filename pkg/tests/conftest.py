import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from casoratian import DeltaSchedule, PoleModel

small_fraction = st.fractions(min_value=-10, max_value=10, max_denominator=12)


def rational_matrix(n: int):
    return st.lists(st.lists(small_fraction, min_size=n, max_size=n), min_size=n, max_size=n)


def odd_poles(m: int) -> list[int]:
    """``m`` shared poles ``2(m-l)+3``: strictly separated odd integers."""
    return [2 * (m - ell) + 3 for ell in range(m)]


SCHEDULES = {
    "const_1": DeltaSchedule.constant(1),
    "const_-1": DeltaSchedule.constant(-1),
    "harmonic": DeltaSchedule.harmonic(1, 1, 1),
}


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def two_one_model():
    return PoleModel.shared([2, 1])


def random_fraction(rng: random.Random, lo: int = -10, hi: int = 10, den: int = 9) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))
