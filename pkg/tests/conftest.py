import os

import pytest

from src.sampling import multiplier as mult
from src.sampling.multiplier import OperatorFamily
from src.sampling.signals import combination, sinc_signal

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def family_path(name: str) -> str:
    return os.path.join(DATA_DIR, "families", name)


def signal_path(name: str) -> str:
    return os.path.join(DATA_DIR, "signals", name)


# Small grids keep the criterion tests fast
FAST_PROFILE = {"initial_grid": 256, "refine_levels": 2}


@pytest.fixture
def shannon_family():
    return OperatorFamily(members=(mult.identity(),), name="shannon")


@pytest.fixture
def vaaler_family():
    return OperatorFamily(members=(mult.identity(), mult.derivative()), name="vaaler")


@pytest.fixture
def littmann3_family():
    return mult.power_family(mult.derivative(), 3)


@pytest.fixture
def shifted3_family():
    return OperatorFamily(members=tuple(mult.shift(a) for a in (0.0, 0.7, 1.9)), name="shifted3")


@pytest.fixture
def sinc_at_zero():
    return sinc_signal()


@pytest.fixture
def three_term_signal():
    return combination([1.0, 0.5, -0.25], [0.0, 0.5, -1.3])
