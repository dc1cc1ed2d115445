import numpy as np
import pytest

from sno.core.config import SnoConfig
from sno.services.objective import Problem


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config():
    """小规模配置，单次运行在一秒内完成"""
    return SnoConfig(n_s_init=30, n_p=25, fes_max=3000, seed=7)


@pytest.fixture
def ackley_2d():
    return Problem.from_name("ackley", 2)


@pytest.fixture
def sphere_2d():
    return Problem.from_name("sphere", 2)
