"""δ 驱动的参数调整函数

δ = FES / FES_max 是所有调度的唯一输入，每次使用前都由实时的评估次数重新计算。
"""
import math
from typing import Tuple


def lambda_adjust(delta: float, a: float, b: float) -> float:
    """λ(δ)_a^b = a + δ(b − a)"""
    return a + delta * (b - a)


def _ceil(value: float) -> int:
    # 0.1 * 64 在浮点下可能略大于或略小于精确值
    return math.ceil(round(value, 9))


def region_candidate_count(delta: float, h: int, mode: str = "shrink") -> int:
    """轮盘赌候选区域数 ⌈m⌉"""
    if mode == "shrink":
        fraction = lambda_adjust(delta, 1.0, 0.1)
    else:
        fraction = lambda_adjust(delta, 0.1, 1.0)
    return min(h, max(1, _ceil(fraction * h)))


def tournament_probability(delta: float) -> float:
    """参考点使用锦标赛选择的概率 λ(δ)_{0.1}^{1.0}"""
    return lambda_adjust(delta, 0.1, 1.0)


def best_value_weight(delta: float) -> float:
    """期望值第三项权重 λ(δ)_2^1"""
    return lambda_adjust(delta, 2.0, 1.0)


def attracted_count(delta: float, n_a_max: int, n_p: int) -> int:
    """n_a = ⌈n_a,max · δ⌉，至少为 1"""
    return min(n_p, max(1, _ceil(n_a_max * delta)))


def rho_from_draw(phi: float, rho_max: float) -> float:
    """ρ = λ(φ)_{0.1}^{ρ_max}"""
    return lambda_adjust(phi, 0.1, rho_max)


def population_size(delta: float, n_init: int, n_end: int) -> int:
    """n = λ(δ^(1−√δ))_{n_init}^{n_end}，取整"""
    progress = delta ** (1.0 - math.sqrt(delta))
    return int(round(lambda_adjust(progress, n_init, n_end)))


def population_sizes(delta: float, n_s: Tuple[int, int], n_x: Tuple[int, int]) -> Tuple[int, int]:
    """explorers 与 miners 的目标规模"""
    return population_size(delta, *n_s), population_size(delta, *n_x)


def branch_probability(delta: float, exponent: float) -> float:
    """以参考点为中心的分支概率 δ^c"""
    return delta ** exponent
