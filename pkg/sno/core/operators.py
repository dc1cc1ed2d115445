"""候选解生成公式

所有函数都是纯函数: 随机数由调用者抽取后传入，便于与逐行实现逐项核对。
"""
from typing import Tuple

import numpy as np


def crossover_mask(d: int, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """维度 j 取新值当且仅当 φ_c < α 或 j = j_rand"""
    j_rand = rng.integers(d)
    mask = rng.random(d) < alpha
    mask[j_rand] = True
    return mask


def crossover(base: np.ndarray, mutant: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, mutant, base)


def region_mutant(
    reference: np.ndarray,
    own: np.ndarray,
    donor1: np.ndarray,
    donor2: np.ndarray,
    beta: float,
    toward_reference: np.ndarray,
) -> np.ndarray:
    """区域搜索: p^sel + β(s_r1 − s_r2)，否则 s_i + β(p^sel − s_r1)"""
    return np.where(
        toward_reference,
        reference + beta * (donor1 - donor2),
        own + beta * (reference - donor1),
    )


def point_mutant(
    reference: np.ndarray,
    own: np.ndarray,
    donor1: np.ndarray,
    donor2: np.ndarray,
    beta: float,
    toward_reference: np.ndarray,
) -> np.ndarray:
    """点搜索: p^top-ρ + β(x_r1 − x_r2)，否则 x_φx + β(x_r1 − x_r2)"""
    difference = beta * (donor1 - donor2)
    return np.where(toward_reference, reference + difference, own + difference)


def net_references(
    nu: np.ndarray,
    point: np.ndarray,
    donor1: np.ndarray,
    donor2: np.ndarray,
    beta: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """弹性点移动的两个参考点 p^a, p^b"""
    difference = beta * (donor1 - donor2)
    p_a = nu + difference
    p_b = point + beta * (nu - point) + difference
    return p_a, p_b


def closest_to(first: np.ndarray, second: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Dist_min: 返回 first/second 中离 target 更近者，距离相同取 first"""
    if np.linalg.norm(second - target) < np.linalg.norm(first - target):
        return second
    return first


def blended_miner(
    reference: np.ndarray,
    uniform: np.ndarray,
    delta: float,
    blend: np.ndarray,
) -> np.ndarray:
    """种群调整的新 miner v_p: δ²·p + (1 − δ²)·U(L, U)，否则直接取 p"""
    weight = delta * delta
    return np.where(blend, weight * reference + (1.0 - weight) * uniform, reference)


def distinct_indices(n: int, count: int, exclude: int, rng: np.random.Generator) -> np.ndarray:
    """从 [0, n) 中抽取 count 个互不相同且不等于 exclude 的索引"""
    if exclude < 0:
        return rng.choice(n, size=count, replace=False)
    picks = rng.choice(n - 1, size=count, replace=False)
    return picks + (picks >= exclude)


def tournament(candidates: np.ndarray, objectives: np.ndarray, size: int, rng: np.random.Generator) -> int:
    """锦标赛选择: 随机抽取 size 个参赛者，目标值最小者胜出"""
    players = rng.choice(candidates, size=min(size, candidates.size), replace=False)
    return int(players[np.argmin(objectives[players])])
