import math
from dataclasses import dataclass
from typing import List, Dict, Any

import numpy as np

from sno.core.schedule import best_value_weight


class TopologyError(ValueError):
    """网格拓扑配置错误"""
    pass


@dataclass
class RegionTable:
    """所有区域的统计量，按区域索引存放

    区域 (i, j) 的四个角点为网格上的 (i, j), (i, j+1), (i+1, j), (i+1, j+1)。
    """
    corners: np.ndarray                 # (h, 4) elastic point indices
    visits_a: np.ndarray                # I^a, 被选中次数
    visits_b: np.ndarray                # I^b, 未被选中次数
    prev_corner_objectives: np.ndarray  # (h, 4)
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def h(self) -> int:
        return self.corners.shape[0]

    def best_corner_ids(self, objectives: np.ndarray) -> np.ndarray:
        """每个区域中目标值最小的角点"""
        corner_f = objectives[self.corners]
        return self.corners[np.arange(self.h), np.argmin(corner_f, axis=1)]


def build_grid_topology(n_p: int, alpha_init: float = 0.5, beta_init: float = 0.1) -> RegionTable:
    """在 √n_p × √n_p 的逻辑网格上建立 h = (√n_p − 1)² 个区域"""
    side = math.isqrt(n_p)
    if n_p < 4 or side * side != n_p:
        raise TopologyError(f"n_p must be a perfect square >= 4, got {n_p}")

    corners = []
    for i in range(side - 1):
        for j in range(side - 1):
            corners.append([
                i * side + j,
                i * side + j + 1,
                (i + 1) * side + j,
                (i + 1) * side + j + 1,
            ])
    corners = np.asarray(corners, dtype=np.intp)
    h = corners.shape[0]
    return RegionTable(
        corners=corners,
        visits_a=np.ones(h, dtype=np.int64),
        visits_b=np.ones(h, dtype=np.int64),
        prev_corner_objectives=np.zeros((h, 4)),
        alpha=np.full(h, float(alpha_init)),
        beta=np.full(h, float(beta_init)),
    )


def _normalize(values: np.ndarray) -> np.ndarray:
    """跨区域的 min-max 归一化，所有值相同时返回 0.5"""
    low, high = values.min(), values.max()
    if high == low:
        return np.full(values.shape, 0.5)
    return (values - low) / (high - low)


def compute_expected_values(regions: RegionTable, objectives: np.ndarray, delta: float) -> np.ndarray:
    """计算每个区域的期望值 e_i: 访问比 + 角点改进量 + 最佳角点质量"""
    corner_f = objectives[regions.corners]
    ratio = regions.visits_b / regions.visits_a
    improvement = np.sum(regions.prev_corner_objectives - corner_f, axis=1)
    best_f = corner_f.min(axis=1)
    return (
        _normalize(ratio)
        + _normalize(improvement)
        + best_value_weight(delta) * (1.0 - _normalize(best_f))
    )


def record_region_visit(regions: RegionTable, selected_index: int) -> None:
    """被选中的区域 I^a + 1，其余区域 I^b + 1"""
    regions.visits_a[selected_index] += 1
    regions.visits_b += 1
    regions.visits_b[selected_index] -= 1


def nearest_elastic_points(nu: np.ndarray, n_a: int, positions: np.ndarray) -> np.ndarray:
    """距离 ν 最近的 n_a 个弹性点，距离相同时索引小者优先"""
    distances = np.linalg.norm(positions - nu, axis=1)
    return np.argsort(distances, kind="stable")[:n_a]


def top_rho_pool(objectives: np.ndarray, rho: float) -> np.ndarray:
    """目标值最好的 max(1, ⌊ρ·n_p⌋) 个弹性点"""
    size = max(1, int(math.floor(rho * objectives.size)))
    return np.argsort(objectives, kind="stable")[:size]


class SpaceNet:
    """空间网: 弹性点及其区域"""

    def __init__(self, positions: np.ndarray, objectives: np.ndarray, alpha_init: float, beta_init: float):
        self.positions = positions
        self.objectives = objectives
        self.n_p = positions.shape[0]
        self.side = math.isqrt(self.n_p)
        self.regions = build_grid_topology(self.n_p, alpha_init, beta_init)
        self.regions.prev_corner_objectives = objectives[self.regions.corners].copy()

        # 每个弹性点所属的区域; home_region 取索引最小者
        self.memberships: List[List[int]] = [[] for _ in range(self.n_p)]
        for k, corners in enumerate(self.regions.corners):
            for point in corners:
                self.memberships[point].append(k)
        self.home_region = np.array([min(m) for m in self.memberships], dtype=np.intp)

    def grid_index(self, point: int):
        return divmod(point, self.side)

    def expected_values(self, delta: float) -> np.ndarray:
        """计算期望值，并刷新上一轮的角点目标值快照"""
        values = compute_expected_values(self.regions, self.objectives, delta)
        self.regions.prev_corner_objectives = self.objectives[self.regions.corners].copy()
        return values

    def replace(self, point: int, position: np.ndarray, value: float) -> bool:
        """仅当目标值更好时替换弹性点"""
        if value < self.objectives[point]:
            self.positions[point] = position
            self.objectives[point] = value
            return True
        return False

    def snapshot_rows(self) -> List[Dict[str, Any]]:
        """导出每个弹性点: point_id, 网格行列, 坐标, 目标值"""
        rows = []
        for point in range(self.n_p):
            row, col = self.grid_index(point)
            rows.append({
                "point_id": point,
                "row": row,
                "col": col,
                "position": self.positions[point].copy(),
                "objective": float(self.objectives[point]),
            })
        return rows
