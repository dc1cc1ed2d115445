from dataclasses import dataclass, asdict
from typing import List, Optional, Tuple, Dict, Any, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from sno.core.sno import SnoState


@dataclass
class ConvergenceSample:
    fes: int
    best_error: float
    n_s: int
    n_x: int
    diversity: float
    xpl_pct: float
    xpt_pct: float

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class NetSnapshot:
    """某一评估次数时的空间网与当前 explorers / miners"""
    checkpoint: int
    fes: int
    points: List[Dict[str, Any]]
    explorers: np.ndarray
    explorer_objectives: np.ndarray
    miners: np.ndarray
    miner_objectives: np.ndarray

    def to_rows(self) -> List[Dict[str, Any]]:
        """展开为 CSV 行: kind, point_id, row, col, x0..x{d-1}, objective"""
        rows = []
        for point in self.points:
            rows.append(_row("elastic", point["point_id"], point["row"], point["col"],
                             point["position"], point["objective"]))
        for kind, positions, values in (
            ("explorer", self.explorers, self.explorer_objectives),
            ("miner", self.miners, self.miner_objectives),
        ):
            for i, (position, value) in enumerate(zip(positions, values)):
                rows.append(_row(kind, i, -1, -1, position, value))
        return rows


def _row(kind: str, point_id: int, row: int, col: int, position: np.ndarray, objective: float) -> Dict[str, Any]:
    record = {"kind": kind, "point_id": int(point_id), "row": int(row), "col": int(col)}
    for j, value in enumerate(position):
        record[f"x{j}"] = float(value)
    record["objective"] = float(objective)
    return record


def population_diversity(points: np.ndarray) -> float:
    """Div = (1/d) Σ_j (1/n) Σ_i |median_j − p_ij|"""
    points = np.atleast_2d(points)
    median = np.median(points, axis=0)
    return float(np.mean(np.abs(points - median)))


def exploration_exploitation(div: float, div_max: float) -> Tuple[float, float]:
    """探索 / 开发百分比 (XPL%, XPT%)"""
    if div_max <= 0.0:
        return 0.0, 100.0
    xpl = 100.0 * div / div_max
    xpt = 100.0 * abs(div - div_max) / div_max
    return xpl, xpt


class MetricsRecorder:
    """每 k 次评估记录一次收敛样本，并在检查点保存空间网快照

    快照与样本反映该次评估的结果写回 s / x / p 之后的状态。
    """

    def __init__(self, sample_every: int, snapshots: Optional[List[int]] = None):
        self.sample_every = max(1, int(sample_every))
        self.next_due = 0
        self.div_max = 0.0
        self.samples: List[ConvergenceSample] = []
        self.pending_snapshots: List[int] = sorted(snapshots or [])
        self.snapshots: List[NetSnapshot] = []

    def record_sample(self, state: "SnoState", force: bool = False) -> Optional[ConvergenceSample]:
        """到期时记录一次样本；force 用于初始化后与结束时"""
        fes = state.evaluator.budget.fes
        if not force and fes < self.next_due:
            return None
        if self.samples and self.samples[-1].fes == fes:
            return None

        population = np.vstack([state.explorers, state.miners])
        div = population_diversity(population)
        self.div_max = max(self.div_max, div)
        xpl, xpt = exploration_exploitation(div, self.div_max)

        sample = ConvergenceSample(
            fes=fes,
            best_error=float(state.evaluator.best_error),
            n_s=len(state.explorers),
            n_x=len(state.miners),
            diversity=div,
            xpl_pct=xpl,
            xpt_pct=xpt,
        )
        self.samples.append(sample)
        self.next_due = (fes // self.sample_every + 1) * self.sample_every
        return sample

    def on_evaluation(self, state: "SnoState", fes: int) -> None:
        """每次评估结果写回状态后调用: 到达检查点保存快照，跨过 k 的整数倍时记录样本"""
        while self.pending_snapshots and fes >= self.pending_snapshots[0]:
            self.snapshots.append(self.capture_snapshot(state, self.pending_snapshots.pop(0)))
        if fes >= self.next_due:
            self.record_sample(state)

    def flush_snapshots(self, state: "SnoState") -> None:
        """提前终止时，未到达的检查点使用最终状态"""
        while self.pending_snapshots:
            self.snapshots.append(self.capture_snapshot(state, self.pending_snapshots.pop(0)))

    @staticmethod
    def capture_snapshot(state: "SnoState", checkpoint: int) -> NetSnapshot:
        return NetSnapshot(
            checkpoint=checkpoint,
            fes=state.evaluator.budget.fes,
            points=state.net.snapshot_rows(),
            explorers=state.explorers.copy(),
            explorer_objectives=state.explorer_f.copy(),
            miners=state.miners.copy(),
            miner_objectives=state.miner_f.copy(),
        )
