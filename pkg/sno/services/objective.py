from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from sno.core.config import settings, PRESET_PROBLEMS


class ProblemNotFoundError(KeyError):
    """测试函数不存在"""
    pass


class SearchStopped(Exception):
    """搜索正常终止"""
    pass


class BudgetExhausted(SearchStopped):
    """评估次数已用完"""
    pass


class TargetReached(SearchStopped):
    """误差已低于阈值"""
    pass


def ackley(s: np.ndarray) -> float:
    d = s.size
    term1 = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(s * s) / d))
    term2 = -np.exp(np.sum(np.cos(2.0 * np.pi * s)) / d)
    return float(term1 + term2 + 20.0 + np.e)


def bent_cigar(s: np.ndarray) -> float:
    return float(s[0] ** 2 + 1e6 * np.sum(s[1:] ** 2))


def griewank(s: np.ndarray) -> float:
    i = np.arange(1, s.size + 1)
    return float(np.sum(s * s) / 4000.0 - np.prod(np.cos(s / np.sqrt(i))) + 1.0)


def rastrigin(s: np.ndarray) -> float:
    return float(10.0 * s.size + np.sum(s * s - 10.0 * np.cos(2.0 * np.pi * s)))


def rosenbrock(s: np.ndarray) -> float:
    return float(np.sum(100.0 * (s[1:] - s[:-1] ** 2) ** 2 + (1.0 - s[:-1]) ** 2))


def sphere(s: np.ndarray) -> float:
    return float(np.sum(s * s))


FUNCTIONS: Dict[str, Callable[[np.ndarray], float]] = {
    "ackley": ackley,
    "bent_cigar": bent_cigar,
    "griewank": griewank,
    "rastrigin": rastrigin,
    "rosenbrock": rosenbrock,
    "sphere": sphere,
}

# 已知最优解位置
OPTIMIZERS: Dict[str, float] = {
    "ackley": 0.0,
    "bent_cigar": 0.0,
    "griewank": 0.0,
    "rastrigin": 0.0,
    "rosenbrock": 1.0,
    "sphere": 0.0,
}


@dataclass(frozen=True, eq=False)
class Problem:
    """边界约束的单目标问题"""
    name: str
    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    optimum_value: float
    function: Callable[[np.ndarray], float] = field(repr=False, compare=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if self.lower.shape != (self.dimension,) or self.upper.shape != (self.dimension,):
            raise ValueError("bounds must have one entry per dimension")
        if not np.all(self.lower < self.upper):
            raise ValueError("every lower bound must be below its upper bound")
        if not np.isfinite(self.optimum_value):
            raise ValueError("optimum_value must be finite")
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

    @classmethod
    def from_name(cls, name: str, dimension: int, bound: Optional[float] = None) -> "Problem":
        """按名称构建预设问题，搜索范围为 [-bound, bound]^d"""
        key = name.lower()
        if key not in FUNCTIONS:
            available = ", ".join(FUNCTIONS.keys())
            raise ProblemNotFoundError(f"Problem '{name}' 不存在。可用: {available}")

        preset = PRESET_PROBLEMS[key]
        half_width = bound or preset["bound"] or settings.DEFAULT_BOUND
        return cls(
            name=key,
            dimension=dimension,
            lower=np.full(dimension, -float(half_width)),
            upper=np.full(dimension, float(half_width)),
            optimum_value=float(preset["optimum_value"]),
            function=FUNCTIONS[key],
        )

    def known_optimizer(self) -> np.ndarray:
        """已知全局最优解"""
        return np.full(self.dimension, OPTIMIZERS[self.name])

    def error(self, value: float) -> float:
        return value - self.optimum_value


@dataclass
class EvaluationBudget:
    fes_max: int
    fes: int = 0
    error_threshold: float = 1e-8

    def __post_init__(self):
        if self.fes_max <= 0:
            raise ValueError("fes_max must be positive")

    @property
    def exhausted(self) -> bool:
        return self.fes >= self.fes_max


def budget_delta(budget: EvaluationBudget) -> float:
    """δ = FES / FES_max"""
    return budget.fes / budget.fes_max


def repair_bounds(point: np.ndarray, problem: Problem) -> np.ndarray:
    """越界的维度截断到对应边界"""
    return np.clip(point, problem.lower, problem.upper)


class Evaluator:
    """带预算计数的目标函数评估，同时维护 best-so-far 与各阶段的评估次数"""

    PHASES = ("init", "region_search", "point_search", "space_net", "population")

    def __init__(self, problem: Problem, budget: EvaluationBudget):
        self.problem = problem
        self.budget = budget
        self.best_position: Optional[np.ndarray] = None
        self.best_value = np.inf
        self.phase_evaluations: Dict[str, int] = {phase: 0 for phase in self.PHASES}

    @property
    def delta(self) -> float:
        return budget_delta(self.budget)

    @property
    def best_error(self) -> float:
        return self.problem.error(self.best_value)

    def evaluate(self, point: np.ndarray, phase: str = "init") -> float:
        """评估一个已修复边界的解"""
        if self.budget.exhausted:
            raise BudgetExhausted(f"fes_max={self.budget.fes_max} reached")
        if phase != "init" and self.best_error < self.budget.error_threshold:
            raise TargetReached(f"error {self.best_error:.3e} below threshold")

        value = self.problem.function(point)
        self.budget.fes += 1
        self.phase_evaluations[phase] += 1

        if value < self.best_value:
            self.best_value = value
            self.best_position = point.copy()

        return value


def evaluate(problem: Problem, point: np.ndarray, budget: EvaluationBudget) -> float:
    """单次评估 (不维护 best-so-far 时使用)"""
    return Evaluator(problem, budget).evaluate(point)
