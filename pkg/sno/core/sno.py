import logging
from dataclasses import dataclass, field
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from sno.core.config import SnoConfig
from sno.core.operators import (
    crossover_mask,
    crossover,
    region_mutant,
    point_mutant,
    net_references,
    closest_to,
    blended_miner,
    distinct_indices,
    tournament,
)
from sno.core.schedule import (
    region_candidate_count,
    tournament_probability,
    attracted_count,
    rho_from_draw,
    population_sizes,
    branch_probability,
)
from sno.services.objective import (
    Problem,
    EvaluationBudget,
    Evaluator,
    SearchStopped,
    repair_bounds,
)
from sno.services.spacenet import SpaceNet, RegionTable, record_region_visit, nearest_elastic_points, top_rho_pool
from sno.services.metrics import MetricsRecorder, ConvergenceSample, NetSnapshot

logger = logging.getLogger(__name__)


class SnoConfigError(ValueError):
    """SNO 参数设置无效"""
    pass


@dataclass
class SnoState:
    """一次运行的全部状态: explorers s, miners x, 空间网 p, 评估器与迭代数"""
    explorers: np.ndarray
    explorer_f: np.ndarray
    miners: np.ndarray
    miner_f: np.ndarray
    net: SpaceNet
    evaluator: Evaluator
    t: int = 0
    expected: Optional[np.ndarray] = None

    @property
    def best_value(self) -> float:
        return self.evaluator.best_value

    @property
    def best_position(self) -> Optional[np.ndarray]:
        return self.evaluator.best_position


@dataclass
class RunRecord:
    problem: str
    dimension: int
    seed: int
    config: Dict[str, Any]
    best_position: List[float]
    best_value: float
    final_error: float
    evaluations: int
    iterations: int
    stop_reason: str
    phase_evaluations: Dict[str, int]
    samples: List[ConvergenceSample] = field(default_factory=list)
    snapshots: List[NetSnapshot] = field(default_factory=list)


def select_region(
    expected_values: np.ndarray,
    delta: float,
    rng: np.random.Generator,
    regions: Optional[RegionTable] = None,
    mode: str = "shrink",
) -> int:
    """在期望值最高的 ⌈m⌉ 个区域中用轮盘赌选出一个区域"""
    m = region_candidate_count(delta, expected_values.size, mode)
    candidates = np.argsort(-expected_values, kind="stable")[:m]
    weights = expected_values[candidates]
    total = weights.sum()

    if total > 0.0:
        wheel = np.cumsum(weights)
        slot = int(np.searchsorted(wheel, rng.random() * total, side="right"))
        chosen = int(candidates[min(slot, m - 1)])
    else:
        chosen = int(candidates[rng.integers(m)])

    if regions is not None:
        record_region_visit(regions, chosen)
    return chosen


def pick_reference_point(
    net: SpaceNet,
    region: int,
    delta: float,
    rng: np.random.Generator,
    tournament_size: int = 2,
) -> int:
    """以概率 λ(δ)_{0.1}^{1.0} 在区域角点中锦标赛选择，否则取区域最佳角点"""
    corners = net.regions.corners[region]
    if rng.random() < tournament_probability(delta):
        return tournament(corners, net.objectives, tournament_size, rng)
    return int(net.regions.best_corner_ids(net.objectives)[region])


class SpaceNetOptimizer:
    """Space Net Optimization"""

    def __init__(self, config: SnoConfig, problem: Problem, rng: Optional[np.random.Generator] = None):
        self.config = config
        self.problem = problem
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.recorder = MetricsRecorder(config.sample_every, config.snapshots)
        self.state: Optional[SnoState] = None

    def _uniform(self, n: int) -> np.ndarray:
        span = self.problem.upper - self.problem.lower
        return self.problem.lower + self.rng.random((n, self.problem.dimension)) * span

    def _evaluate_all(self, evaluator: Evaluator, points: np.ndarray) -> np.ndarray:
        return np.array([evaluator.evaluate(point, "init") for point in points])

    def initialize(self) -> SnoState:
        """随机初始化 s, x 与空间网的弹性点，并全部评估"""
        cfg = self.config
        if cfg.fes_max < cfg.initial_cost:
            raise SnoConfigError(
                f"fes_max={cfg.fes_max} is smaller than the initialization cost {cfg.initial_cost}"
            )

        budget = EvaluationBudget(fes_max=cfg.fes_max, error_threshold=cfg.error_threshold)
        evaluator = Evaluator(self.problem, budget)

        explorers = self._uniform(cfg.n_s_init)
        explorer_f = self._evaluate_all(evaluator, explorers)
        miners = self._uniform(cfg.n_x_init)
        miner_f = self._evaluate_all(evaluator, miners)
        positions = self._uniform(cfg.n_p)
        objectives = self._evaluate_all(evaluator, positions)

        net = SpaceNet(positions, objectives, cfg.alpha_init, cfg.beta_init)
        self.state = SnoState(explorers, explorer_f, miners, miner_f, net, evaluator)

        self._evaluated()
        self.recorder.record_sample(self.state, force=True)
        return self.state

    def _evaluated(self) -> None:
        """评估结果写回状态后通知记录器"""
        self.recorder.on_evaluation(self.state, self.state.evaluator.budget.fes)

    def _control(self, region: int) -> Tuple[float, float]:
        """区域的交叉率与缩放因子; adapt_parameters 时围绕区域值扰动"""
        regions = self.state.net.regions
        alpha, beta = float(regions.alpha[region]), float(regions.beta[region])
        if self.config.adapt_parameters:
            alpha = float(np.clip(self.rng.normal(alpha, 0.1), 0.0, 1.0))
            beta = float(np.clip(self.rng.normal(beta, 0.1), 0.01, 1.0))
        return alpha, beta

    def _reward(self, region: int, alpha: float, beta: float) -> None:
        if not self.config.adapt_parameters:
            return
        regions = self.state.net.regions
        c = self.config.adapt_rate
        regions.alpha[region] = (1.0 - c) * regions.alpha[region] + c * alpha
        regions.beta[region] = (1.0 - c) * regions.beta[region] + c * beta

    def region_search(self) -> None:
        """区域搜索: 每个 explorer 生成一个候选解 u_i"""
        state, cfg, rng = self.state, self.config, self.rng
        base = state.explorers.copy()
        n, d = base.shape

        for i in range(n):
            delta = state.evaluator.delta
            region = select_region(state.expected, delta, rng, state.net.regions, cfg.region_schedule)
            reference = pick_reference_point(state.net, region, delta, rng, cfg.tournament_size)
            r1, r2 = distinct_indices(n, 2, i, rng)
            alpha, beta = self._control(region)

            mask = crossover_mask(d, alpha, rng)
            toward = rng.random(d) < branch_probability(delta, cfg.c_s)
            mutant = region_mutant(state.net.positions[reference], base[i], base[r1], base[r2], beta, toward)
            u = repair_bounds(crossover(base[i], mutant, mask), self.problem)

            value = state.evaluator.evaluate(u, "region_search")
            if value < state.explorer_f[i]:
                state.explorers[i] = u
                state.explorer_f[i] = value
                self._reward(region, alpha, beta)
                self.space_net_adjust(u, value)
            else:
                self._evaluated()

    def point_search(self) -> None:
        """点搜索: n_x 次，每次随机选一个 miner 并参考 top-ρ 弹性点"""
        state, cfg, rng = self.state, self.config, self.rng
        net = state.net
        base = state.miners.copy()
        n, d = base.shape

        for _ in range(n):
            delta = state.evaluator.delta
            target = int(rng.integers(n))
            pool = top_rho_pool(net.objectives, rho_from_draw(rng.random(), cfg.rho_max))
            reference = int(rng.choice(pool))
            region = net.home_region[reference]
            alpha, beta = float(net.regions.alpha[region]), float(net.regions.beta[region])
            r1, r2 = distinct_indices(n, 2, target, rng)

            mask = crossover_mask(d, alpha, rng)
            toward = rng.random(d) < branch_probability(delta, cfg.c_x)
            mutant = point_mutant(net.positions[reference], base[target], base[r1], base[r2], beta, toward)
            v = repair_bounds(crossover(base[target], mutant, mask), self.problem)

            value = state.evaluator.evaluate(v, "point_search")
            if value < state.miner_f[target]:
                state.miners[target] = v
                state.miner_f[target] = value
                self.space_net_adjust(v, value)
            else:
                self._evaluated()

    def space_net_adjust(self, nu: np.ndarray, value: float) -> None:
        """把距离 ν 最近的 n_a 个弹性点拉向 ν"""
        state, cfg, rng = self.state, self.config, self.rng
        net = state.net
        delta = state.evaluator.delta
        n_a = attracted_count(delta, cfg.n_a_max, net.n_p)
        nearest = nearest_elastic_points(nu, n_a, net.positions)

        # 最近的弹性点直接取 ν，目标值已知
        net.replace(int(nearest[0]), nu.copy(), value)
        self._evaluated()
        if n_a == 1:
            return

        donors = np.vstack([state.explorers, state.miners])
        d = nu.size
        for point in nearest[1:]:
            current = net.positions[point].copy()
            region = net.home_region[point]
            alpha, beta = float(net.regions.alpha[region]), float(net.regions.beta[region])
            r1, r2 = distinct_indices(len(donors), 2, -1, rng)

            p_a, p_b = net_references(nu, current, donors[r1], donors[r2], beta)
            q_a = crossover(current, p_a, crossover_mask(d, alpha, rng))
            q_b = crossover(current, p_b, crossover_mask(d, alpha, rng))
            anchor = nu if rng.random() < delta else current
            q = repair_bounds(closest_to(q_a, q_b, anchor), self.problem)

            net.replace(int(point), q, state.evaluator.evaluate(q, "space_net"))
            self._evaluated()

    def population_adjust(self) -> None:
        """按进度缩减 explorers、扩充 miners (新 miner 为 v_p)"""
        state, cfg, rng = self.state, self.config, self.rng
        net = state.net
        n_s, n_x = population_sizes(
            state.evaluator.delta,
            (cfg.n_s_init, cfg.n_s_end),
            (cfg.n_x_init, cfg.n_x_end),
        )

        if len(state.explorers) > n_s:
            keep = np.sort(np.argsort(state.explorer_f, kind="stable")[:n_s])
            state.explorers = state.explorers[keep]
            state.explorer_f = state.explorer_f[keep]

        lower, upper = self.problem.lower, self.problem.upper
        d = self.problem.dimension
        while len(state.miners) < n_x:
            delta = state.evaluator.delta
            pool = top_rho_pool(net.objectives, rho_from_draw(rng.random(), cfg.rho_max))
            reference = net.positions[int(rng.choice(pool))]
            uniform = lower + rng.random(d) * (upper - lower)
            blend = rng.random(d) < 0.5
            v = repair_bounds(blended_miner(reference, uniform, delta, blend), self.problem)

            value = state.evaluator.evaluate(v, "population")
            state.miners = np.vstack([state.miners, v])
            state.miner_f = np.append(state.miner_f, value)
            self._evaluated()

    def step(self) -> None:
        """一次迭代: 期望值 → 区域搜索 → 点搜索 → 种群调整"""
        state = self.state
        state.expected = state.net.expected_values(state.evaluator.delta)

        self.region_search()
        self.point_search()
        self.population_adjust()

        state.t += 1

    def run(self) -> RunRecord:
        cfg = self.config
        state = self.initialize()
        logger.info(
            "SNO start: %s d=%d seed=%d fes_max=%d",
            self.problem.name, self.problem.dimension, cfg.seed, cfg.fes_max,
        )

        stop_reason = "budget"
        try:
            while cfg.t_max is None or state.t < cfg.t_max:
                self.step()
            stop_reason = "t_max"
        except SearchStopped as e:
            stop_reason = "target" if state.evaluator.best_error < cfg.error_threshold else "budget"
            logger.debug("search stopped: %s", e)

        self.recorder.record_sample(state, force=True)
        self.recorder.flush_snapshots(state)

        evaluator = state.evaluator
        logger.info(
            "SNO end: %s d=%d seed=%d error=%.6e fes=%d t=%d (%s)",
            self.problem.name, self.problem.dimension, cfg.seed,
            evaluator.best_error, evaluator.budget.fes, state.t, stop_reason,
        )
        return RunRecord(
            problem=self.problem.name,
            dimension=self.problem.dimension,
            seed=cfg.seed,
            config=cfg.model_dump(),
            best_position=[float(v) for v in evaluator.best_position],
            best_value=float(evaluator.best_value),
            final_error=float(evaluator.best_error),
            evaluations=evaluator.budget.fes,
            iterations=state.t,
            stop_reason=stop_reason,
            phase_evaluations=dict(evaluator.phase_evaluations),
            samples=list(self.recorder.samples),
            snapshots=list(self.recorder.snapshots),
        )


def build_config(overrides: Optional[Dict[str, Any]] = None, **kwargs: Any) -> SnoConfig:
    """构建 SnoConfig，校验失败统一抛出 SnoConfigError"""
    try:
        return SnoConfig.from_overrides(overrides, **kwargs)
    except ValidationError as e:
        raise SnoConfigError(str(e)) from e


def initialize(config: SnoConfig, problem: Problem, rng: Optional[np.random.Generator] = None) -> SnoState:
    return SpaceNetOptimizer(config, problem, rng).initialize()


def run(config: SnoConfig, problem: Problem) -> RunRecord:
    """执行一次完整的 SNO 运行"""
    return SpaceNetOptimizer(config, problem).run()
