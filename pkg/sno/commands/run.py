import logging
import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from sno.commands import UsageError
from sno.core.config import settings, SnoConfig
from sno.core.sno import SpaceNetOptimizer, build_config
from sno.services.objective import FUNCTIONS, Problem, ProblemNotFoundError
from sno.services.artifacts import (
    convergence_filename,
    snapshot_filename,
    results_filename,
    write_convergence_csv,
    write_snapshot_csv,
    write_results_json,
)

logger = logging.getLogger(__name__)

STAGING_DIR = ".staging"


class ExperimentSpec(BaseModel):
    """一次实验: 测试函数 × 维度 × 试验次数"""
    problems: List[str] = Field(min_length=1)
    dimensions: List[int] = Field(min_length=1)
    trials: int = Field(default_factory=lambda: settings.DEFAULT_TRIALS, ge=1)
    seed_base: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    fes_max: Optional[int] = Field(None, gt=0)
    bound: Optional[float] = Field(None, gt=0.0)
    overrides: Dict[str, Any] = Field(default_factory=dict)
    out_dir: Path = Field(default_factory=lambda: Path(settings.OUTPUT_DIR))
    snapshots: List[int] = Field(default_factory=list)
    workers: int = Field(default_factory=lambda: settings.MAX_WORKERS, ge=1)

    @field_validator("problems")
    @classmethod
    def _known_problems(cls, problems: List[str]) -> List[str]:
        names = [p.lower() for p in problems]
        for name in names:
            if name not in FUNCTIONS:
                available = ", ".join(FUNCTIONS.keys())
                raise ProblemNotFoundError(f"Problem '{name}' 不存在。可用: {available}")
        return names

    @field_validator("dimensions")
    @classmethod
    def _positive_dimensions(cls, dimensions: List[int]) -> List[int]:
        if any(d < 1 for d in dimensions):
            raise ValueError("dimensions must be positive")
        return dimensions

    def budget_for(self, dimension: int) -> int:
        """--fes-max 优先, 其次 --config 中的 fes_max, 最后按维度预设"""
        return self.fes_max or self.overrides.get("fes_max") or settings.budget_for(dimension)

    def seed_for(self, trial: int) -> int:
        return self.seed_base + trial

    def config_for(self, dimension: int, trial: int) -> SnoConfig:
        """第 trial 次试验的完整 SnoConfig"""
        overrides = dict(self.overrides)
        if self.snapshots:
            overrides["snapshots"] = self.snapshots
        return build_config(
            overrides,
            fes_max=self.budget_for(dimension),
            seed=self.seed_for(trial),
        )


@dataclass
class TrialTask:
    problem: str
    dimension: int
    bound: Optional[float]
    trial: int
    config: Dict[str, Any]
    staging_dir: str


def run_trial(task: TrialTask) -> Dict[str, Any]:
    """执行单次试验，曲线和快照写入该试验独占的暂存目录"""
    problem = Problem.from_name(task.problem, task.dimension, task.bound)
    config = SnoConfig(**task.config)
    record = SpaceNetOptimizer(config, problem).run()

    staging = Path(task.staging_dir)
    staging.mkdir(parents=True, exist_ok=True)
    write_convergence_csv(
        record.samples,
        staging / convergence_filename(task.problem, task.dimension, task.trial),
    )
    for snapshot in record.snapshots:
        write_snapshot_csv(
            snapshot,
            staging / snapshot_filename(task.problem, task.dimension, task.trial, snapshot.checkpoint),
        )

    return {
        "trial": task.trial,
        "seed": record.seed,
        "final_error": record.final_error,
        "best_value": record.best_value,
        "evaluations": record.evaluations,
        "iterations": record.iterations,
        "stop_reason": record.stop_reason,
        "phase_evaluations": record.phase_evaluations,
    }


def _execute(tasks: List[TrialTask], workers: int) -> List[Dict[str, Any]]:
    """按试验顺序返回结果; workers > 1 时使用进程池"""
    if workers <= 1 or len(tasks) <= 1:
        return [run_trial(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as executor:
        return list(executor.map(run_trial, tasks))


def _merge_staging(staging_dirs: List[Path], out_dir: Path, written: List[Path]) -> Dict[str, int]:
    """单线程按试验顺序把暂存文件移入输出目录"""
    counts = {"convergence": 0, "snapshots": 0}
    for staging in staging_dirs:
        for path in sorted(staging.iterdir()):
            target = out_dir / path.name
            os.replace(path, target)
            written.append(target)
            if path.name.startswith("convergence_"):
                counts["convergence"] += 1
            else:
                counts["snapshots"] += 1
    return counts


def results_payload(
    spec: ExperimentSpec,
    problem: Problem,
    config: SnoConfig,
    outcomes: List[Dict[str, Any]],
) -> Dict[str, Any]:
    """结果文件内容: 配置回显、种子与每次试验的最终误差 (不含时间戳)"""
    echo = config.model_dump()
    echo.pop("seed")
    return {
        "algorithm": settings.ALGORITHM_NAME,
        "problem": problem.name,
        "dimension": problem.dimension,
        "bounds": [float(problem.lower[0]), float(problem.upper[0])],
        "fes_max": config.fes_max,
        "trials": spec.trials,
        "seed_base": spec.seed_base,
        "seeds": [o["seed"] for o in outcomes],
        "config": echo,
        "final_errors": [o["final_error"] for o in outcomes],
        "best_values": [o["best_value"] for o in outcomes],
        "evaluations": [o["evaluations"] for o in outcomes],
        "iterations": [o["iterations"] for o in outcomes],
        "stop_reasons": [o["stop_reason"] for o in outcomes],
        "phase_evaluations": [o["phase_evaluations"] for o in outcomes],
    }


def _cleanup(staging_root: Path, written: List[Path]) -> None:
    for path in written:
        path.unlink(missing_ok=True)
    shutil.rmtree(staging_root, ignore_errors=True)


def cmd_run(spec: ExperimentSpec) -> Dict[str, Any]:
    """运行实验并写出收敛曲线、空间网快照与结果文件"""
    out_dir = Path(spec.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"output directory is not writable: {out_dir} ({e})") from e
    if not os.access(out_dir, os.W_OK):
        raise UsageError(f"output directory is not writable: {out_dir}")

    # 先校验所有配置，避免跑到一半才失败
    plans = []
    for problem_name in spec.problems:
        for dimension in spec.dimensions:
            problem = Problem.from_name(problem_name, dimension, spec.bound)
            configs = [spec.config_for(dimension, trial) for trial in range(spec.trials)]
            if configs[0].fes_max < configs[0].initial_cost:
                raise UsageError(
                    f"fes_max={configs[0].fes_max} is smaller than the initialization cost "
                    f"{configs[0].initial_cost} for {problem_name} d={dimension}"
                )
            plans.append((problem, configs))

    staging_root = out_dir / STAGING_DIR
    written: List[Path] = []
    summary = []
    totals = {"convergence": 0, "snapshots": 0, "results": 0}

    try:
        for problem, configs in plans:
            tasks = [
                TrialTask(
                    problem=problem.name,
                    dimension=problem.dimension,
                    bound=spec.bound,
                    trial=trial,
                    config=config.model_dump(),
                    staging_dir=str(staging_root / f"{problem.name}_{problem.dimension}_{trial}"),
                )
                for trial, config in enumerate(configs)
            ]
            logger.info("running %s d=%d: %d trials", problem.name, problem.dimension, spec.trials)
            outcomes = _execute(tasks, spec.workers)

            counts = _merge_staging([Path(t.staging_dir) for t in tasks], out_dir, written)
            results_path = out_dir / results_filename(problem.name, problem.dimension)
            write_results_json(results_payload(spec, problem, configs[0], outcomes), results_path)
            written.append(results_path)

            totals["convergence"] += counts["convergence"]
            totals["snapshots"] += counts["snapshots"]
            totals["results"] += 1
            errors = np.array([o["final_error"] for o in outcomes])
            summary.append({
                "problem": problem.name,
                "dimension": problem.dimension,
                "fes_max": configs[0].fes_max,
                "median_error": float(np.median(errors)),
                "best_error": float(errors.min()),
            })
    except BaseException:
        logger.warning("run failed, removing %d partial outputs", len(written))
        _cleanup(staging_root, written)
        raise

    shutil.rmtree(staging_root, ignore_errors=True)
    return {
        "status": "success",
        "command": "run",
        "out": str(out_dir),
        "files": totals,
        "results": summary,
    }
