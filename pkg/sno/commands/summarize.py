from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from sno.commands import UsageError
from sno.ingestion.results_parser import ResultsFormatError, load_results_files, load_convergence_runs
from sno.services.artifacts import write_table_csv

SUMMARY_COLUMNS = ["progress_pct", "median_best_error", "mean_diversity", "mean_xpl_pct", "mean_xpt_pct"]
PROGRESS_STEP = 0.5


def progress_grid() -> np.ndarray:
    """收敛过程百分比 0, 0.5, ..., 100"""
    return np.linspace(0.0, 100.0, int(100 / PROGRESS_STEP) + 1)


def align_run(run: pd.DataFrame, fes_max: int, progress: np.ndarray) -> pd.DataFrame:
    """每个进度点取不晚于该点的最后一个样本 (阶梯插值)"""
    fes = run["fes"].to_numpy()
    targets = progress / 100.0 * fes_max
    idx = np.searchsorted(fes, targets, side="right") - 1
    idx = np.clip(idx, 0, len(fes) - 1)
    aligned = run.iloc[idx].reset_index(drop=True)
    aligned.insert(0, "progress_pct", progress)
    return aligned


def summarize_runs(runs: List[pd.DataFrame], fes_max: int) -> pd.DataFrame:
    """所有试验在同一进度点上的中位数误差与平均多样性"""
    progress = progress_grid()
    stacked = pd.concat([align_run(run, fes_max, progress) for run in runs], ignore_index=True)
    grouped = stacked.groupby("progress_pct", sort=True)
    return pd.DataFrame({
        "progress_pct": progress,
        "median_best_error": grouped["best_error"].median().to_numpy(),
        "mean_diversity": grouped["diversity"].mean().to_numpy(),
        "mean_xpl_pct": grouped["xpl_pct"].mean().to_numpy(),
        "mean_xpt_pct": grouped["xpt_pct"].mean().to_numpy(),
    })


def cmd_summarize(
    out_dir: str,
    problem: Optional[str] = None,
    dimension: Optional[int] = None,
) -> Dict[str, Any]:
    """按收敛进度汇总每个 (函数, 维度) 的所有试验"""
    root = Path(out_dir)
    if not root.is_dir():
        raise UsageError(f"results directory not found: {out_dir}")

    written = []
    for _, payload in load_results_files(root):
        name, dim = payload["problem"], int(payload["dimension"])
        if problem is not None and name != problem.lower():
            continue
        if dimension is not None and dim != dimension:
            continue
        if "fes_max" not in payload:
            raise ResultsFormatError(f"results for {name} d={dim} carry no fes_max")

        runs = load_convergence_runs(root, name, dim)
        if not runs:
            raise ResultsFormatError(f"no convergence files for {name} d={dim} in {out_dir}")

        frame = summarize_runs(runs, int(payload["fes_max"]))
        path = root / f"summary_{name}_{dim}.csv"
        write_table_csv(frame.to_dict("records"), path, SUMMARY_COLUMNS)
        written.append(str(path))

    if not written:
        raise UsageError(f"nothing to summarize in {out_dir}")
    return {"status": "success", "command": "summarize", "files": written}
