import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from sno.services.metrics import ConvergenceSample, NetSnapshot

# 17 位有效数字保证浮点数无损往返
FLOAT_FORMAT = "%.17g"

CONVERGENCE_COLUMNS = ["fes", "best_error", "n_s", "n_x", "diversity", "xpl_pct", "xpt_pct"]


def convergence_filename(problem: str, dimension: int, trial: int) -> str:
    return f"convergence_{problem}_{dimension}_{trial}.csv"


def snapshot_filename(problem: str, dimension: int, trial: int, checkpoint: int) -> str:
    return f"net_{problem}_{dimension}_{trial}_{checkpoint}.csv"


def results_filename(problem: str, dimension: int) -> str:
    return f"results_{problem}_{dimension}.json"


def write_convergence_csv(samples: Sequence[ConvergenceSample], path: Path) -> Path:
    """写出收敛曲线"""
    frame = pd.DataFrame([s.to_row() for s in samples], columns=CONVERGENCE_COLUMNS)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_snapshot_csv(snapshot: NetSnapshot, path: Path) -> Path:
    """写出空间网快照 (弹性点 + 当前 explorers / miners)"""
    frame = pd.DataFrame(snapshot.to_rows())
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_table_csv(rows: List[Dict[str, Any]], path: Path, columns: List[str]) -> Path:
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_results_json(payload: Dict[str, Any], path: Path) -> Path:
    """写出结果文件 (配置回显 + 种子 + 最终误差)"""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2)
        f.write("\n")
    return path
