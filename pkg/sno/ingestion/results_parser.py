import json
import logging
from pathlib import Path
from typing import Any, Dict, Generator, List, Optional, Tuple

import numpy as np
import pandas as pd

from sno.services.stats import ResultTable

logger = logging.getLogger(__name__)

REQUIRED_RESULT_FIELDS = ("algorithm", "problem", "dimension", "final_errors")
SNAPSHOT_COLUMNS = ("kind", "point_id", "row", "col", "objective")


class ResultsFormatError(ValueError):
    """结果文件格式错误"""
    pass


def parse_results_file(path: Path) -> Dict[str, Any]:
    """解析单个结果 JSON 文件"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ResultsFormatError(f"{path}: {e}") from e

    if not isinstance(payload, dict):
        raise ResultsFormatError(f"{path}: expected a JSON object")
    missing = [key for key in REQUIRED_RESULT_FIELDS if key not in payload]
    if missing:
        raise ResultsFormatError(f"{path}: missing fields {missing}")
    return payload


def load_results_files(results_dir: Path) -> Generator[Tuple[Path, Dict[str, Any]], None, None]:
    """遍历目录中的 results_*.json"""
    root = Path(results_dir)
    if not root.is_dir():
        raise ResultsFormatError(f"results directory not found: {results_dir}")

    for path in sorted(root.glob("results_*.json")):
        yield path, parse_results_file(path)


def function_key(problem: str, dimension: int) -> str:
    return f"{problem}_{dimension}"


def load_result_table(results_dir: Path, label: Optional[str] = None) -> ResultTable:
    """把一个目录的结果文件读成 ResultTable，函数键为 <problem>_<dimension>"""
    table = ResultTable(algorithm=label or Path(results_dir).name)
    for path, payload in load_results_files(results_dir):
        key = function_key(payload["problem"], int(payload["dimension"]))
        if key in table.errors:
            raise ResultsFormatError(f"{path}: duplicate results for {key} in {results_dir}")
        table.errors[key] = np.asarray(payload["final_errors"], dtype=float)
        table.sources[key] = str(path)

    if not table.errors:
        raise ResultsFormatError(f"no results_*.json files in {results_dir}")
    return table


def load_snapshot(path: Path) -> pd.DataFrame:
    """读取空间网快照 CSV"""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"snapshot not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in SNAPSHOT_COLUMNS if c not in frame.columns]
    if missing:
        raise ResultsFormatError(f"{path}: missing columns {missing}")
    return frame


def coordinate_columns(frame: pd.DataFrame) -> List[str]:
    """按维度顺序排列的坐标列 x0..x{d-1}"""
    columns = [c for c in frame.columns if c.startswith("x") and c[1:].isdigit()]
    return sorted(columns, key=lambda c: int(c[1:]))


def load_convergence_runs(results_dir: Path, problem: str, dimension: int) -> List[pd.DataFrame]:
    """读取某个 (函数, 维度) 所有试验的收敛曲线，按试验编号排序"""
    root = Path(results_dir)
    runs = []
    prefix = f"convergence_{problem}_{dimension}_"
    for path in root.glob(f"{prefix}*.csv"):
        trial = path.stem[len(prefix):]
        if not trial.isdigit():
            logger.debug("skipping %s", path)
            continue
        runs.append((int(trial), pd.read_csv(path)))
    return [frame for _, frame in sorted(runs, key=lambda item: item[0])]
