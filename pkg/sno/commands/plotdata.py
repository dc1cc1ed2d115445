import logging
from pathlib import Path
from typing import List, Optional

import numpy as np

from sno.commands import UsageError
from sno.ingestion.results_parser import load_snapshot, coordinate_columns
from sno.services.objective import Problem

logger = logging.getLogger(__name__)

AXIS_NAMES = ("x", "y", "z")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def cmd_snapshot_plotdata(net_csv_path: Optional[str], include_populations: bool = False) -> str:
    """把空间网快照转成空白分隔的列 (2 维: x y f)，可直接交给 gnuplot 等工具"""
    if not net_csv_path:
        raise UsageError("snapshot-plotdata needs a net snapshot CSV path")
    path = Path(net_csv_path)
    if not path.is_file():
        raise UsageError(f"snapshot not found: {net_csv_path}")

    frame = load_snapshot(path)
    if not include_populations:
        frame = frame[frame["kind"] == "elastic"]

    columns = coordinate_columns(frame)
    if len(columns) > 3:
        logger.warning("%s has d=%d, emitting the first two coordinates only", path.name, len(columns))
        columns = columns[:2]

    header = list(AXIS_NAMES[:len(columns)]) + ["f"]
    if include_populations:
        header.append("kind")

    lines: List[str] = ["# " + " ".join(header)]
    for _, row in frame.iterrows():
        fields = [_fmt(row[c]) for c in columns] + [_fmt(row["objective"])]
        if include_populations:
            fields.append(str(row["kind"]))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def cmd_landscape_plotdata(problem_name: str, resolution: int = 101, bound: Optional[float] = None) -> str:
    """2 维目标函数地形，每条扫描线之间空一行 (splot 格式)"""
    if resolution < 2:
        raise UsageError(f"resolution must be at least 2, got {resolution}")
    problem = Problem.from_name(problem_name, 2, bound)

    xs = np.linspace(problem.lower[0], problem.upper[0], resolution)
    ys = np.linspace(problem.lower[1], problem.upper[1], resolution)

    lines: List[str] = [f"# x y f ({problem.name})"]
    for x in xs:
        for y in ys:
            value = problem.function(np.array([x, y]))
            lines.append(f"{_fmt(x)} {_fmt(y)} {_fmt(value)}")
        lines.append("")
    return "\n".join(lines) + "\n"
