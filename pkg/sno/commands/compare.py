import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from sno.commands import UsageError
from sno.core.config import settings
from sno.ingestion.results_parser import load_result_table
from sno.services.artifacts import write_table_csv
from sno.services.stats import average_ranks, pairwise_wilcoxon, summarize_outcomes

logger = logging.getLogger(__name__)

RANK_MODES = ("avg", "best")


def directory_labels(results_dirs: List[str]) -> List[str]:
    """以目录名作为算法标签，重名时追加 _2, _3 ..."""
    labels: List[str] = []
    seen: Dict[str, int] = {}
    for directory in results_dirs:
        name = Path(directory).resolve().name or str(directory)
        seen[name] = seen.get(name, 0) + 1
        labels.append(name if seen[name] == 1 else f"{name}_{seen[name]}")
    return labels


def cmd_compare(
    results_dirs: List[str],
    mode: str = "avg",
    significance: float = 0.05,
    variant: str = "rank-sum",
    out_dir: Optional[str] = None,
) -> Dict[str, Any]:
    """平均排名与两两 Wilcoxon 检验，写出 ranks.csv 与 wilcoxon.csv"""
    if len(results_dirs) < 2:
        raise UsageError("compare needs at least two results directories")
    if mode not in RANK_MODES:
        raise UsageError(f"unknown rank mode '{mode}', expected avg or best")
    if not 0.0 < significance < 1.0:
        raise UsageError(f"significance must lie in (0, 1), got {significance}")
    for directory in results_dirs:
        if not Path(directory).is_dir():
            raise UsageError(f"results directory not found: {directory}")

    labels = directory_labels(results_dirs)
    tables = [load_result_table(Path(d), label) for d, label in zip(results_dirs, labels)]

    ranks = average_ranks(tables, mode=mode)
    rows = pairwise_wilcoxon(tables, significance=significance, variant=variant)
    summary = summarize_outcomes(rows)

    target = Path(out_dir or settings.OUTPUT_DIR)
    target.mkdir(parents=True, exist_ok=True)
    rank_rows = [
        {"algorithm": algorithm, "mode": mode, "mean_rank": rank}
        for algorithm, rank in ranks.items()
    ]
    write_table_csv(rank_rows, target / "ranks.csv", ["algorithm", "mode", "mean_rank"])
    write_table_csv(rows, target / "wilcoxon.csv", ["algorithm_pair", "function", "classification"])
    logger.info("compared %d algorithms on %d functions", len(tables), len(tables[0].errors))

    return {
        "status": "success",
        "command": "compare",
        "mode": mode,
        "significance": significance,
        "ranks": ranks,
        "summary": summary,
        "files": [str(target / "ranks.csv"), str(target / "wilcoxon.csv")],
    }
