from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence

import numpy as np
from scipy import stats


class StatsInputError(ValueError):
    """比较数据不一致"""
    pass


class Outcome(str, Enum):
    BETTER = "Better"
    NO_DIFFERENCE = "NoDifference"
    WORSE = "Worse"


@dataclass
class ResultTable:
    """一个算法在各测试函数上每次试验的最终误差"""
    algorithm: str
    errors: Dict[str, np.ndarray] = field(default_factory=dict)
    sources: Dict[str, str] = field(default_factory=dict)

    def trials(self, function: str) -> int:
        return len(self.errors[function])


def _check_tables(tables: Sequence[ResultTable]) -> List[str]:
    """校验函数集合与试验次数一致，返回排序后的函数列表"""
    if len(tables) < 2:
        raise StatsInputError("at least two algorithms are needed for a comparison")

    functions = set(tables[0].errors)
    for table in tables[1:]:
        if set(table.errors) != functions:
            missing = sorted(functions.symmetric_difference(table.errors))
            raise StatsInputError(
                f"function sets differ between '{tables[0].algorithm}' and '{table.algorithm}': {missing}"
            )

    for function in sorted(functions):
        counts = {table.algorithm: table.trials(function) for table in tables}
        if len(set(counts.values())) != 1:
            offending = [
                table.sources.get(function, table.algorithm) for table in tables
            ]
            raise StatsInputError(
                f"trial counts differ for '{function}': {counts} (files: {', '.join(offending)})"
            )
    return sorted(functions)


def average_ranks(tables: Sequence[ResultTable], mode: str = "avg") -> Dict[str, float]:
    """算法的平均排名

    avg: 每个 (函数, 试验) 单元内对所有算法排名后取平均;
    best: 每个函数取各算法最好的一次试验排名后取平均。
    并列取中间名次。
    """
    functions = _check_tables(tables)
    totals = np.zeros(len(tables))
    cells = 0

    for function in functions:
        matrix = np.vstack([np.asarray(table.errors[function], dtype=float) for table in tables])
        if mode == "best":
            totals += stats.rankdata(matrix.min(axis=1))
            cells += 1
        elif mode == "avg":
            ranks = stats.rankdata(matrix, axis=0)
            totals += ranks.sum(axis=1)
            cells += matrix.shape[1]
        else:
            raise StatsInputError(f"unknown rank mode '{mode}', expected avg or best")

    return {table.algorithm: float(total / cells) for table, total in zip(tables, totals)}


def wilcoxon_classify(
    a_errors: Sequence[float],
    b_errors: Sequence[float],
    significance: float = 0.05,
    variant: str = "rank-sum",
) -> Outcome:
    """Wilcoxon 检验: a 相对 b 显著更好 / 无差异 / 更差"""
    a = np.asarray(a_errors, dtype=float)
    b = np.asarray(b_errors, dtype=float)
    if a.size != b.size or a.size < 5:
        raise StatsInputError(f"need equal trial counts >= 5, got {a.size} and {b.size}")

    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return Outcome.NO_DIFFERENCE

    n = a.size
    if variant == "rank-sum":
        has_ties = np.unique(pooled).size < pooled.size
        method = "exact" if n < 10 and not has_ties else "asymptotic"
        result = stats.mannwhitneyu(a, b, alternative="two-sided", use_continuity=True, method=method)
        p_value = result.pvalue
        u_statistic = result.statistic
    elif variant == "signed-rank":
        if np.all(a == b):
            return Outcome.NO_DIFFERENCE
        result = stats.wilcoxon(a, b, zero_method="wilcox", correction=True, alternative="two-sided")
        p_value = result.pvalue
        u_statistic = stats.mannwhitneyu(a, b, alternative="two-sided").statistic
    else:
        raise StatsInputError(f"unknown Wilcoxon variant '{variant}'")

    if not p_value < significance:
        return Outcome.NO_DIFFERENCE

    median_a, median_b = np.median(a), np.median(b)
    if median_a != median_b:
        return Outcome.BETTER if median_a < median_b else Outcome.WORSE
    # 中位数相同时由 U 统计量决定方向
    return Outcome.BETTER if u_statistic < n * n / 2.0 else Outcome.WORSE


def pairwise_wilcoxon(
    tables: Sequence[ResultTable],
    significance: float = 0.05,
    variant: str = "rank-sum",
) -> List[Dict[str, str]]:
    """所有算法两两比较，每个函数一行"""
    functions = _check_tables(tables)
    rows = []
    for i, first in enumerate(tables):
        for second in tables[i + 1:]:
            pair = f"{first.algorithm} vs {second.algorithm}"
            for function in functions:
                outcome = wilcoxon_classify(
                    first.errors[function], second.errors[function], significance, variant
                )
                rows.append({"algorithm_pair": pair, "function": function, "classification": outcome.value})
    return rows


def summarize_outcomes(rows: List[Dict[str, str]]) -> Dict[str, Dict[str, int]]:
    """按算法对统计 Better / NoDifference / Worse 的函数个数"""
    summary: Dict[str, Dict[str, int]] = {}
    for row in rows:
        counts = summary.setdefault(row["algorithm_pair"], {o.value: 0 for o in Outcome})
        counts[row["classification"]] += 1
    return summary
