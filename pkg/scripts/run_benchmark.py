#!/usr/bin/env python3
"""收敛研究批量脚本: 五个测试函数, 30 维, 每个函数 300,000 次评估"""
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from sno.commands.run import ExperimentSpec, cmd_run
from sno.commands.summarize import cmd_summarize
from sno.core.config import settings
from sno.main import setup_logging

PROBLEMS = ["ackley", "bent_cigar", "griewank", "rastrigin", "rosenbrock"]
DIMENSION = 30


def main():
    print("=== SNO 收敛研究 ===")
    setup_logging()

    out_dir = os.path.join(settings.OUTPUT_DIR, "convergence_study")
    spec = ExperimentSpec(
        problems=PROBLEMS,
        dimensions=[DIMENSION],
        trials=settings.DEFAULT_TRIALS,
        seed_base=settings.DEFAULT_SEED,
        out_dir=out_dir,
        workers=settings.MAX_WORKERS,
    )
    print(f"输出目录: {out_dir}")
    print(f"函数: {', '.join(PROBLEMS)}  维度: {DIMENSION}  MaxFES: {spec.budget_for(DIMENSION)}")

    # 1. 运行所有试验
    result = cmd_run(spec)
    for row in result["results"]:
        print(f"{row['problem']:>12s} d={row['dimension']}: 中位误差 {row['median_error']:.6e}")

    # 2. 按收敛进度汇总
    summary = cmd_summarize(out_dir)
    print(f"\n=== 完成 ===")
    print(f"收敛曲线: {result['files']['convergence']} 个")
    print(f"汇总文件: {len(summary['files'])} 个")


if __name__ == "__main__":
    main()
