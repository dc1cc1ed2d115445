"""
SNO benchmark harness - command line entry point
Runs Space Net Optimization experiments, compares result sets and exports plot data
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError

from sno.commands import UsageError
from sno.commands.compare import cmd_compare, RANK_MODES
from sno.commands.plotdata import cmd_snapshot_plotdata, cmd_landscape_plotdata
from sno.commands.run import ExperimentSpec, cmd_run
from sno.commands.summarize import cmd_summarize
from sno.core.config import settings, ConfigFileError, load_config_file
from sno.core.sno import SnoConfigError
from sno.ingestion.results_parser import ResultsFormatError
from sno.services.objective import ProblemNotFoundError
from sno.services.stats import StatsInputError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

USAGE_ERRORS = (UsageError, SnoConfigError, ConfigFileError, ProblemNotFoundError, ValidationError, FileNotFoundError)
DATA_ERRORS = (ResultsFormatError, StatsInputError)


class HarnessArgumentParser(argparse.ArgumentParser):
    """参数错误时输出 JSON 并以退出码 1 结束"""

    def error(self, message: str):
        _print_json(_error_response(f"{self.prog}: {message}"))
        self.exit(EXIT_USAGE)


def _error_response(message: str) -> Dict[str, Any]:
    return {"status": "error", "message": message}


def _error_message(error: Exception) -> str:
    """KeyError 的 str() 会带引号，直接取原始消息"""
    if isinstance(error, KeyError) and error.args:
        return str(error.args[0])
    return str(error)


def _print_json(result: Dict[str, Any]) -> None:
    print(json.dumps(result, ensure_ascii=False, indent=2))


def _csv_list(item_type: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    """逗号分隔的列表参数"""
    def parse(value: str) -> List[Any]:
        try:
            return [item_type(item.strip()) for item in value.split(",") if item.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"invalid list '{value}': {e}")
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = HarnessArgumentParser(
        prog="sno",
        description="SNO - Space Net Optimization benchmark harness",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s run --problem ackley --dim 2 --trials 3 --fes-max 4000 --snapshots 400,800,4000
  %(prog)s compare results/sno results/de --mode avg --alpha 0.05
  %(prog)s snapshot-plotdata results/net_ackley_2_0_400.csv
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # run
    run_parser = subparsers.add_parser("run", help="Run SNO trials and write convergence / snapshot / results files")
    run_parser.add_argument("--problem", type=_csv_list(str), required=True,
                            help="Comma-separated test functions, e.g. ackley,rastrigin")
    run_parser.add_argument("--dim", type=_csv_list(int), required=True,
                            help="Comma-separated dimensions, e.g. 10,20")
    run_parser.add_argument("--trials", type=int, default=None,
                            help=f"Trials per (function, dimension) (default: {settings.DEFAULT_TRIALS})")
    run_parser.add_argument("--seed", type=int, default=None,
                            help=f"Seed base; trial i uses seed + i (default: {settings.DEFAULT_SEED})")
    run_parser.add_argument("--fes-max", type=int, default=None,
                            help="Evaluation budget (default: preset per dimension)")
    run_parser.add_argument("--bound", type=float, default=None,
                            help="Half-width of the search box (default: preset per function)")
    run_parser.add_argument("--out", default=None, help=f"Output directory (default: {settings.OUTPUT_DIR})")
    run_parser.add_argument("--snapshots", type=_csv_list(int), default=None,
                            help="Comma-separated fes checkpoints for net snapshots")
    run_parser.add_argument("--config", default=None,
                            help="SnoConfig overrides: key = value lines or a YAML mapping")
    run_parser.add_argument("--workers", type=int, default=None,
                            help=f"Worker processes (default: {settings.MAX_WORKERS})")

    # compare
    compare_parser = subparsers.add_parser("compare", help="Average ranks and pairwise Wilcoxon tests")
    compare_parser.add_argument("results_dirs", nargs="+", help="One results directory per algorithm")
    compare_parser.add_argument("--mode", choices=RANK_MODES, default="avg", help="Rank mode (default: avg)")
    compare_parser.add_argument("--alpha", type=float, default=0.05, help="Significance level (default: 0.05)")
    compare_parser.add_argument("--wilcoxon", choices=("rank-sum", "signed-rank"), default="rank-sum",
                                help="Wilcoxon variant (default: rank-sum)")
    compare_parser.add_argument("--out", default=None, help="Where ranks.csv and wilcoxon.csv are written")

    # snapshot-plotdata
    snapshot_parser = subparsers.add_parser("snapshot-plotdata", help="Net snapshot as whitespace-separated columns")
    snapshot_parser.add_argument("net_csv", nargs="?", default=None, help="Net snapshot CSV")
    snapshot_parser.add_argument("--include-populations", action="store_true",
                                 help="Also emit explorers and miners, with a kind column")
    snapshot_parser.add_argument("--output", default=None, help="Write to a file instead of stdout")

    # landscape-plotdata
    landscape_parser = subparsers.add_parser("landscape-plotdata", help="2-D objective landscape grid")
    landscape_parser.add_argument("--problem", required=True, help="Test function")
    landscape_parser.add_argument("--resolution", type=int, default=101, help="Grid points per axis")
    landscape_parser.add_argument("--bound", type=float, default=None, help="Half-width of the plotted box")
    landscape_parser.add_argument("--output", default=None, help="Write to a file instead of stdout")

    # summarize
    summarize_parser = subparsers.add_parser("summarize", help="Convergence summary aligned on progress")
    summarize_parser.add_argument("--out", default=None, help=f"Results directory (default: {settings.OUTPUT_DIR})")
    summarize_parser.add_argument("--problem", default=None, help="Only this function")
    summarize_parser.add_argument("--dim", type=int, default=None, help="Only this dimension")

    return parser


def _run(args: argparse.Namespace) -> Dict[str, Any]:
    values: Dict[str, Any] = {
        "problems": args.problem,
        "dimensions": args.dim,
        "trials": args.trials,
        "seed_base": args.seed,
        "fes_max": args.fes_max,
        "bound": args.bound,
        "out_dir": args.out,
        "snapshots": args.snapshots,
        "workers": args.workers,
    }
    if args.config:
        values["overrides"] = load_config_file(args.config)
    spec = ExperimentSpec(**{k: v for k, v in values.items() if v is not None})
    return cmd_run(spec)


def _emit_text(text: str, output: Optional[str], command: str) -> Optional[Dict[str, Any]]:
    """绘图数据直接写 stdout; 指定 --output 时写文件并返回 JSON 结果"""
    if output is None:
        sys.stdout.write(text)
        return None
    with open(output, "w", encoding="utf-8") as f:
        f.write(text)
    return {"status": "success", "command": command, "output": output}


def dispatch(args: argparse.Namespace) -> Optional[Dict[str, Any]]:
    if args.command == "run":
        return _run(args)
    if args.command == "compare":
        return cmd_compare(args.results_dirs, mode=args.mode, significance=args.alpha,
                           variant=args.wilcoxon, out_dir=args.out)
    if args.command == "snapshot-plotdata":
        text = cmd_snapshot_plotdata(args.net_csv, include_populations=args.include_populations)
        return _emit_text(text, args.output, args.command)
    if args.command == "landscape-plotdata":
        text = cmd_landscape_plotdata(args.problem, resolution=args.resolution, bound=args.bound)
        return _emit_text(text, args.output, args.command)
    if args.command == "summarize":
        return cmd_summarize(args.out or settings.OUTPUT_DIR, problem=args.problem, dimension=args.dim)
    raise UsageError(f"Unknown command '{args.command}'")


def setup_logging() -> None:
    """日志输出到 stderr，stdout 只保留 JSON 或绘图数据"""
    logging.basicConfig(
        level=settings.LOG_LEVEL.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    setup_logging()
    try:
        result = dispatch(args)
    except USAGE_ERRORS as e:
        result, code = _error_response(_error_message(e)), EXIT_USAGE
    except DATA_ERRORS as e:
        result, code = _error_response(_error_message(e)), EXIT_DATA
    else:
        code = EXIT_OK

    if result is not None:
        _print_json(result)
    return code


if __name__ == "__main__":
    sys.exit(main())
