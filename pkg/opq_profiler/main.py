"""
Command-line entry point

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 measurement-validity error.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import structlog
from pydantic import ValidationError

from opq_profiler import __version__
from opq_profiler.core.config import ToolkitDefaults, build_defaults, load_config_file
from opq_profiler.core.exceptions import DataValidationError, ProfilerException, UnclassifiedPoints
from opq_profiler.observability.logging import setup_logging
from opq_profiler.schemas.bench import BenchConfig
from opq_profiler.schemas.profile import ProfileDocument
from opq_profiler.schemas.simulation import SimulationFile
from opq_profiler.services import scaling_fit_service
from opq_profiler.services.bench.harness_service import BenchHarnessService
from opq_profiler.services.cost_derivation_service import CostDerivationService, ethernet_line_rate_pps
from opq_profiler.services.ingest_service import (
    format_measurements_csv,
    load_profile,
    parse_measurements_csv,
    save_plot_document,
    save_profile,
    split_series,
    write_measurements_csv,
)
from opq_profiler.services.opq_service import OpqService
from opq_profiler.services.report_service import ReportService
from opq_profiler.services.saturation_sim_service import SaturationSimService
from opq_profiler.shared.constants.enums import OperatorId, Provenance
from opq_profiler.shared.utils.validators import validate_user_operator
from opq_profiler.utils.file_utils import atomic_write_text

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

DEFAULT_BENCH_OPERATORS = [op.value for op in OperatorId if op is not OperatorId.BASELINE]


class UsageErrorParser(argparse.ArgumentParser):
    """用法错误统一以退出码 1 结束"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list '{text}'") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def _line_rate(text: str) -> Optional[str]:
    if text in ("100gbe", "none"):
        return text
    try:
        if float(text) > 0:
            return text
    except ValueError:
        pass
    raise argparse.ArgumentTypeError("expected a positive pps value, '100gbe' or 'none'")


def _operators(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _global_flags(argument_default: Optional[str] = None) -> argparse.ArgumentParser:
    """全局参数，可写在子命令之前或之后"""
    common = argparse.ArgumentParser(add_help=False, argument_default=argument_default)
    common.add_argument("--cpu-hz", type=float, help="CPU frequency in Hz (F_cpu)")
    common.add_argument("--threshold", type=float, help="fixed OPQ base-cost threshold (cycles)")
    common.add_argument("--line-rate-pps", type=_line_rate, help="line-rate cap: pps, '100gbe' or 'none'")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--sizes", type=_sizes, help="packet sizes, e.g. 64,128,256")
    common.add_argument("--out", type=Path, help="output file (directory for bench/reference)")
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("-q", "--quiet", action="store_true")
    common.add_argument("--log-json", action="store_true", help="JSON log lines on stderr")
    common.add_argument("--no-color", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    # 子命令上的同名参数不设默认值，避免覆盖写在子命令之前的取值
    common = _global_flags(argparse.SUPPRESS)
    parser = UsageErrorParser(
        prog="opq", description="Operator cost profiling and OPQ classification", parents=[_global_flags()]
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageErrorParser)

    sub.add_parser("calibrate", parents=[common], help="print the CPU frequency used for derivations")

    bench = sub.add_parser("bench", parents=[common], help="run the in-process micro-benchmark")
    bench.add_argument("--operators", type=_operators, default=DEFAULT_BENCH_OPERATORS)
    bench.add_argument("--repetitions", type=int)
    bench.add_argument("--duration", type=float, help="measure window in seconds")
    bench.add_argument("--warmup", type=float, help="warm-up window in seconds")
    bench.add_argument("--platform", help="platform name recorded in the output")
    bench.add_argument(
        "--strict", action="store_true", help="fail when an operator still derives a negative cost after retry"
    )

    sub.add_parser("simulate", parents=[common], help="simulate baseline/SUT measurements")

    derive = sub.add_parser("derive", parents=[common], help="derive operator costs from a measurements CSV")
    derive.add_argument("--input", type=Path, required=True)
    derive.add_argument("--strict", action="store_true", help="fail on line-rate-bound sizes")

    fit = sub.add_parser("fit", parents=[common], help="fit power-law curves to derived samples")
    fit.add_argument("--input", type=Path, required=True)

    classify = sub.add_parser("classify", parents=[common], help="assign OPQ quadrants")
    classify.add_argument("--input", type=Path, required=True)

    shift = sub.add_parser("shift", parents=[common], help="quadrant shift between two profiles")
    shift.add_argument("--from", dest="from_path", type=Path, required=True)
    shift.add_argument("--to", dest="to_path", type=Path, required=True)
    shift.add_argument("--plot-out", type=Path, help="write OPQ plot document here")

    report = sub.add_parser("report", parents=[common], help="text table of one or more profiles")
    report.add_argument("--input", type=Path, nargs="+", required=True)

    reference = sub.add_parser("reference", parents=[common], help="bundled Arm/x86 reference dataset")
    reference.add_argument("--threshold-arm", type=float)
    reference.add_argument("--threshold-x86", type=float)
    reference.add_argument("--plot", action="store_true", help="print the OPQ plot document instead of the table")
    reference.add_argument(
        "--measurements", action="store_true", help="print the generated baseline/SUT measurements CSV"
    )
    return parser


class CommandContext:
    """一次命令调用的配置与服务"""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        file_config = load_config_file(args.config)
        self.file_config = file_config
        self.config: ToolkitDefaults = build_defaults(file_config.get("defaults"))
        self.derivation = CostDerivationService(self.config)
        self.opq = OpqService()
        self.report = ReportService(self.config)

    @property
    def sizes(self) -> List[int]:
        return self.args.sizes or list(self.config.PACKET_SIZES)

    @property
    def seed(self) -> int:
        return self.args.seed if self.args.seed is not None else self.config.SEED

    def line_rate_fn(self, default: Optional[str]) -> Optional[Callable[[int], float]]:
        choice = self.args.line_rate_pps or default
        if choice is None or choice == "none":
            return None
        if choice == "100gbe":
            link, overhead = self.config.LINK_SPEED_BPS, self.config.FRAME_OVERHEAD_BYTES
            return lambda size: ethernet_line_rate_pps(size, link, overhead)
        cap = float(choice)
        return lambda size: cap

    def require_cpu_hz(self) -> float:
        if self.args.cpu_hz is None:
            raise DataValidationError("--cpu-hz is required for this command", code="MISSING_CPU_HZ")
        return self.args.cpu_hz

    def emit(self, text: str, default_name: Optional[str] = None) -> None:
        """写 --out 文件，否则输出到 stdout"""
        out = self.args.out
        if out is None:
            sys.stdout.write(text)
            return
        if out.is_dir() and default_name:
            out = out / default_name
        atomic_write_text(out, text)
        logger.info("output_written", path=str(out))


def cmd_calibrate(ctx: CommandContext) -> int:
    harness = BenchHarnessService(ctx.config)
    cpu_hz = harness.calibrate_cpu_hz(BenchConfig(cpu_hz_override=ctx.args.cpu_hz))
    sys.stdout.write(f"{cpu_hz:.6g}\n")
    return EXIT_OK


def cmd_bench(ctx: CommandContext) -> int:
    args = ctx.args
    for op in args.operators:
        validate_user_operator(op)
    bench = BenchConfig(
        packet_sizes=ctx.sizes,
        warmup_duration=args.warmup if args.warmup is not None else ctx.config.WARMUP_DURATION,
        measure_duration=args.duration if args.duration is not None else ctx.config.MEASURE_DURATION,
        repetitions=args.repetitions if args.repetitions is not None else ctx.config.REPETITIONS,
        cpu_hz_override=args.cpu_hz,
        pool_size=ctx.config.POOL_SIZE,
        seed=ctx.seed,
    )
    harness = BenchHarnessService(ctx.config)
    document, measurements = harness.bench_to_profile(
        bench, args.operators, platform=args.platform, threshold=args.threshold, strict=args.strict
    )
    out_dir = args.out or Path("bench-out")
    write_measurements_csv(measurements, out_dir / "measurements.csv")
    save_profile(document, out_dir / "profile.json")
    sys.stdout.write(ctx.report.emit_table_report([document]))
    return EXIT_OK


def cmd_simulate(ctx: CommandContext) -> int:
    args = ctx.args
    section = dict(ctx.file_config.get("simulate", {}))
    overrides = {
        "cpu_hz": args.cpu_hz,
        "seed": args.seed,
        "sizes": args.sizes,
    }
    section.update({k: v for k, v in overrides.items() if v is not None})
    if args.line_rate_pps is not None:
        section["line_rate"] = None if args.line_rate_pps == "none" else (
            args.line_rate_pps if args.line_rate_pps == "100gbe" else float(args.line_rate_pps)
        )
    sim_file = SimulationFile(**section)
    validate_user_operator(sim_file.operator)

    simulator = SaturationSimService(ctx.config)
    sim = simulator.config_from_file(sim_file, ctx.config)
    baseline, sut = simulator.run_protocol(
        sim, sim_file.op_cost, sim_file.sizes, sim_file.runs, operator=sim_file.operator, platform=sim_file.platform
    )
    ctx.emit(format_measurements_csv(baseline + sut), "measurements.csv")
    return EXIT_OK


def cmd_derive(ctx: CommandContext) -> int:
    args = ctx.args
    cpu_hz = ctx.require_cpu_hz()
    records = parse_measurements_csv(args.input)
    series = split_series(records)
    if len(series) != 1:
        raise DataValidationError(
            "derive expects measurements from exactly one platform",
            code="MIXED_SERIES",
            details={"platforms": sorted(series)},
        )
    platform, (baseline, suts) = next(iter(series.items()))
    line_rate_fn = ctx.line_rate_fn(default="100gbe")

    samples, warnings = [], []
    for operator, sut in suts.items():
        result = ctx.derivation.derive_sweep(
            cpu_hz, baseline, sut, line_rate_fn=line_rate_fn,
            margin=ctx.config.LINE_RATE_MARGIN, strict=args.strict,
        )
        for warning in result.warnings:
            logger.warning("validity_warning", **warning.model_dump(mode="json"))
        samples.extend(result.samples)
        warnings.extend(result.warnings)

    document = ProfileDocument(
        schema_version=ctx.config.SCHEMA_VERSION,
        platform={"name": platform, "cpu_hz": cpu_hz},
        samples=samples,
        provenance=Provenance.INGESTED,
        warnings=warnings,
        metadata={"source": str(args.input)},
    )
    ctx.emit(document.model_dump_json(indent=2) + "\n", "profile.json")
    return EXIT_OK


def cmd_fit(ctx: CommandContext) -> int:
    document = load_profile(ctx.args.input)
    if not document.samples:
        raise DataValidationError(
            "profile has no derived samples to fit", code="NO_SAMPLES", details={"path": str(ctx.args.input)}
        )
    by_operator: Dict[str, list] = {}
    for sample in document.samples:
        by_operator.setdefault(sample.operator, []).append(sample)
    curves = [scaling_fit_service.fit_power_law(samples) for samples in by_operator.values()]
    fitted = ProfileDocument.model_validate({**document.model_dump(), "curves": curves, "opq_points": []})
    ctx.emit(fitted.model_dump_json(indent=2) + "\n", "profile.json")
    return EXIT_OK


def cmd_classify(ctx: CommandContext) -> int:
    document = load_profile(ctx.args.input)
    points = ctx.opq.classify_profile(
        document.curves, document.platform.name, threshold=ctx.args.threshold, samples=document.samples
    )
    classified = ProfileDocument.model_validate({**document.model_dump(), "opq_points": points})
    ctx.emit(classified.model_dump_json(indent=2) + "\n", "profile.json")
    return EXIT_OK


def cmd_shift(ctx: CommandContext) -> int:
    args = ctx.args
    source, target = load_profile(args.from_path), load_profile(args.to_path)
    for profile in (source, target):
        if not profile.opq_points:
            raise UnclassifiedPoints(profile.platform.name)
    result = ctx.opq.compute_shift(source.opq_points, target.opq_points)
    strategies = {p.operator: ctx.opq.strategy_for(p) for p in target.opq_points}
    normalized = ctx.opq.compare_platforms(
        source.opq_points, source.platform.cpu_hz, target.opq_points, target.platform.cpu_hz
    )
    payload = {
        "records": [
            {**r.model_dump(mode="json"), "shifted": r.shifted, "to_strategy": strategies[r.operator]}
            for r in result.records
        ],
        "skipped": result.skipped,
        "normalized_ns": normalized,
    }
    ctx.emit(json.dumps(payload, indent=2) + "\n", "shift.json")
    if args.plot_out is not None:
        save_plot_document(ctx.report.emit_opq_plot_data(source, target), args.plot_out)
    return EXIT_OK


def cmd_report(ctx: CommandContext) -> int:
    profiles = [load_profile(path) for path in ctx.args.input]
    ctx.emit(ctx.report.emit_table_report(profiles), "report.txt")
    return EXIT_OK


def cmd_reference(ctx: CommandContext) -> int:
    args = ctx.args
    thresholds = {}
    for platform in ("arm", "x86"):
        value = getattr(args, f"threshold_{platform}")
        if value is None:
            value = args.threshold
        if value is not None:
            thresholds[platform] = value
    profiles = ctx.report.load_reference_profiles(thresholds)
    plot = ctx.report.emit_opq_plot_data(profiles["arm"], profiles["x86"])

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        for name, profile in profiles.items():
            save_profile(profile, args.out / f"{name}.profile.json")
        save_plot_document(plot, args.out / "opq_plot.json")
        write_measurements_csv(ctx.report.reference_measurements(), args.out / "reference_measurements.csv")
        atomic_write_text(args.out / "report.txt", ctx.report.emit_table_report(list(profiles.values())))
        logger.info("reference_written", path=str(args.out))
    elif args.measurements:
        sys.stdout.write(format_measurements_csv(ctx.report.reference_measurements()))
    elif args.plot:
        sys.stdout.write(plot.model_dump_json(indent=2) + "\n")
    else:
        sys.stdout.write(ctx.report.emit_table_report(list(profiles.values())))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[CommandContext], int]] = {
    "calibrate": cmd_calibrate,
    "bench": cmd_bench,
    "simulate": cmd_simulate,
    "derive": cmd_derive,
    "fit": cmd_fit,
    "classify": cmd_classify,
    "shift": cmd_shift,
    "report": cmd_report,
    "reference": cmd_reference,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else "INFO"
    setup_logging(level=level, json_output=args.log_json, colors=not args.no_color)

    try:
        ctx = CommandContext(args)
        return COMMANDS[args.command](ctx)
    except ProfilerException as e:
        logger.error("command_failed", command=args.command, code=e.code, message=e.message, details=e.details)
        return e.exit_code
    except ValidationError as e:
        logger.error("command_failed", command=args.command, code="VALIDATION_ERROR", message=str(e))
        return EXIT_DATA
    except (OSError, json.JSONDecodeError) as e:
        logger.error("command_failed", command=args.command, code="IO_ERROR", message=str(e))
        return EXIT_DATA


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
