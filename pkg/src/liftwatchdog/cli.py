"""Command-line interface: ``liftwatchdog {analyze,sanitize,sweep,oracle}``.

Exit codes: 0 success, 1 invalid input or options, 2 privacy constraint not
achievable (channel still written), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from .distribution import entropy_x, load
from .errors import InvalidDistribution, IoFailure, TooLarge, WatchdogError
from .experiment import PAPER_EPSILONS, SweepConfig, emit_csv, emit_json, run_sweep
from .lift import compute_lift_profile, risk_split
from .mechanism import (
    build_channel,
    complete_merging,
    dump_channel_json,
    merged_leakage,
    mutual_information,
    nmil,
    output_omegas,
    post_leakage,
)
from .partition import brute_force_optimal, greedy_refine

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(v) -> str:
    return f"{v:.12g}"


def _label(x: int) -> str:
    return f"x{x + 1}"


def _labels(members) -> str:
    return "{" + ", ".join(_label(x) for x in members) + "}"


def _epsilon(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError(f"epsilon must be >= 0 nats, got {text!r}")
    return value


def _epsilon_list(text: str) -> tuple[float, ...]:
    return tuple(_epsilon(part) for part in text.split(",") if part.strip())


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liftwatchdog", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="leakage table, risk split and complete-merging metrics")
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", required=True, type=_epsilon, help="privacy budget in nats")

    p = sub.add_parser("sanitize", help="build a sanitization channel and write it as JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", required=True, type=_epsilon, help="privacy budget in nats")
    p.add_argument("--method", choices=("greedy", "complete"), default="greedy")
    p.add_argument("--trace", action="store_true", help="include the greedy merge log")
    p.add_argument(
        "--strict-fixup-range",
        action="store_true",
        help="never offer the first block as a fix-up merge partner",
    )
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo comparison of greedy vs complete merging")
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--secrets", type=_positive_int, default=13)
    p.add_argument("--symbols", type=_positive_int, default=20)
    p.add_argument(
        "--epsilons",
        type=_epsilon_list,
        default=PAPER_EPSILONS,
        help="comma-separated, strictly increasing (default 0.25,...,2.5)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--json", dest="json_out", help="also write the JSON variant here")
    p.add_argument("--workers", type=int, default=None, help="overrides $LIFT_WATCHDOG_THREADS")

    p = sub.add_parser("oracle", help="greedy utility against the exhaustive optimum")
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", required=True, type=_epsilon, help="privacy budget in nats")
    return parser


def _metrics_lines(joint, part) -> list[str]:
    channel = build_channel(joint, part)
    h = entropy_x(joint)
    lines = [
        f"overall leakage max_y omega(y): {fmt(post_leakage(channel))}",
        f"merged leakage max over super-symbols: {fmt(merged_leakage(channel))}",
        f"I(X;Y): {fmt(mutual_information(joint, part))}",
        f"H(X): {fmt(h)}",
    ]
    lines.append(f"NMIL: {fmt(nmil(joint, part))}" if h > 0 else "NMIL: undefined (H(X) = 0)")
    return lines


def cmd_analyze(args) -> int:
    joint = load(args.input)
    profile = compute_lift_profile(joint)
    split = risk_split(profile, args.epsilon)
    print(f"|S|={joint.num_secrets} |X|={joint.num_symbols} epsilon={fmt(split.epsilon)}")
    print("symbol  p(x)  omega(x)  risk")
    for x in range(joint.num_symbols):
        risk = "high" if x in split.high_risk else "low"
        print(f"{_label(x)}  {fmt(joint.px[x])}  {fmt(profile.omega[x])}  {risk}")
    print(f"low-risk set: {_labels(split.low_risk)}")
    print(f"high-risk set: {_labels(split.high_risk) if split.high_risk else '(empty)'}")
    print("complete merging:")
    for line in _metrics_lines(joint, complete_merging(split)):
        print(f"  {line}")
    return EXIT_OK


def cmd_sanitize(args) -> int:
    joint = load(args.input)
    split = risk_split(compute_lift_profile(joint), args.epsilon)
    trace = None
    if args.method == "greedy":
        trace = greedy_refine(joint, split, strict_fixup_range=args.strict_fixup_range)
        part, feasible = trace.partition, trace.feasible
    else:
        part = complete_merging(split)
    channel = build_channel(joint, part)
    if trace is None:
        feasible = bool(all(output_omegas(channel)[channel.num_kept:] <= split.epsilon))
    h = entropy_x(joint)
    metrics = {
        "overall_leakage": _finite(post_leakage(channel)),
        "merged_leakage": _finite(merged_leakage(channel)),
        "mutual_information": mutual_information(joint, part),
        "entropy_x": h,
        "nmil": nmil(joint, part) if h > 0 else None,
        "feasible": feasible,
    }
    extra = {
        "epsilon": _finite(split.epsilon),
        "method": args.method,
        "blocks": [list(b) for b in part.blocks],
        "metrics": metrics,
        "joint": joint.to_dict(),
    }
    if args.trace and trace is not None:
        extra["trace"] = trace.to_dict()
    dump_channel_json(channel, args.out, extra)

    print(f"method: {args.method}  epsilon: {fmt(split.epsilon)}")
    print("blocks: " + (", ".join(_labels(b) for b in part.blocks) or "(none)"))
    for line in _metrics_lines(joint, part):
        print(line)
    print(f"feasible: {str(feasible).lower()}")
    if args.trace and trace is not None:
        for step in trace.merge_log:
            print(f"  {step.kind:<5} {_labels(step.members)} -> omega {fmt(step.omega)}")
    if not feasible:
        print(
            f"warning: leakage bound {fmt(split.epsilon)} is not achievable by merging "
            "high-risk symbols; channel written anyway",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


def _finite(v):
    return v if math.isfinite(v) else None


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        num_trials=args.trials,
        num_secrets=args.secrets,
        num_symbols=args.symbols,
        epsilons=args.epsilons,
        seed=args.seed,
    )
    result = run_sweep(cfg, workers=args.workers)
    emit_csv(result, args.out)
    if args.json_out:
        emit_json(result, args.json_out)
    print(f"{'epsilon':>8} {'method':>9} {'mean_nmil':>15} {'mean_hr_leak':>15} {'infeasible':>10}")
    for rec in result.per_epsilon:
        print(
            f"{fmt(rec.epsilon):>8} {rec.method:>9} {fmt(rec.mean_nmil):>15} "
            f"{fmt(rec.mean_hr_leakage):>15} {rec.infeasible_count:>10}"
        )
    return EXIT_OK


def cmd_oracle(args) -> int:
    joint = load(args.input)
    split = risk_split(compute_lift_profile(joint), args.epsilon)
    best = brute_force_optimal(joint, split)
    trace = greedy_refine(joint, split)
    greedy_util = mutual_information(joint, trace.partition)
    complete_util = mutual_information(joint, complete_merging(split))
    print(f"high-risk symbols: {len(split.high_risk)}")
    print(f"complete merging I(X;Y): {fmt(complete_util)}")
    print(f"greedy I(X;Y): {fmt(greedy_util)}  feasible: {str(trace.feasible).lower()}")
    print("greedy blocks: " + (", ".join(_labels(b) for b in trace.partition.blocks) or "(none)"))
    if not best.feasible:
        print("optimal: infeasible (no partition meets the leakage bound)")
        return EXIT_INFEASIBLE
    print(f"optimal I(X;Y): {fmt(best.utility)}")
    print("optimal blocks: " + (", ".join(_labels(b) for b in best.partition.blocks) or "(none)"))
    print(f"optimality gap: {fmt(best.utility - greedy_util)}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "sanitize": cmd_sanitize,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if any(a == "--log-base" or a.startswith("--log-base=") for a in argv):
        print("error: --log-base is not supported; epsilon is always in nats", file=sys.stderr)
        return EXIT_INVALID
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except TooLarge:
        print("error: high-risk set too large for oracle", file=sys.stderr)
        return EXIT_INVALID
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidDistribution, WatchdogError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
