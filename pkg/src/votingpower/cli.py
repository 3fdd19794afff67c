"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 capacity error, 3 I/O error,
4 no tuple satisfies the efficiency floor.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import data_io
from .enumeration import default_workers
from .fairness import assess, sz_quota
from .game import (
    MAX_EXACT_MEMBERS,
    CapacityError,
    ConfigurationError,
    Council,
    VotingPowerError,
    VotingRule,
    format_quota,
    make_jc_rule,
    make_lisbon_rule,
    make_nice_rule,
    parse_quota,
)
from .power import compute_power
from .sweep import (
    NoFeasibleTupleError,
    SweepGrid,
    SweepRow,
    fraction_range,
    optimize_error,
    optimize_with_efficiency_floor,
    run_sweep,
)

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_IO, EXIT_INFEASIBLE = range(5)

DEFAULTS = {
    "nice": {"count": "14", "weights": "190:275", "pop": "0.51:0.85:0.01"},
    "lisbon": {"count": "14:18", "weights": None, "pop": "0.51:0.85:0.001"},
    "jc": {"count": None, "weights": None, "pop": "0.51:0.85:0.001"},
}


def permille_text(sigma2: Fraction) -> str:
    """Error rate in per mille: four decimals, more if needed to show a significant digit."""
    x = sigma2 * 1000
    if x == 0:
        return "0"
    places = max(4, -(Decimal(x.numerator) / Decimal(x.denominator)).adjusted())
    return data_io.fixed(x, places)


def tuple_text(quota) -> str:
    parts = [str(v) if isinstance(v, int) else format_quota(v) for v in quota if v is not None]
    return "(" + ",".join(parts) + ")"


def row_summary(row: SweepRow) -> str:
    return (
        f"{tuple_text(row.quota)}: sigma2={permille_text(row.error_rate)}‰ "
        f"eff={row.efficiency_percent:.2f}% max_dev={row.max_deviation_percent:.2f}% ({row.max_deviation_member})"
    )


def parse_int_range(text: str) -> tuple[int, ...]:
    parts = text.split(":")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigurationError(f"bad integer range {text!r}; expected lo[:hi[:step]]") from None
    if len(values) == 1:
        return (values[0],)
    if len(values) > 3:
        raise ConfigurationError(f"bad integer range {text!r}")
    lo, hi = values[0], values[1]
    step = values[2] if len(values) == 3 else 1
    if step <= 0 or hi < lo:
        raise ConfigurationError(f"empty or invalid integer range {text!r}")
    return tuple(range(lo, hi + 1, step))


def parse_fraction_range(text: str) -> tuple[Fraction, ...]:
    parts = text.split(":")
    if len(parts) == 1:
        return (parse_quota(parts[0]),)
    if len(parts) != 3:
        raise ConfigurationError(f"bad quota range {text!r}; expected lo:hi:step or a single value")
    return fraction_range(*parts)


# -- argument parsing ---------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", default="eu27-2008", help="builtin dataset name or CSV path (default: eu27-2008)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $VOTINGPOWER_WORKERS or CPU count)")
    p.add_argument("--output", default="results", help="output directory (default: ./results)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rule", choices=("nice", "lisbon", "jc"), required=True)
    p.add_argument("--count", help="member-count quotas, lo[:hi[:step]]")
    p.add_argument("--weights", help="negotiated-weight quotas (nice only), lo[:hi[:step]]")
    p.add_argument("--pop", help="population quotas as fractions, lo:hi:step or a single value")
    p.add_argument("--mode", choices=("shared", "per-tuple"), default="shared")
    p.add_argument("--quiet", action="store_true", help="suppress progress on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="votingpower", description="Banzhaf power, efficiency and quota sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="power, fairness and efficiency of one rule")
    _common(a)
    a.add_argument("--rule", choices=("nice", "lisbon", "jc"), help="rule family")
    a.add_argument("--rule-file", help="JSON rule definition instead of --rule")
    a.add_argument("--quota-weight", type=int, help="nice: negotiated-weight threshold (default 255)")
    a.add_argument("--quota-count", type=int, help="member-count threshold (nice 14, lisbon 15)")
    a.add_argument("--quota-pop", help="population quota as a fraction (nice 0.62, lisbon 0.65, jc 0.615)")
    a.add_argument("--quota", dest="quota_pop_alias", help="alias of --quota-pop")
    a.add_argument("--count-majority", action="store_true", help="jc: also require a simple majority of members")
    a.add_argument("--blocking-clause", action="store_true", help="lisbon: a blocking minority needs four members")
    a.add_argument("--backend", choices=("auto", "enum", "dp", "mc"), default="auto")
    a.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples")
    a.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")

    s = sub.add_parser("sweep", help="evaluate a quota grid and report the least-error tuple")
    _common(s)
    _sweep_flags(s)

    o = sub.add_parser("optimize", help="least-error tuple subject to an efficiency floor")
    _common(o)
    _sweep_flags(o)
    o.add_argument("--min-efficiency", required=True, help="efficiency floor as a fraction, e.g. 0.1039")

    z = sub.add_parser("sz-quota", help="closed-form approximate optimal quota for square-root weights")
    z.add_argument("--data", default="eu27-2008")
    return parser


def _analysis_rule(args, council: Council) -> VotingRule:
    if args.rule_file:
        if args.rule:
            raise ConfigurationError("use either --rule or --rule-file, not both")
        try:
            return VotingRule.from_dict(json.loads(Path(args.rule_file).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{args.rule_file}: invalid JSON ({exc})") from None
    if not args.rule:
        raise ConfigurationError("one of --rule or --rule-file is required")
    pop_text = args.quota_pop or args.quota_pop_alias
    if args.quota_pop and args.quota_pop_alias and args.quota_pop != args.quota_pop_alias:
        raise ConfigurationError("--quota and --quota-pop disagree")
    if args.rule == "nice":
        if args.count_majority or args.blocking_clause:
            raise ConfigurationError("--count-majority and --blocking-clause do not apply to the nice rule")
        return make_nice_rule(
            council,
            255 if args.quota_weight is None else args.quota_weight,
            14 if args.quota_count is None else args.quota_count,
            parse_quota(pop_text or "0.62"),
        )
    if args.quota_weight is not None:
        raise ConfigurationError(f"--quota-weight does not apply to the {args.rule} rule")
    if args.rule == "lisbon":
        if args.count_majority:
            raise ConfigurationError("--count-majority applies to the jc rule only")
        return make_lisbon_rule(
            council, 15 if args.quota_count is None else args.quota_count, parse_quota(pop_text or "0.65"), args.blocking_clause
        )
    if args.blocking_clause or args.quota_count is not None:
        raise ConfigurationError("use --count-majority for the jc rule; --quota-count/--blocking-clause do not apply")
    return make_jc_rule(council, parse_quota(pop_text or "0.615"), args.count_majority)


def _grid(args) -> SweepGrid:
    defaults = DEFAULTS[args.rule]
    count = args.count if args.count is not None else defaults["count"]
    weights = args.weights if args.weights is not None else defaults["weights"]
    if args.rule != "nice" and args.weights is not None:
        raise ConfigurationError("--weights applies to the nice rule only")
    return SweepGrid(
        args.rule,
        parse_int_range(count) if count else (),
        parse_int_range(weights) if weights else None,
        parse_fraction_range(args.pop or defaults["pop"]),
    )


class _Progress:
    def __init__(self, label: str, enabled: bool):
        self.label, self.enabled = label, enabled
        self.last = time.monotonic()

    def __call__(self, done: int, total: int) -> None:
        now = time.monotonic()
        if self.enabled and (now - self.last >= 1.0 or done == total):
            print(f"{self.label}: {done}/{total} ({100 * done / total:.0f}%)", file=sys.stderr, flush=True)
            self.last = now


def _cmd_analyze(args) -> int:
    council = data_io.load_dataset(args.data)
    rule = _analysis_rule(args, council)
    if args.samples < 1:
        raise ConfigurationError("--samples must be >= 1")
    if args.backend in ("enum", "dp") and council.n > MAX_EXACT_MEMBERS:
        raise CapacityError(f"exact backends support at most {MAX_EXACT_MEMBERS} members; use --backend mc")
    report = compute_power(council, rule, args.backend, samples=args.samples, seed=args.seed, workers=args.workers)
    assessment = assess(report)
    data_io.export_analysis(report, args.format, args.output)
    label = rule.label or "rule"
    print(
        f"{label}: sigma2={permille_text(assessment.error_rate_sigma2)}‰ eff={float(report.efficiency) * 100:.2f}% "
        f"max_dev={assessment.max_deviation_percent:.2f}% ({assessment.max_deviation_member}) backend={report.backend.value}"
    )
    return EXIT_OK


def _sweep(args):
    grid = _grid(args)
    council = data_io.load_dataset(args.data)
    if council.n > MAX_EXACT_MEMBERS:
        raise CapacityError(f"sweeps enumerate exactly and support at most {MAX_EXACT_MEMBERS} members")
    progress = _Progress(f"sweep {args.rule}", not args.quiet)
    mode = "per_tuple" if args.mode == "per-tuple" else "shared"
    result = run_sweep(council, grid, mode=mode, workers=args.workers or default_workers(), progress=progress)
    data_io.export_sweep(result, args.output, stem=f"sweep_{args.rule}")
    if args.format == "json":
        data_io.export_report(result, "json", Path(args.output) / f"sweep_{args.rule}.json")
    return result


def _cmd_sweep(args) -> int:
    result = _sweep(args)
    print(f"argmin {row_summary(optimize_error(result))}")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    floor = parse_quota(args.min_efficiency)
    if not 0 <= floor <= 1:
        raise ConfigurationError("--min-efficiency must be a fraction in [0, 1]")
    result = _sweep(args)
    row = optimize_with_efficiency_floor(result, floor)
    print(f"optimum {row_summary(row)}")
    return EXIT_OK


def _cmd_sz(args) -> int:
    q = sz_quota(data_io.load_dataset(args.data))
    print(f"q0={q:.4f} ({q * 100:.2f}%)")
    return EXIT_OK


COMMANDS = {"analyze": _cmd_analyze, "sweep": _cmd_sweep, "optimize": _cmd_optimize, "sz-quota": _cmd_sz}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NoFeasibleTupleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except data_io.ReportIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigurationError, VotingPowerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
