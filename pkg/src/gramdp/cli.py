"""``gramdp`` command line.

    gramdp run    --data F --column C --query {count,sum,mean,var} (--epsilon E | --level L)
                  [--lower M --upper M] [--seed S] [--budget-file P] [--no-clamp]
    gramdp sweep  --data F --column C --query Q --out P [--format csv|json]
                  [--eps-start 0.01 --eps-stop 0.49 --eps-step 0.02] [--iterations 100] [--seed S]
    gramdp levels
    gramdp budget init --total E --file P
    gramdp budget status --file P

``run`` prints exactly one JSON object on stdout. Diagnostics, warnings
and errors go to stderr; errors are JSON objects there too. Exit codes:
0 success, 1 data/runtime/budget error, 2 usage error. When ``--seed`` is
absent the ``GRAMDP_SEED`` environment variable is used, then fresh
entropy.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from datetime import datetime, timezone

from . import accountant, bench, ingest
from .errors import GramDPError
from .mechanisms import PrivacyParams, RngStream
from .queries import LEVEL_EPSILONS, PrivacyLevel, QuerySpec, run_query
from .sensitivity import BoundedDomain, QueryKind

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2
QUERY_CHOICES = ("count", "sum", "mean", "var")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gramdp", description="Differentially private statistics over CSV columns.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_flags(sp):
        sp.add_argument("--data", required=True, help="CSV file with a header row")
        sp.add_argument("--column", required=True)
        sp.add_argument("--query", required=True, choices=QUERY_CHOICES)
        sp.add_argument("--lower", type=float, help="lower bound (omit both bounds to infer)")
        sp.add_argument("--upper", type=float, help="upper bound (omit both bounds to infer)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--no-clamp", action="store_true",
                        help="do not clamp inputs into the bounds (data certified in range)")

    run = sub.add_parser("run", help="answer one DP query")
    data_flags(run)
    priv = run.add_mutually_exclusive_group(required=True)
    priv.add_argument("--epsilon", type=float)
    priv.add_argument("--level", choices=[lv.value for lv in PrivacyLevel])
    run.add_argument("--budget-file", help="ledger to charge; the run fails if it cannot pay")

    sweep = sub.add_parser("sweep", help="benchmark a query across an epsilon grid")
    data_flags(sweep)
    sweep.add_argument("--eps-start", type=float, default=0.01)
    sweep.add_argument("--eps-stop", type=float, default=0.49)
    sweep.add_argument("--eps-step", type=float, default=0.02)
    sweep.add_argument("--iterations", type=int, default=100)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("levels", help="print the privacy level presets")

    budget = sub.add_parser("budget", help="manage a privacy budget ledger")
    bsub = budget.add_subparsers(dest="action", required=True, parser_class=_Parser)
    init = bsub.add_parser("init")
    init.add_argument("--total", type=float, required=True)
    init.add_argument("--file", required=True)
    status = bsub.add_parser("status")
    status.add_argument("--file", required=True)
    return p


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("GRAMDP_SEED")
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"GRAMDP_SEED must be an integer, got {env!r}") from None


def _load_column(args):
    if (args.lower is None) != (args.upper is None):
        raise UsageError("give both --lower and --upper, or neither to infer bounds")
    column = ingest.select_numeric_column(ingest.load_csv(args.data), args.column)
    if args.lower is None:
        domain, inferred = ingest.infer_bounds(column, warn=False)
        _warn(f"bounds [{domain.lower:g}, {domain.upper:g}] inferred from the data; "
              "data-derived bounds leak the column's extremes")
    else:
        try:
            domain = BoundedDomain(args.lower, args.upper)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inferred = False
    return column, domain, inferred


def cmd_run(args) -> int:
    if args.epsilon is not None:
        try:
            privacy = PrivacyParams(args.epsilon)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        privacy = PrivacyLevel(args.level)
    seed = _seed(args)
    column, domain, inferred = _load_column(args)
    spec = QuerySpec(QueryKind.parse(args.query), privacy, domain,
                     clamp_inputs=not args.no_clamp, bounds_inferred=inferred)
    if args.budget_file:
        label = f"{spec.kind.value}({args.column}) on {args.data}"
        accountant.charge_ledger_file(args.budget_file, label, spec.params.epsilon)
    result = run_query(column, spec, RngStream(seed))
    print(json.dumps(result.to_dict()))
    return EXIT_OK


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.isoformat(timespec="seconds")


def cmd_sweep(args) -> int:
    try:
        grid = bench.epsilon_grid(args.eps_start, args.eps_stop, args.eps_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.iterations < 1:
        raise UsageError("--iterations must be at least 1")
    seed = _seed(args)
    if seed is None:
        seed = secrets.randbits(63)
        _warn(f"no seed given; using {seed}")
    if seed < 0:
        raise UsageError("seed must be non-negative for sweeps")
    column, domain, inferred = _load_column(args)
    cfg = bench.SweepConfig(tuple(grid), args.iterations, QueryKind.parse(args.query),
                            domain, not args.no_clamp, seed, bounds_inferred=inferred)
    report = bench.run_sweep(column, cfg, timestamp=_timestamp() if args.format == "json" else None)
    bench.emit_report(report, args.format, args.out)
    print(f"{bench.MODE}: {cfg.kind.value}({args.column}) over {len(grid)} epsilons "
          f"x {cfg.iterations} iterations -> {args.out}")
    return EXIT_OK


def cmd_levels(args) -> int:
    for level, eps in LEVEL_EPSILONS.items():
        print(f"{level.value}\t{eps}")
    return EXIT_OK


def cmd_budget(args) -> int:
    if args.action == "init":
        if not args.total > 0:
            raise UsageError("--total must be positive")
        ledger = accountant.init_ledger_file(args.file, args.total)
    else:
        ledger = accountant.load_ledger_file(args.file)
    print(json.dumps({
        "total_epsilon": ledger.total_epsilon,
        "spent": ledger.spent,
        "remaining": ledger.remaining(),
        "charges": len(ledger.charges),
    }))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "levels": cmd_levels, "budget": cmd_budget}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _emit_error("UsageError", str(exc))
        return EXIT_USAGE
    except (GramDPError, OSError, ValueError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
