"""Command-line driver: ``rbo build | simulate | verify | nsi``.

Exit status: 0 on success, 1 when a verified property fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from . import checks, rng, wire
from .nsi import nsi_fast, nsi_oracle
from .receiver import QueryInterval
from .schedule import build_cycle
from .sim import ChannelModel, DEFAULT_CAP_CYCLES, SessionConfig, run_trials, summarize

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = (
    "trial", "k", "p", "seed", "start_slot", "tau", "en_tau", "hits",
    "misses_first_cycle", "misses_total", "ee_total", "converged_cycle",
)
NEVER = -1


class UsageError(Exception):
    pass


def tool_version() -> str:
    try:
        return version("rbo")
    except PackageNotFoundError:
        return "0+unknown"


def read_keys(path: Path) -> list[int]:
    try:
        text = path.read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    keys = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if not line.isdigit():
            raise UsageError(f"{path}:{lineno}: not a decimal unsigned integer: {line!r}")
        keys.append(int(line))
    if not keys:
        raise UsageError("no keys")
    return keys


def load_cycle(path: Path):
    try:
        return wire.decode_cycle(path.read_bytes())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except wire.WireError as e:
        raise UsageError(f"{path}: {e}") from None


def cmd_build(args) -> int:
    keys = read_keys(args.keys)
    try:
        cycle = build_cycle(keys)
    except ValueError as e:
        raise UsageError(str(e)) from None
    args.out.write_bytes(wire.encode_cycle(cycle))
    print(f"wrote {args.out}: k={cycle.k} n={cycle.n} ({len(keys)} input keys)")
    return EXIT_OK


def _row(trial: int, config: SessionConfig, stats) -> dict:
    def opt(v):
        return NEVER if v is None else v

    return {
        "trial": trial,
        "k": config.cycle.k,
        "p": repr(config.channel.p),
        "seed": config.channel.seed,
        "start_slot": config.start_slot,
        "tau": opt(stats.tau),
        "en_tau": opt(stats.en_tau),
        "hits": stats.hits,
        "misses_first_cycle": stats.misses_first_cycle,
        "misses_total": stats.misses_total,
        "ee_total": stats.ee_total,
        "converged_cycle": opt(stats.converged_cycle),
    }


def cmd_simulate(args) -> int:
    began = time.perf_counter()
    if not 0.0 < args.p <= 1.0:
        raise UsageError(f"--p must be in (0, 1], got {args.p}")
    if args.seed is None:
        env = os.environ.get("RBO_SEED", "0")
        if not env.isdigit():
            raise UsageError(f"RBO_SEED={env!r} is not an unsigned integer")
        args.seed = int(env)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.horizon_cycles < 1:
        raise UsageError("--horizon-cycles must be positive")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    cycle = load_cycle(args.cycle)
    try:
        config = SessionConfig(
            cycle,
            QueryInterval(args.lo, args.hi),
            start_slot=args.start,
            channel=ChannelModel(args.p, args.seed),
            horizon_cycles=args.horizon_cycles,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None

    results = run_trials(
        config, args.trials, stop_on_convergence=not args.full_horizon, workers=args.threads
    )
    rows = [_row(i, config, r) for i, r in enumerate(results)]
    report = summarize(config, results)
    echo = {
        "cycle": str(args.cycle), "k": cycle.k, "lo": args.lo, "hi": args.hi,
        "start": args.start, "p": args.p, "trials": args.trials,
        "horizon_cycles": args.horizon_cycles, "full_horizon": args.full_horizon,
    }
    meta = {
        "tool": "rbo", "version": tool_version(), "seed": args.seed,
        "generator": rng.GENERATOR_NAME, "config": echo,
    }
    aggregate = report.to_dict()
    status = EXIT_OK if report.passed else EXIT_FAIL
    if args.format == "json":
        meta["duration_s"] = round(time.perf_counter() - began, 6)
        json.dump({"metadata": meta, "rows": rows, "aggregate": aggregate}, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return status

    buf = io.StringIO()
    buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    sys.stdout.write(buf.getvalue())
    meta["duration_s"] = round(time.perf_counter() - began, 6)
    verdicts = {
        "total": report.pass_total,
        "first_cycle": report.pass_first_cycle,
        "after_first_cycle": report.pass_after_first_cycle,
        "reception_rate": report.pass_reception_rate,
    }
    flags = {name: None if v is None else ("PASS" if v else "FAIL") for name, v in verdicts.items()}
    line = {"aggregate": aggregate, "verdicts": flags, "metadata": meta}
    sys.stdout.write(json.dumps(line, sort_keys=True) + "\n")
    return status


def cmd_verify(args) -> int:
    if not 0 <= args.k_max <= 8:
        raise UsageError("--k-max must be in [0, 8]")
    began = time.perf_counter()
    failed = 0
    for k in range(args.k_max + 1):
        for name, suite in checks.SUITES.items():
            res = suite(k)
            tag = "PASS" if res.passed else "FAIL"
            line = f"{tag} {name:<14} k={k} cases={res.cases}"
            if not res.passed:
                failed += 1
                line += f" failures={res.failures} witness={res.witness}"
            if res.detail:
                line += f" | {res.detail}"
            print(line, flush=True)
    print(f"# {'FAIL' if failed else 'PASS'}: {failed} failing suite(s), "
          f"{time.perf_counter() - began:.1f}s")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_nsi(args) -> int:
    f = nsi_oracle if args.oracle else nsi_fast
    try:
        print(f(args.k, args.t, args.r1, args.r2))
    except ValueError as e:
        raise UsageError(str(e)) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="sort and pad a key list into a cycle file")
    p.add_argument("keys", type=Path, help="newline-separated decimal keys")
    p.add_argument("out", type=Path, help="cycle file to write")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="run receiver sessions; CSV rows + aggregate JSON")
    p.add_argument("cycle", type=Path)
    p.add_argument("--lo", type=int, required=True, help="lowest wanted key")
    p.add_argument("--hi", type=int, required=True, help="highest wanted key")
    p.add_argument("--start", type=int, default=0, help="start slot")
    p.add_argument("--p", type=float, default=1.0, help="reception probability")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: $RBO_SEED or 0)")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--horizon-cycles", type=int, default=DEFAULT_CAP_CYCLES,
                   help="hard cap on cycles per session")
    p.add_argument("--full-horizon", action="store_true",
                   help="keep listening after convergence until the cap")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="exhaustive property suites for k = 0..K")
    p.add_argument("--k-max", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("nsi", help="next slot whose bit reversal is in [r1, r2]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r1", type=int, required=True)
    p.add_argument("--r2", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="use the linear scan")
    p.set_defaults(func=cmd_nsi)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"rbo {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
