"""Command line: ``ncsim run``, ``ncsim sweep``, ``ncsim check``."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .experiments import ScenarioError, bundled, bundled_names, export, load_scenario, run_scenario, with_overrides
from .experiments.metrics import DIRECTIONS

SWEEP_COLUMNS = [
    "param",
    "value",
    "seed",
    "stable",
    "overshoot_pct",
    "dropped_frames",
    "offered_interference_load",
    *[f"mean_delay_s.{d}" for d in DIRECTIONS.values()],
    *[f"max_delay_s.{d}" for d in DIRECTIONS.values()],
]


def _read(name: str):
    # a path wins; otherwise fall back to a bundled scenario of that name
    if not Path(name).exists() and name.removesuffix(".cfg") in bundled_names():
        return bundled(name)
    return load_scenario(name)


def _load(args):
    s = _read(args.scenario)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["sim.seed"] = args.seed
    if getattr(args, "duration", None) is not None:
        overrides["sim.duration_s"] = args.duration
    return with_overrides(s, overrides) if overrides else s


def cmd_run(args) -> int:
    s = _load(args)
    trace, summary = run_scenario(s)
    files = export(trace, summary, args.out)
    verdict = "stable" if summary.stable else "unstable"
    ov = "n/a" if summary.overshoot_pct is None else f"{summary.overshoot_pct:.2f}%"
    print(f"{s.name or args.scenario}: {verdict}, overshoot {ov}, dropped {summary.dropped_frames}")
    for p in files:
        print(f"  wrote {p}")
    return 0


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    return repr(v) if isinstance(v, float) else str(v)


def cmd_sweep(args) -> int:
    base = _load(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ScenarioError(args.param, "no sweep values given")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    rows = []
    for value in values:
        s = with_overrides(base, {args.param: value})
        for k in range(args.seeds):
            seed = base.seed + k
            _, summary = run_scenario(s.with_seed(seed))
            rows.append(
                [
                    args.param,
                    value,
                    seed,
                    summary.stable,
                    summary.overshoot_pct,
                    summary.dropped_frames,
                    summary.offered_interference_load,
                    *[summary.mean_delay_s[d] for d in DIRECTIONS.values()],
                    *[summary.max_delay_s[d] for d in DIRECTIONS.values()],
                ]
            )
        n_stable = sum(1 for r in rows if r[1] == value and r[3])
        print(f"{args.param}={value}: {n_stable}/{args.seeds} stable")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    print(f"  wrote {path}")
    return 0


def cmd_check(args) -> int:
    s = _read(args.scenario)
    print(f"{args.scenario}: ok ({s.network.kind}, duration {s.duration_s} s, seed {s.seed})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario and export trace, frames and summary")
    r.add_argument("--scenario", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--duration", type=float)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="one summary row per (value, seed)")
    sw.add_argument("--scenario", required=True)
    sw.add_argument("--param", required=True, help="scenario key, e.g. loss.probability")
    sw.add_argument("--values", required=True, help="comma separated values")
    sw.add_argument("--seeds", type=int, default=20)
    sw.add_argument("--duration", type=float)
    sw.add_argument("--out", required=True)
    sw.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check", help="validate a scenario file without running it")
    c.add_argument("scenario_pos", nargs="?", metavar="SCENARIO")
    c.add_argument("--scenario", dest="scenario_opt")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check":
        args.scenario = args.scenario_opt or args.scenario_pos
        if not args.scenario:
            parser.error("check needs a scenario file")
    if getattr(args, "seeds", 1) < 1:
        parser.error("--seeds must be at least 1")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
