"""``czlab`` command line: run experiments, list them, dump corpora."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, ExperimentConfig, load_config
from .corpus import KINDS, generate_corpus
from .experiments import EXPERIMENTS, default_config, run
from .report import report_emit

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_SKIP, EXIT_USAGE = 0, 2, 3, 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="czlab", description="Numerical experiments for weighted commutator estimates")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run one experiment and write its report")
    c.add_argument("experiment", help="experiment id (see `czlab list`)")
    c.add_argument("--config", help="JSON config; defaults to the shipped config for the id")
    c.add_argument("--out", required=True, help="report path")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--seed", type=int)
    c.add_argument("--levels", help="comma-separated grid levels, e.g. 8,9,10")

    sub.add_parser("list", help="print the experiment / claim table")

    k = sub.add_parser("corpus", help="dump generator output as JSON")
    k.add_argument("kind", choices=KINDS)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--count", type=int, default=3)
    k.add_argument("--halfwidth", type=float, default=2.0)
    return ap


def _load(args) -> ExperimentConfig:
    defaults = default_config(args.experiment)
    if args.config:
        cfg = load_config(args.config, defaults)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
    else:
        cfg = ExperimentConfig.from_dict(defaults)
    levels = [int(v) for v in args.levels.split(",")] if args.levels else None
    return cfg.with_overrides(seed=args.seed, levels=levels)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        width = max(len(k) for k in EXPERIMENTS)
        for eid, exp in EXPERIMENTS.items():
            print(f"{eid:<{width}}  {exp.claim:<26}  {exp.description}")
        return EXIT_OK
    if args.command == "corpus":
        specs = generate_corpus(args.kind, args.seed, args.count, args.halfwidth)
        print(json.dumps(specs, indent=1, sort_keys=True))
        return EXIT_OK
    try:
        cfg = _load(args)
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        print(f"czlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run(cfg)
    report_emit(report, args.out, args.format)
    failed = [a["name"] for a in report.assertions if not a["passed"]]
    print(f"{report.experiment}: {report.status} ({len(report.assertions) - len(failed)}/{len(report.assertions)} assertions)")
    for name in failed:
        print(f"  FAILED {name}")
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
