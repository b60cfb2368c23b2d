"""Command line entry point: ``hardening {fig1,fig2,fig3,fig4,rayleigh,validate}``.

Exit codes: 0 success, 1 configuration error, 2 validation failure,
3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import EXPERIMENTS, ConfigError, default_config, load_config, parse_config
from .montecarlo import NonFiniteTrialError, default_workers

log = logging.getLogger("hardening")

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    p.add_argument("--trials", type=int, help="trials per sweep point")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--plot", action="store_true", help="also write an SVG plot")
    p.add_argument("--workers", type=int, help="worker threads (default: $HARDENING_WORKERS or CPU count)")
    p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override any config key"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardening", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiment in EXPERIMENTS.items():
        _common(sub.add_parser(name, help=f"run the {experiment} sweep"))
    v = sub.add_parser("validate", help="run the property suite")
    _common(v)
    v.add_argument("--only", action="append", help="run only the named check (repeatable)")
    return parser


def _overrides(args) -> dict:
    out = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set: expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value
    if args.seed is not None:
        out["seed"] = str(args.seed)
    if args.trials is not None:
        out["trials"] = str(args.trials)
    return out


def _resolve_config(args):
    overrides = _overrides(args)
    if args.config is not None:
        return load_config(args.config, args.command, overrides)
    if overrides:
        return parse_config("", args.command, overrides)
    return default_config(args.command)


def _run_figure(args) -> int:
    from .experiments import run_experiment

    cfg = _resolve_config(args)
    workers = args.workers or default_workers()
    log.info("running %s (hash %s, seed %d, %d trials, %d workers)", cfg.experiment, cfg.config_hash(), cfg.seed, cfg.trials, workers)
    table = run_experiment(cfg, workers)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / f"{args.command}.csv"
    csv_path.write_text(table.to_csv(), encoding="utf-8")
    print(csv_path)
    if args.plot:
        from .plotting import plot_table

        svg_path = args.out / f"{args.command}.svg"
        plot_table(table, svg_path)
        print(svg_path)
    return EXIT_OK


def _run_validate(args) -> int:
    from .validation import run_validate

    if args.config is not None or args.overrides or args.trials is not None:
        log.warning("validate uses fixed reduced trial counts; --config/--set/--trials are ignored")
    seed = 0 if args.seed is None else args.seed
    try:
        report = run_validate(seed, args.only)
    except KeyError as exc:
        raise ConfigError(f"--only: {exc.args[0]}") from None
    text = json.dumps(report, indent=2)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "validate.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    for r in report["checks"]:
        if not r["passed"]:
            print(f"FAILED {r['name']} (seed {r['seed']}): {r['detail']}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "validate":
            return _run_validate(args)
        return _run_figure(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteTrialError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
