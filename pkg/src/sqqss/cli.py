"""Command-line entry point.

Examples::

    sqqss preset fig2_sweep --out fig2.csv
    sqqss session --variant entanglement --purity 0.78 --runs 100000
    sqqss attack --a-sq 0.6 --photons-per-qubit 100
    sqqss sweep --variant correlation --mode exact --n-list 10,25
    sqqss purity-scan --purity 0.78 --config my.cfg

Every field of :class:`~sqqss.config.ExperimentConfig` has a matching flag
(underscores become dashes). Values from ``--config`` are read first and flags
override them.
"""
from __future__ import annotations

import argparse
import sys

from .config import FIELD_NAMES, PRESETS, ConfigError, build_config, parse_config_text, parse_value
from .experiments import run_preset

SUBCOMMAND_TASKS = {"sweep": "sweep", "session": "session", "attack": "attack", "purity-scan": "purity_scan"}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", help="CSV output path (default: <preset>.csv)")
    for name in FIELD_NAMES:
        if name in ("preset", "task"):
            continue
        parser.add_argument("--" + name.replace("_", "-"), dest=name, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqqss", description="Single-qubit quantum secret sharing simulations")
    sub = parser.add_subparsers(dest="command", required=True)
    preset = sub.add_parser("preset", help="run a named experiment preset")
    preset.add_argument("name", choices=PRESETS)
    _add_common(preset)
    for command in SUBCOMMAND_TASKS:
        _add_common(sub.add_parser(command, help=f"run the {command} task"))
    return parser


def config_from_args(args: argparse.Namespace):
    values = {}
    if args.config:
        with open(args.config) as fh:
            values.update(parse_config_text(fh.read(), args.config))
    for name in FIELD_NAMES:
        raw = getattr(args, name, None)
        if raw is not None:
            values[name] = parse_value(name, raw)
    if args.command == "preset":
        values.pop("preset", None)
        return build_config(values, preset=args.name)
    values["task"] = SUBCOMMAND_TASKS[args.command]
    return build_config(values, preset="custom")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        path, summary = run_preset(config, args.out)
    except ConfigError as exc:
        print(f"sqqss: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sqqss: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"sqqss: {exc}", file=sys.stderr)
        return 1
    print(summary)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
