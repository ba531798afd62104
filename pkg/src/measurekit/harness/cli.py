"""Command line entry point: ``measurekit run | validate | demo``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .demos import DEMOS, demo_config
from .runner import (
    CheckFailure,
    ConfigParseError,
    ValidationError,
    load_config,
    run_config,
    validate_references,
)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="measurekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a config and emit a report")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--format", choices=("json", "table"), default="json")
    run.add_argument("--out", default=None, help="write the report here instead of stdout")
    run.add_argument("--workers", type=int, default=1, help="threads used for sampling")

    val = sub.add_parser("validate", help="parse and validate a config without running it")
    val.add_argument("config")

    demo = sub.add_parser("demo", help="print a built-in example config")
    demo.add_argument("name", choices=sorted(DEMOS))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "demo":
            sys.stdout.write(json.dumps(demo_config(args.name), indent=2) + "\n")
            return 0
        if args.command == "validate":
            cfg = load_config(args.config)
            validate_references(cfg)
            print(f"{args.config}: ok")
            return 0
        report = run_config(args.config, seed=args.seed, trials=args.trials, workers=args.workers)
        text = report.to_json() if args.format == "json" else report.to_table()
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if not report.passed:
            failed = [c["name"] for c in report.checks if not c["passed"]]
            failed += [c["label"] for c in report.comparisons if not c["passed"]]
            raise CheckFailure(f"{len(failed)} check(s) failed: {', '.join(failed[:10])}")
        return 0
    except (ConfigParseError, ValidationError, CheckFailure) as exc:
        print(f"measurekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
