"""Run the built-in consecutive-measurement demo and print the report table.

    python scripts/consecutive.py --trials 1000000 --workers 4
"""

import argparse

from measurekit.harness import parse_config, run_config
from measurekit.harness.demos import DEMOS, demo_config


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--demo", choices=sorted(DEMOS), default="consecutive")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    report = run_config(
        parse_config(demo_config(args.demo)), seed=args.seed, trials=args.trials, workers=args.workers
    )
    print(report.to_table(), end="")
    raise SystemExit(0 if report.passed else 1)


if __name__ == "__main__":
    main()
