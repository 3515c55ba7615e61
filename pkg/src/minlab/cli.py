"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage/config error,
3 sampling exhaustion. A report is written for every code except 2.
"""

import argparse
import os
import sys

from .errors import ConfigError
from .scenarios import CATALOG, ScenarioConfig, list_scenarios, run

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_SAMPLING = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="minlab", description="Numerical minimality certificates.")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("list", help="print the scenario catalog")
    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("scenario")
    r.add_argument("--n", type=int)
    r.add_argument("--p", type=int)
    r.add_argument("--q", type=int)
    r.add_argument("--seed", type=int, default=None, help="defaults to $MINLAB_SEED or 0")
    r.add_argument("--samples", type=int, default=500)
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--mode", choices=("ad", "fd"), default="ad")
    r.add_argument("--out", dest="output_path")
    r.add_argument("--csv", dest="csv_path")
    r.add_argument("--workers", type=int, default=1)
    return parser


def _default_seed():
    raw = os.environ.get("MINLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"MINLAB_SEED is not an integer: {raw!r}") from None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "list":
        print(list_scenarios())
        return EXIT_PASS

    if args.scenario not in CATALOG:
        print(f"minlab: unknown scenario: {args.scenario}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = ScenarioConfig(
            scenario=args.scenario,
            seed=_default_seed() if args.seed is None else args.seed,
            samples=args.samples,
            tol=args.tol,
            mode=args.mode,
            n=args.n,
            p=args.p,
            q=args.q,
            output_path=args.output_path,
            csv_path=args.csv_path,
            workers=args.workers,
        )
    except ConfigError as exc:
        print(f"minlab: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = run(cfg)
    for check in report.checks:
        print(check.summary_line())
    if report.error:
        print(f"[ERROR] {report.error}")
    print(f"{cfg.scenario}: {report.verdict}")

    if cfg.output_path:
        report.write_json(cfg.output_path)
    else:
        sys.stdout.write(report.to_json())
    if cfg.csv_path:
        report.write_csv(cfg.csv_path)

    if report.error:
        return EXIT_SAMPLING
    return EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
