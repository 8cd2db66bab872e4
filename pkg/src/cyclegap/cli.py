"""Command line entry point ``cyclegap``.

Exit codes: 0 all checks pass, 1 a check failed or a solver did not
converge, 2 usage or configuration error. ``CYCLEGAP_LOG`` selects the log
level (error, info, debug).
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from .exceptions import CycleGapError
from .operators import identity_violations
from .scenario import CHECK_NAMES, dumps_report, load_scenario, run

log = logging.getLogger("cyclegap")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser():
    parser = _Parser(prog="cyclegap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="solve a scenario and run every check")
    p.add_argument("scenario")
    p.add_argument("--out", help="report path (default: <name>.report.json)")

    p = sub.add_parser("verify", help="solve a scenario and run selected checks")
    p.add_argument("scenario")
    p.add_argument("--check", action="append", metavar="NAME",
                   help=f"one of {', '.join(CHECK_NAMES)}, all (repeatable; default all)")
    p.add_argument("--out")

    p = sub.add_parser("identities", help="random test of the cyclic operator identities")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    return parser


def _setup_logging():
    level = os.environ.get("CYCLEGAP_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def _run_scenario(path, checks, out):
    scenario = load_scenario(path)
    report, code = run(scenario, checks)
    out = Path(out) if out else Path(f"{scenario.name}.report.json")
    out.write_text(dumps_report(report))
    for rec in report["checks"]:
        status = "PASS" if rec["passed"] else "FAIL"
        print(f"{status}  {rec['name']:<9} violation={rec['violation']!s:<24} tol={rec['tolerance']}")
    gap = report["gap"]
    print(f"d = {gap['d']}")
    print(f"v = {gap['v']}")
    print(f"report written to {out}")
    return code


def _identities(m, n, trials, seed, tol):
    if m < 2 or n < 1 or trials < 1:
        print("error: need m >= 2, n >= 1 and trials >= 1", file=sys.stderr)
        return 2
    worst = identity_violations(m, n, trials, seed)
    width = max(map(len, worst))
    for name, value in worst.items():
        print(f"{'PASS' if value <= tol else 'FAIL'}  {name:<{width}}  {value:.3e}")
    return 0 if all(v <= tol for v in worst.values()) else 1


def main(argv=None):
    _setup_logging()
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "identities":
            return _identities(args.m, args.n, args.trials, args.seed, args.tol)
        if args.command == "run":
            return _run_scenario(args.scenario, CHECK_NAMES, args.out)
        names = args.check or ["all"]
        unknown = set(names) - set(CHECK_NAMES) - {"all"}
        if unknown:
            print(f"error: unknown check(s) {', '.join(sorted(unknown))}; "
                  f"choose from {', '.join(CHECK_NAMES)}, all", file=sys.stderr)
            return 2
        checks = CHECK_NAMES if "all" in names else tuple(c for c in CHECK_NAMES if c in names)
        return _run_scenario(args.scenario, checks, args.out)
    except CycleGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
