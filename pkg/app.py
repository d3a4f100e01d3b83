"""
heatsym - Main Command-Line Application

Lie-symmetry pipeline for one-dimensional heat conduction in a semi-infinite
solid: verify the symmetry algebra, filter it by the boundary conditions,
reduce to an ODE, solve in closed form and compare against a
finite-difference solution.

Exit codes: 0 success, 1 usage, 2 configuration, 3 numerical failure.
"""

import argparse
import sys
from typing import Optional, Sequence

import settings
from errors import ConfigError, HeatSymError, NumericalFailure
from tools import (
    filter_problem,
    generate_report,
    load_config,
    reduce_problem,
    reproduce_figures,
    run_compare,
    solve_analytic,
    solve_numeric,
    verify_algebra,
)
from tools.config_tool import RunConfig, default_run_config
from tools.report_tool import format_algebra_table, format_comparison, format_filter, format_reduction

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

ACCEPTANCE_RELATIVE = 0.01


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code and prints the synopsis."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="heatsym", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--log-level", default=None, help="override HEATSYM_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("verify-algebra", help="exact symmetry and commutator checks")
    p.add_argument("--format", choices=("plain", "markdown"), default="plain")

    p = sub.add_parser("filter", help="boundary and boundary-condition constraints")
    p.add_argument("--problem", required=True, choices=("ibvp1", "ibvp2"))

    p = sub.add_parser("reduce", help="similarity chart, reduced ODE and closed form")
    p.add_argument("--problem", required=True, choices=("ibvp1", "ibvp2"))
    p.add_argument("--config", help="run file supplying material data for the constants")

    for name, text in (
        ("solve-analytic", "closed-form profile CSVs"),
        ("solve-fd", "finite-difference snapshot CSVs"),
        ("compare", "analytic vs numeric comparison CSVs and error table"),
        ("reproduce-figures", "the four figure datasets"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="key = value run file")

    p = sub.add_parser("pipeline", help="filter, reduce, fit and compare end to end")
    p.add_argument("--problem", required=True, choices=("ibvp1", "ibvp2"))
    p.add_argument("--config", help="run file (default material and grid when omitted)")
    p.add_argument("--format", choices=("plain", "markdown"), default="plain")
    return parser


def _print_files(files) -> None:
    for path in files:
        print(f"  ✓ {path}")


def cmd_verify_algebra(args) -> int:
    result = verify_algebra()
    if args.format == "markdown":
        print(generate_report(algebra=result, format="markdown")["report"])
    else:
        print("\n".join(format_algebra_table(result)))
    if result["passed"]:
        print("✓ Symmetry algebra verified")
        return EXIT_OK
    print(f"✗ {result['failed']} check(s) failed")
    return EXIT_NUMERICAL


def cmd_filter(args) -> int:
    print("\n".join(format_filter(filter_problem(args.problem))))
    return EXIT_OK


def cmd_reduce(args) -> int:
    rc = load_config(args.config) if args.config else default_run_config(args.problem)
    print("\n".join(format_reduction(reduce_problem(args.problem, rc.thermal))))
    return EXIT_OK


def cmd_solve_analytic(args) -> int:
    rc = load_config(args.config)
    print(f"Writing closed-form profiles for {rc.problem} to {rc.output_dir}")
    _print_files(solve_analytic(rc)["files"])
    return EXIT_OK


def cmd_solve_fd(args) -> int:
    rc = load_config(args.config)
    print(f"Marching {rc.problem}: {rc.grid.n_cells} cells, r = {rc.grid.mesh_ratio(rc.thermal.alpha):.4g}")
    result = solve_numeric(rc)
    _print_files(result["files"])
    _report_truncation(result["truncation"])
    return EXIT_OK


def _report_truncation(trunc: dict) -> None:
    if trunc["passed"]:
        print(f"✓ Far field undisturbed at L = {trunc['L']:g} m")
    else:
        print(f"⚠ Far field disturbed at L = {trunc['L']:g} m; enlarge L")


def _report_comparison(result: dict) -> None:
    print("\n".join(format_comparison(result)))
    worst = result["worst_relative_Linf"]
    if worst <= ACCEPTANCE_RELATIVE:
        print(f"✓ Relative Linf error {worst:.3e} within {ACCEPTANCE_RELATIVE:.0%}")
    else:
        print(f"⚠ Relative Linf error {worst:.3e} exceeds {ACCEPTANCE_RELATIVE:.0%}")


def cmd_compare(args) -> int:
    rc = load_config(args.config)
    result = run_compare(rc)
    _report_comparison(result)
    _print_files([s["csv"] for s in result["snapshots"]] + result["profiles"])
    return EXIT_OK


def cmd_reproduce_figures(args) -> int:
    rc = load_config(args.config)
    result = reproduce_figures(rc)
    for problem, report in result["reports"].items():
        print(f"{problem}:")
        _report_comparison(report)
    _print_files(result["files"].values())
    return EXIT_OK


def cmd_pipeline(args) -> int:
    rc: RunConfig = load_config(args.config) if args.config else default_run_config(args.problem)
    if rc.problem != args.problem:
        raise ConfigError(f"config is for {rc.problem}, not {args.problem}", key="problem")

    print("=" * 60)
    print(f"heatsym pipeline: {args.problem}")
    print("=" * 60)
    algebra = verify_algebra()
    print(f"{'✓' if algebra['passed'] else '✗'} Symmetry algebra: {algebra['total'] - algebra['failed']}/{algebra['total']} checks")
    filtered = filter_problem(args.problem)
    print(f"✓ Admitted operators: {', '.join(filtered['basis'])}")
    reduced = reduce_problem(args.problem, rc.thermal)
    print(f"✓ Reduced ODE: {reduced['ode']}")
    print(f"✓ Closed form: {reduced['closed_form']}")
    comparison = run_compare(rc)
    print(f"✓ Compared against {rc.grid.n_cells}-cell finite differences")
    print()
    print(generate_report(algebra, filtered, reduced, comparison, format=args.format)["report"])
    return EXIT_OK if algebra["passed"] else EXIT_NUMERICAL


COMMANDS = {
    "verify-algebra": cmd_verify_algebra,
    "filter": cmd_filter,
    "reduce": cmd_reduce,
    "solve-analytic": cmd_solve_analytic,
    "solve-fd": cmd_solve_fd,
    "compare": cmd_compare,
    "reproduce-figures": cmd_reproduce_figures,
    "pipeline": cmd_pipeline,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one CLI command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    settings.configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"✗ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as e:
        print(f"✗ Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HeatSymError as e:
        print(f"✗ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
