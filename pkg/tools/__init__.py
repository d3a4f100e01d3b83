"""Tools package for the heatsym CLI and MCP server."""

from .algebra_tool import verify_algebra, filter_problem, reduce_problem
from .compare_tool import run_compare, solve_analytic, solve_numeric, reproduce_figures, evaluate_solution
from .config_tool import load_config, RunConfig
from .report_tool import generate_report

__all__ = [
    "verify_algebra",
    "filter_problem",
    "reduce_problem",
    "run_compare",
    "solve_analytic",
    "solve_numeric",
    "reproduce_figures",
    "evaluate_solution",
    "load_config",
    "RunConfig",
    "generate_report"
]
