"""
Symmetry Algebra Tool

Runs the exact symmetry checks of the heat equation and the symbolic half of
the pipeline (boundary filter, similarity reduction, closed form) and returns
JSON-serializable summaries.
"""

from itertools import combinations
from typing import Optional

from analytic import ThermalConfig
from bvpfilter import filter_problem as run_filter
from bvpfilter import flux_condition
from exprcore import parse_expr, to_text
from liealg import (
    GENERATOR_IDS,
    commutator,
    expand_in_algebra,
    inf_generator,
    is_symmetry,
    named_generator,
)
from reduction import reduce_problem as run_reduction


# Solutions of T_t = alpha T_xx used as X_inf generators.
HEAT_POLYNOMIALS: tuple[str, ...] = (
    "1",
    "x",
    "x^2 + 2*alpha*t",
    "x^3 + 6*alpha*x*t",
    "x^4 + 12*alpha*x^2*t + 12*alpha^2*t^2",
)


def verify_algebra() -> dict:
    """
    Check every generator, the X_inf family and all commutator closures.

    Returns:
        Dict with per-check rows and an overall "passed" flag
    """
    rows = []
    for gen_id in GENERATOR_IDS:
        rows.append({"check": f"symmetry {gen_id}", "passed": is_symmetry(named_generator(gen_id))})
    for text in HEAT_POLYNOMIALS:
        f = parse_expr(text)
        rows.append({"check": f"symmetry X_inf(f = {to_text(f)})", "passed": is_symmetry(inf_generator(f))})
    for a, b in combinations(GENERATOR_IDS, 2):
        bracket = commutator(named_generator(a), named_generator(b))
        expansion = expand_in_algebra(bracket)
        rows.append({
            "check": f"closure [{a}, {b}]",
            "passed": expansion.in_algebra,
            "bracket": str(bracket),
        })
    return {
        "checks": rows,
        "passed": all(row["passed"] for row in rows),
        "total": len(rows),
        "failed": sum(1 for row in rows if not row["passed"]),
    }


def filter_problem(problem: str) -> dict:
    """
    Constraint rows and admitted operators for one problem.

    Args:
        problem: "ibvp1" | "ibvp2"

    Returns:
        Dict with boundary and condition rows, the admitted basis and notes
    """
    result = run_filter(problem)
    summary = {
        "problem": problem,
        "title": result.problem.title,
        "boundary_constraints": result.boundary.lines(grouped=True),
        "condition_constraints": result.conditions.lines(),
        "basis": result.subspace.describe(),
        "operators": [str(op) for op in result.subspace.operators()],
        "notes": list(result.notes),
    }
    if any(bc.kind == "neumann_flux" for bc in result.problem.conditions):
        summary["flux_condition"] = to_text(flux_condition(result.boundary))
    return summary


def reduce_problem(problem: str, thermal: Optional[ThermalConfig] = None) -> dict:
    """
    Similarity chart, reduced ODE and closed form, fitted when material data is given.

    Args:
        problem: "ibvp1" | "ibvp2"
        thermal: Optional material and driver values for the constants

    Returns:
        Dict of printable forms plus the fitted constants (None when unfitted)
    """
    result = run_reduction(problem, thermal)
    closed = result.closed_form
    return {
        "problem": problem,
        "chart": str(result.chart),
        "n": result.chart.n,
        "ode": str(result.ode),
        "closed_form": str(closed),
        "formula_id": closed.formula_id,
        "c1": closed.c1,
        "c2": closed.c2,
    }
