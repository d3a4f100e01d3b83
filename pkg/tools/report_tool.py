"""
Report Generator Tool

Renders the dicts returned by the other tools as plain text (for the
terminal) or Markdown (for documentation and MCP clients).
"""

from datetime import datetime
from typing import Optional


def generate_report(
    algebra: Optional[dict] = None,
    filtered: Optional[dict] = None,
    reduced: Optional[dict] = None,
    comparison: Optional[dict] = None,
    format: str = "plain",
):
    """
    Combine pipeline results into one report.

    Args:
        algebra: Result of verify_algebra
        filtered: Result of filter_problem
        reduced: Result of reduce_problem
        comparison: Result of run_compare
        format: "plain" | "markdown"

    Returns:
        Dict with report text and metadata
    """
    if format == "markdown":
        report_text = _generate_markdown_report(algebra, filtered, reduced, comparison)
    else:
        report_text = _generate_plain_report(algebra, filtered, reduced, comparison)

    return {
        "report": report_text,
        "format": format,
        "generated_at": datetime.now().isoformat(),
    }


def format_algebra_table(algebra: dict) -> list[str]:
    """Pass/fail table of the symmetry and closure checks."""
    width = max(len(row["check"]) for row in algebra["checks"])
    lines = [f"{'check':<{width}}  result", "-" * (width + 8)]
    for row in algebra["checks"]:
        lines.append(f"{row['check']:<{width}}  {'PASS' if row['passed'] else 'FAIL'}")
    lines.append(f"{algebra['total'] - algebra['failed']}/{algebra['total']} checks passed")
    return lines


def format_filter(filtered: dict) -> list[str]:
    lines = [f"Problem {filtered['problem']}: {filtered['title']}", "Boundary invariance:"]
    lines += [f"  {row}" for row in filtered["boundary_constraints"]] or ["  (none)"]
    lines.append("Boundary-condition invariance:")
    lines += [f"  {row}" for row in filtered["condition_constraints"]] or ["  (none)"]
    if "flux_condition" in filtered:
        lines.append(f"  prolonged flux condition / k: {filtered['flux_condition']}")
    lines.append(f"Admitted operators: {', '.join(filtered['basis']) or 'only the trivial operator'}")
    for op in filtered["operators"]:
        lines.append(f"  X = {op}")
    for note in filtered["notes"]:
        lines.append(f"  note: {note}")
    return lines


def format_reduction(reduced: dict) -> list[str]:
    lines = [
        f"Similarity chart: {reduced['chart']}",
        f"Reduced ODE: {reduced['ode']}",
        f"Closed form: {reduced['closed_form']}",
    ]
    if reduced.get("c1") is not None:
        lines.append(f"  c1 = {reduced['c1']:.12g}, c2 = {reduced['c2']:.12g}")
    return lines


def format_comparison(comparison: dict) -> list[str]:
    lines = [f"{'t [s]':>8}  {'Linf [K]':>12}  {'L2 [K]':>12}  {'rel Linf':>10}"]
    for s in comparison["snapshots"]:
        lines.append(
            f"{s['time']:>8g}  {s['Linf_error']:>12.6g}  {s['L2_error']:>12.6g}  {s['relative_Linf']:>10.3e}"
        )
    trunc = comparison["truncation"]
    verdict = "pass" if trunc["passed"] else "FAIL"
    lines.append(
        f"Truncation at L = {trunc['L']:g} m, t = {trunc['time']:g} s: "
        f"analytic {trunc['analytic_deviation']:.3g} K, numeric {trunc['numeric_deviation']:.3g} K "
        f"(tol {trunc['tolerance']:g} K) {verdict}"
    )
    return lines


def _generate_plain_report(algebra, filtered, reduced, comparison) -> str:
    lines = [
        "=" * 60,
        "HEAT CONDUCTION SYMMETRY REPORT",
        "=" * 60,
        "",
        f"Date: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        "",
    ]
    for title, data, render in (
        ("SYMMETRY ALGEBRA", algebra, format_algebra_table),
        ("BOUNDARY FILTER", filtered, format_filter),
        ("SIMILARITY REDUCTION", reduced, format_reduction),
        ("ANALYTIC VS NUMERIC", comparison, format_comparison),
    ):
        if data is None:
            continue
        lines += [title, "-" * len(title)] + render(data) + [""]
    lines.append("=" * 60)
    return "\n".join(lines)


def _generate_markdown_report(algebra, filtered, reduced, comparison) -> str:
    timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    report = f"# Heat Conduction Symmetry Report\n\n- **Generated:** {timestamp}\n"

    if algebra is not None:
        report += f"\n## Symmetry Algebra\n\n{algebra['total'] - algebra['failed']}/{algebra['total']} checks passed.\n\n"
        report += "| Check | Result |\n|---|---|\n"
        for row in algebra["checks"]:
            report += f"| {row['check']} | {'pass' if row['passed'] else '**fail**'} |\n"

    if filtered is not None:
        report += f"\n## Boundary Filter: {filtered['problem']}\n\n*{filtered['title']}*\n\n"
        for row in filtered["boundary_constraints"] + filtered["condition_constraints"]:
            report += f"- `{row}`\n"
        if "flux_condition" in filtered:
            report += f"- prolonged flux condition / k: `{filtered['flux_condition']}`\n"
        report += f"\n**Admitted:** {', '.join(filtered['basis']) or 'trivial operator only'}\n"

    if reduced is not None:
        report += (
            f"\n## Similarity Reduction\n\n- **Chart:** `{reduced['chart']}`\n"
            f"- **ODE:** `{reduced['ode']}`\n- **Solution:** `{reduced['closed_form']}`\n"
        )

    if comparison is not None:
        report += "\n## Analytic vs Numeric\n\n| t [s] | Linf [K] | L2 [K] | relative Linf |\n|---|---|---|---|\n"
        for s in comparison["snapshots"]:
            report += f"| {s['time']:g} | {s['Linf_error']:.6g} | {s['L2_error']:.6g} | {s['relative_Linf']:.3e} |\n"
        trunc = comparison["truncation"]
        report += f"\nTruncation check: **{'pass' if trunc['passed'] else 'fail'}**\n"

    report += "\n---\n*Generated by heatsym*"
    return report
