"""
Analytic vs Numeric Comparison Tool

Runs the finite-difference march for a RunConfig, evaluates the closed form
on the same nodes and times, writes CSV datasets and reports the errors.

CSV files use 12 significant digits, ',' separators and '\\n' line endings,
so identical configurations produce byte-identical output.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

import settings
from analytic import (
    ThermalConfig,
    flux,
    profile,
    similarity_argument,
    temperature,
    temperature_scale,
)
from fdsolver import Field, GridSpec, TruncationReport, default_grid, march, validate_truncation
from tools.config_tool import RunConfig

logger = logging.getLogger(__name__)

CSV_FORMAT = "%.12g"
COMPARE_HEADER = "x,t,T_analytic,T_numeric,abs_error"
PROFILE_HEADER = "x,t,T_analytic"
NUMERIC_HEADER = "x,t,T_numeric"

FIGURE_FILES = {
    ("ibvp1", "profiles"): "figure1_ibvp1_profiles.csv",
    ("ibvp1", "comparison"): "figure2_ibvp1_comparison.csv",
    ("ibvp2", "profiles"): "figure3_ibvp2_profiles.csv",
    ("ibvp2", "comparison"): "figure4_ibvp2_comparison.csv",
}


def _round12(value: float) -> float:
    return float(CSV_FORMAT % value)


def write_csv(path: Path, header: str, columns: list[np.ndarray]) -> Path:
    """Write equal-length columns under a mandatory header row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack(columns), fmt=CSV_FORMAT, delimiter=",",
               header=header, comments="", newline="\n")
    return path


def _time_label(t: float) -> str:
    return f"t{t:g}"


@dataclass(frozen=True)
class SnapshotError:
    time: float
    Linf_error: float
    L2_error: float
    relative_Linf: float
    normalizer: float
    csv_path: Optional[str] = None


@dataclass(frozen=True)
class ComparisonReport:
    problem: str
    snapshots: tuple[SnapshotError, ...]
    truncation: TruncationReport

    def worst_relative(self) -> float:
        return max((s.relative_Linf for s in self.snapshots), default=0.0)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "snapshots": [
                {
                    "time": s.time,
                    "Linf_error": s.Linf_error,
                    "L2_error": s.L2_error,
                    "relative_Linf": s.relative_Linf,
                    "normalizer": s.normalizer,
                    "csv": s.csv_path,
                }
                for s in self.snapshots
            ],
            "worst_relative_Linf": self.worst_relative(),
            "truncation": self.truncation.to_dict(),
        }


def snapshot_error(problem: str, f: Field, nodes: np.ndarray, cfg: ThermalConfig) -> tuple[np.ndarray, SnapshotError]:
    """Analytic values on the nodes and the error summary of one snapshot."""
    exact = profile(problem, nodes, f.time, cfg)
    errors = np.abs(exact - f.values)
    linf = _round12(float(np.max(errors)))
    l2 = float(np.sqrt(np.mean(errors ** 2)))
    scale = temperature_scale(problem, f.time, cfg)
    if scale <= 0:
        logger.warning("%s: temperature scale vanishes at t = %g s; relative error uses 1 K", problem, f.time)
        scale = 1.0
    return exact, SnapshotError(f.time, linf, l2, linf / scale, scale)


def compare_fields(problem: str, cfg: ThermalConfig, grid: GridSpec, fields: list[Field],
                   output_dir: Optional[Path] = None, tolerance: Optional[float] = None,
                   final: Optional[Field] = None) -> tuple[ComparisonReport, list[np.ndarray]]:
    """Errors per snapshot; writes one comparison CSV each when output_dir is given.

    The truncation check reads final, the field at t_end, falling back to
    the last snapshot.
    """
    nodes = grid.nodes
    snapshots = []
    blocks = []
    for f in fields:
        exact, summary = snapshot_error(problem, f, nodes, cfg)
        block = [nodes, np.full_like(nodes, f.time), exact, f.values, np.abs(exact - f.values)]
        blocks.append(np.column_stack(block))
        if output_dir is not None:
            path = write_csv(output_dir / f"{problem}_compare_{_time_label(f.time)}.csv", COMPARE_HEADER, block)
            summary = replace(summary, csv_path=str(path))
        snapshots.append(summary)
    truncation = validate_truncation(
        fields[-1] if final is None else final, cfg, problem,
        settings.TRUNCATION_TOL if tolerance is None else tolerance,
    )
    return ComparisonReport(problem, tuple(snapshots), truncation), blocks


def run_compare(rc: RunConfig, write: bool = True) -> dict:
    """
    Solve numerically, compare against the closed form and write CSVs.

    Args:
        rc: Validated run configuration
        write: Write comparison and profile CSVs under rc.output_dir

    Returns:
        ComparisonReport as a dict, plus the written file paths
    """
    fields, final = march(rc.problem, rc.thermal, rc.grid)
    output_dir = rc.output_dir if write else None
    report, _ = compare_fields(rc.problem, rc.thermal, rc.grid, fields, output_dir, final=final)
    result = report.to_dict()
    if write:
        result["profiles"] = solve_analytic(rc)["files"]
    return result


def solve_analytic(rc: RunConfig) -> dict:
    """Closed-form profiles on the grid nodes, one CSV per snapshot time."""
    nodes = rc.grid.nodes
    files = []
    for t in rc.grid.targets:
        values = profile(rc.problem, nodes, t, rc.thermal)
        path = rc.output_dir / f"{rc.problem}_profile_{_time_label(t)}.csv"
        files.append(str(write_csv(path, PROFILE_HEADER, [nodes, np.full_like(nodes, t), values])))
    return {"problem": rc.problem, "files": files}


def solve_numeric(rc: RunConfig) -> dict:
    """Finite-difference snapshots, one CSV each, plus the truncation check."""
    fields, final = march(rc.problem, rc.thermal, rc.grid)
    nodes = rc.grid.nodes
    files = []
    for f in fields:
        path = rc.output_dir / f"{rc.problem}_fd_{_time_label(f.time)}.csv"
        files.append(str(write_csv(path, NUMERIC_HEADER, [nodes, np.full_like(nodes, f.time), f.values])))
    truncation = validate_truncation(final, rc.thermal, rc.problem, settings.TRUNCATION_TOL)
    return {"problem": rc.problem, "files": files, "truncation": truncation.to_dict()}


def _figure_runs(rc: RunConfig) -> list[tuple[str, ThermalConfig, GridSpec]]:
    """The configured problem plus its sibling on the sibling's default mesh and the same t_end."""
    runs = [(rc.problem, rc.thermal, rc.grid)]
    sibling = "ibvp2" if rc.problem == "ibvp1" else "ibvp1"
    grid = default_grid(sibling, rc.grid.targets).model_copy(update={"t_end": rc.grid.t_end})
    runs.append((sibling, rc.thermal.model_copy(update={"L": grid.L}), grid))
    return sorted(runs, key=lambda run: run[0])


def reproduce_figures(rc: RunConfig) -> dict:
    """
    Write the four figure datasets: profiles and comparisons for both problems.

    Returns:
        Dict with file paths and per-problem comparison reports
    """
    files = {}
    reports = {}
    for problem, cfg, grid in _figure_runs(rc):
        nodes = grid.nodes
        profiles = [
            np.column_stack([nodes, np.full_like(nodes, t), profile(problem, nodes, t, cfg)])
            for t in grid.targets
        ]
        path = rc.output_dir / FIGURE_FILES[(problem, "profiles")]
        files[path.name] = str(write_csv(path, PROFILE_HEADER, list(np.vstack(profiles).T)))

        fields, final = march(problem, cfg, grid)
        report, blocks = compare_fields(problem, cfg, grid, fields, final=final)
        path = rc.output_dir / FIGURE_FILES[(problem, "comparison")]
        files[path.name] = str(write_csv(path, COMPARE_HEADER, list(np.vstack(blocks).T)))
        reports[problem] = report.to_dict()
    return {"files": files, "reports": reports}


def evaluate_solution(problem: str, x: float, t: float, thermal: Optional[ThermalConfig] = None) -> dict:
    """
    Closed-form temperature and Fourier flux at one point.

    Args:
        problem: "ibvp1" | "ibvp2"
        x: Depth below the surface, m
        t: Time, s (must be positive)
        thermal: Material and drivers; AISI 304 defaults when omitted

    Returns:
        Dict with temperature (K), flux (W/m^2) and the similarity argument
    """
    cfg = thermal or ThermalConfig()
    return {
        "problem": problem,
        "x": x,
        "t": t,
        "alpha": cfg.alpha,
        "similarity_argument": similarity_argument(x, t, cfg),
        "temperature": temperature(problem, x, t, cfg),
        "flux": flux(x, t, cfg, problem),
    }
