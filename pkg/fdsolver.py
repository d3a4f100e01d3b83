"""
Finite-Difference Heat Conduction Solver

Theta-scheme (0 = explicit, 1/2 = Crank-Nicolson, 1 = implicit) for
T_t = alpha T_xx on the truncated domain [0, L]:
- ibvp1: T = T_s at x = 0, T = T_i at x = L, initial field T_i
- ibvp2: -k T_x = q0pp at x = 0 through a ghost node, T = 0 at x = L,
  initial field 0

Every step is one tridiagonal solve with a factorization computed once per
march.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField, model_validator

from analytic import Problem, ThermalConfig, far_field_value, temperature
from errors import NumericalFailure, StabilityViolation, ZeroPivotError

logger = logging.getLogger(__name__)

MIN_CELLS = 8
DEFAULT_SNAPSHOT_TIMES: tuple[float, ...] = (60.0, 600.0, 3600.0)


class GridSpec(BaseModel):
    """Uniform mesh and time stepping for one march."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    L: float = PydanticField(gt=0, description="domain length, m")
    dx: float = PydanticField(gt=0, description="node spacing, m")
    dt: float = PydanticField(gt=0, description="time step, s")
    theta: float = PydanticField(0.5, ge=0, le=1, description="implicitness")
    t_end: float = PydanticField(gt=0, description="final time, s")
    snapshot_times: tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_mesh(self) -> "GridSpec":
        cells = self.L / self.dx
        if abs(cells - round(cells)) > 1e-9 * max(cells, 1.0):
            raise ValueError(f"L/dx = {cells:.6g} is not an integer")
        if round(cells) < MIN_CELLS:
            raise ValueError(f"L/dx = {round(cells)} must be at least {MIN_CELLS}")
        for s in self.snapshot_times:
            if not 0 < s <= self.t_end:
                raise ValueError(f"snapshot time {s} lies outside (0, t_end = {self.t_end}]")
        return self

    @property
    def n_cells(self) -> int:
        return round(self.L / self.dx)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n_cells + 1)

    @property
    def targets(self) -> tuple[float, ...]:
        """Snapshot times in increasing order; t_end alone when none are given."""
        return tuple(sorted(set(self.snapshot_times))) or (self.t_end,)

    def mesh_ratio(self, alpha: float) -> float:
        """r = alpha dt / dx^2."""
        return alpha * self.dt / (self.dx * self.dx)

    def stability_limit(self) -> float:
        """Largest stable r; unbounded for theta >= 1/2."""
        if self.theta >= 0.5:
            return math.inf
        return 1.0 / (2.0 * (1.0 - 2.0 * self.theta))


def default_grid(problem: Problem, snapshot_times: Sequence[float] = DEFAULT_SNAPSHOT_TIMES) -> GridSpec:
    """Crank-Nicolson grids resolving the front at t = 60 s for the AISI 304 diffusivity.

    t_end is 3600 s or the last snapshot time, whichever is later.
    """
    snapshot_times = tuple(snapshot_times)
    t_end = max((3600.0,) + snapshot_times)
    if problem == "ibvp1":
        return GridSpec(L=2.0, dx=0.002, dt=1.0, theta=0.5, t_end=t_end, snapshot_times=snapshot_times)
    if problem == "ibvp2":
        return GridSpec(L=10.0, dx=0.0025, dt=1.0, theta=0.5, t_end=t_end, snapshot_times=snapshot_times)
    raise ValueError(f"unknown problem {problem!r}")


@dataclass(frozen=True)
class Field:
    """Nodal temperatures at one time level; values are read-only.

    ghost holds the fictitious node T_{-1} for flux-driven marches.
    """

    values: np.ndarray
    time: float
    ghost: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise NumericalFailure(f"non-finite temperature at t = {self.time}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# Tridiagonal systems
# ---------------------------------------------------------------------------

class TridiagonalFactorization:
    """Thomas algorithm with the forward sweep done once.

    lower[i] multiplies x[i] in row i+1 and upper[i] multiplies x[i+1] in
    row i, so both have length len(diag) - 1.
    """

    def __init__(self, lower: Sequence[float], diag: Sequence[float], upper: Sequence[float]):
        n = len(diag)
        if n == 0:
            raise ValueError("empty system")
        if len(lower) != n - 1 or len(upper) != n - 1:
            raise ValueError(f"off-diagonals must have length {n - 1}")
        self.lower = [float(v) for v in lower]
        self.upper = [float(v) for v in upper]
        self.denom = [0.0] * n
        self.cprime = [0.0] * max(n - 1, 0)

        d = float(diag[0])
        for i in range(n):
            if i > 0:
                d = float(diag[i]) - self.lower[i - 1] * self.cprime[i - 1]
            if d == 0.0:
                raise ZeroPivotError(f"zero pivot in row {i}; the matrix is not diagonally dominant")
            self.denom[i] = d
            if i < n - 1:
                self.cprime[i] = self.upper[i] / d

    def solve(self, rhs: Sequence[float]) -> np.ndarray:
        n = len(self.denom)
        if len(rhs) != n:
            raise ValueError(f"rhs has length {len(rhs)}, expected {n}")
        dprime = [0.0] * n
        dprime[0] = float(rhs[0]) / self.denom[0]
        for i in range(1, n):
            dprime[i] = (float(rhs[i]) - self.lower[i - 1] * dprime[i - 1]) / self.denom[i]
        x = dprime
        for i in range(n - 2, -1, -1):
            x[i] = dprime[i] - self.cprime[i] * x[i + 1]
        return np.array(x)


def thomas_solve(lower: Sequence[float], diag: Sequence[float],
                 upper: Sequence[float], rhs: Sequence[float]) -> np.ndarray:
    """Solve one tridiagonal system."""
    return TridiagonalFactorization(lower, diag, upper).solve(rhs)


# ---------------------------------------------------------------------------
# Theta scheme
# ---------------------------------------------------------------------------

def check_stability(grid: GridSpec, alpha: float) -> float:
    """Mesh ratio of the grid; raises StabilityViolation above the theta limit."""
    r = grid.mesh_ratio(alpha)
    limit = grid.stability_limit()
    if r > limit * (1.0 + 1e-12):
        raise StabilityViolation(
            f"mesh ratio r = {r:.6g} exceeds {limit:.6g} for theta = {grid.theta}; "
            "reduce dt or raise theta"
        )
    return r


class ThetaSolver:
    """Stateful march of one problem on one grid."""

    def __init__(self, problem: Problem, cfg: ThermalConfig, grid: GridSpec,
                 initial: Optional[Field] = None):
        if problem not in ("ibvp1", "ibvp2"):
            raise ValueError(f"unknown problem {problem!r}")
        self.problem = problem
        self.cfg = cfg
        self.grid = grid
        self.r = check_stability(grid, cfg.alpha)
        self.flux_left = problem == "ibvp2"
        self.start = 0 if self.flux_left else 1
        # Ghost-node source 2 r dx q/k of the node-0 row.
        self.source = 2.0 * self.r * grid.dx * cfg.q0pp / cfg.kcond if self.flux_left else 0.0

        N = grid.n_cells
        far = far_field_value(problem, cfg)
        if initial is None:
            values = np.full(N + 1, far, dtype=float)
            self.time = 0.0
        else:
            if len(initial) != N + 1:
                raise ValueError(f"initial field has {len(initial)} nodes, grid has {N + 1}")
            values = np.array(initial.values, dtype=float)
            self.time = initial.time
        if not self.flux_left:
            values[0] = cfg.T_s
        values[N] = far
        self.values = values
        self.steps = 0
        self.final: Optional[Field] = None

        m = N - self.start
        theta_r = grid.theta * self.r
        diag = [1.0 + 2.0 * theta_r] * m
        lower = [-theta_r] * (m - 1)
        upper = [-theta_r] * (m - 1)
        if self.flux_left and m > 1:
            upper[0] = -2.0 * theta_r
        self.factorization = TridiagonalFactorization(lower, diag, upper)

    def ghost(self) -> Optional[float]:
        """T_{-1} = T_1 + 2 dx q/k, defined for flux-driven marches."""
        if not self.flux_left:
            return None
        return float(self.values[1] + 2.0 * self.grid.dx * self.cfg.q0pp / self.cfg.kcond)

    def step(self) -> None:
        T = self.values
        N = self.grid.n_cells
        theta, r = self.grid.theta, self.r
        w = 1.0 - theta

        rhs = (1.0 - 2.0 * w * r) * T[1:N] + w * r * (T[0:N - 1] + T[2:N + 1])
        if self.flux_left:
            row0 = (1.0 - 2.0 * w * r) * T[0] + 2.0 * w * r * T[1] + self.source
            rhs = np.concatenate(([row0], rhs))
        else:
            rhs[0] += theta * r * T[0]
        rhs[-1] += theta * r * T[N]

        T[self.start:N] = self.factorization.solve(rhs)
        self.steps += 1
        self.time += self.grid.dt

    def snapshot(self) -> Field:
        return Field(self.values.copy(), self.time, self.ghost())

    def run(self) -> list[Field]:
        """March to every snapshot time and on to t_end.

        Snapshot times snap to a multiple of dt. The field at t_end is kept
        in self.final.
        """
        dt = self.grid.dt
        start_time = self.time
        fields = []
        for target in self.grid.targets:
            if target <= start_time:
                raise ValueError(f"snapshot time {target} does not follow the start time {start_time}")
            n_steps = max(1, round((target - start_time) / dt))
            snapped = start_time + n_steps * dt
            if abs(snapped - target) > 1e-9 * max(target, 1.0):
                logger.warning("snapshot time %.6g s snapped to %.6g s (dt = %.6g s)", target, snapped, dt)
            while self.steps < n_steps:
                self.step()
            fields.append(self.snapshot())
        n_end = round((self.grid.t_end - start_time) / dt)
        if n_end > self.steps:
            while self.steps < n_end:
                self.step()
            self.final = self.snapshot()
        else:
            self.final = fields[-1]
        return fields


def march(problem: Problem, cfg: ThermalConfig, grid: GridSpec,
          initial: Optional[Field] = None) -> tuple[list[Field], Field]:
    """Snapshot fields plus the field at t_end."""
    solver = ThetaSolver(problem, cfg, grid, initial)
    logger.info(
        "%s: %d cells, r = %.4g, theta = %.3g", problem, grid.n_cells, solver.r, grid.theta
    )
    fields = solver.run()
    return fields, solver.final


def solve_fd(problem: Problem, cfg: ThermalConfig, grid: GridSpec,
             initial: Optional[Field] = None) -> list[Field]:
    """One Field per snapshot time of the grid."""
    return march(problem, cfg, grid, initial)[0]


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def boundary_flux(f: Field, grid: GridSpec, cfg: ThermalConfig) -> float:
    """-k T_x(0) from the one-sided second-order difference."""
    T = f.values
    return -cfg.kcond * (-3.0 * T[0] + 4.0 * T[1] - T[2]) / (2.0 * grid.dx)


def ghost_flux(f: Field, grid: GridSpec, cfg: ThermalConfig) -> float:
    """-k (T_1 - T_{-1}) / 2dx, the flux the ghost node imposes."""
    if f.ghost is None:
        raise ValueError("field carries no ghost node")
    return -cfg.kcond * (f.values[1] - f.ghost) / (2.0 * grid.dx)


@dataclass(frozen=True)
class TruncationReport:
    problem: str
    L: float
    time: float
    far_field: float
    analytic_deviation: float
    numeric_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.analytic_deviation <= self.tolerance and self.numeric_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "L": self.L,
            "time": self.time,
            "far_field": self.far_field,
            "analytic_deviation": self.analytic_deviation,
            "numeric_deviation": self.numeric_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def validate_truncation(last: Field, cfg: ThermalConfig, problem: Problem,
                        tolerance: float = 0.1) -> TruncationReport:
    """Check that the far end of [0, L] has not felt the surface.

    The node at x = L is pinned, so the numeric check reads the last
    interior node; the analytic check evaluates the closed form at x = L.
    """
    far = far_field_value(problem, cfg)
    analytic = abs(temperature(problem, cfg.L, last.time, cfg) - far)
    numeric = abs(float(last.values[-2]) - far)
    report = TruncationReport(problem, cfg.L, last.time, far, analytic, numeric, tolerance)
    if not report.passed:
        logger.warning(
            "%s: truncation at L = %g m fails at t = %g s (analytic %.3g K, numeric %.3g K)",
            problem, cfg.L, last.time, analytic, numeric,
        )
    return report
