"""Tests for the theta-scheme solver, the tridiagonal kernel and the truncation check."""

import logging
import random

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.linalg import solve_banded

from analytic import ThermalConfig, profile
from errors import NumericalFailure, StabilityViolation, ZeroPivotError
from fdsolver import (
    Field,
    GridSpec,
    ThetaSolver,
    boundary_flux,
    default_grid,
    ghost_flux,
    march,
    solve_fd,
    thomas_solve,
    validate_truncation,
)


def march_from_exact(problem, cfg, dx, dt, t0, t1, theta=0.5):
    """March from the closed form at t0 to t1 and return the field and its exact values."""
    grid = GridSpec(L=cfg.L, dx=dx, dt=dt, theta=theta, t_end=t1, snapshot_times=(t1,))
    start = Field(profile(problem, grid.nodes, t0, cfg), t0)
    (last,) = solve_fd(problem, cfg, grid, initial=start)
    return last, profile(problem, grid.nodes, last.time, cfg)


class TestGridSpec:
    def test_properties(self):
        grid = GridSpec(L=1.0, dx=0.1, dt=0.5, t_end=10.0, snapshot_times=(5.0, 1.0, 5.0))
        assert grid.n_cells == 10
        assert len(grid.nodes) == 11
        assert grid.targets == (1.0, 5.0)
        assert grid.mesh_ratio(1e-3) == pytest.approx(0.05)

    def test_targets_default_to_end(self):
        assert GridSpec(L=1.0, dx=0.1, dt=1.0, t_end=7.0).targets == (7.0,)

    @pytest.mark.parametrize("kwargs", [
        {"L": 1.0, "dx": 0.3, "dt": 1.0, "t_end": 10.0},
        {"L": 1.0, "dx": 0.2, "dt": 1.0, "t_end": 10.0},
        {"L": 1.0, "dx": 0.1, "dt": 0.0, "t_end": 10.0},
        {"L": 1.0, "dx": 0.1, "dt": 1.0, "t_end": 10.0, "theta": 1.5},
        {"L": 1.0, "dx": 0.1, "dt": 1.0, "t_end": 10.0, "snapshot_times": (11.0,)},
        {"L": 1.0, "dx": 0.1, "dt": 1.0, "t_end": 10.0, "snapshot_times": (0.0,)},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            GridSpec(**kwargs)

    def test_stability_limit(self):
        assert GridSpec(L=1.0, dx=0.1, dt=1.0, t_end=1.0, theta=0.0).stability_limit() == 0.5
        assert GridSpec(L=1.0, dx=0.1, dt=1.0, t_end=1.0, theta=0.25).stability_limit() == 1.0
        assert GridSpec(L=1.0, dx=0.1, dt=1.0, t_end=1.0, theta=0.5).stability_limit() == float("inf")

    def test_default_grids(self):
        g1, g2 = default_grid("ibvp1"), default_grid("ibvp2")
        assert (g1.L, g1.n_cells, g1.dt, g1.theta) == (2.0, 1000, 1.0, 0.5)
        assert (g2.L, g2.n_cells) == (10.0, 4000)
        assert g1.targets == (60.0, 600.0, 3600.0)
        assert default_grid("ibvp1", (60.0, 7200.0)).t_end == 7200.0


class TestThomas:
    def test_identity(self):
        rhs = [3.0, -1.0, 2.5, 7.0]
        np.testing.assert_array_equal(thomas_solve([0.0] * 3, [1.0] * 4, [0.0] * 3, rhs), rhs)

    def test_hand_system(self):
        x = thomas_solve([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0], [1.0, 0.0, 1.0])
        np.testing.assert_allclose(x, [1.0, 1.0, 1.0], rtol=0, atol=1e-15)

    def test_random_dominant_system(self):
        rng = random.Random(11)
        n = 50
        lower = [rng.uniform(-1, 1) for _ in range(n - 1)]
        upper = [rng.uniform(-1, 1) for _ in range(n - 1)]
        diag = [2.5 + rng.uniform(0, 1) for _ in range(n)]
        rhs = np.array([rng.uniform(-10, 10) for _ in range(n)])
        x = thomas_solve(lower, diag, upper, rhs)

        A = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
        assert np.max(np.abs(A @ x - rhs)) <= 1e-10 * np.max(np.abs(rhs))
        banded = np.array([[0.0] + upper, diag, lower + [0.0]])
        np.testing.assert_allclose(x, solve_banded((1, 1), banded, rhs), rtol=1e-12)

    def test_zero_pivot(self):
        with pytest.raises(ZeroPivotError):
            thomas_solve([1.0], [0.0, 1.0], [1.0], [1.0, 1.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            thomas_solve([1.0, 1.0], [2.0, 2.0], [1.0], [1.0, 1.0])


class TestField:
    def test_read_only(self):
        f = Field(np.zeros(3), 1.0)
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_non_finite(self):
        with pytest.raises(NumericalFailure):
            Field(np.array([0.0, np.nan, 1.0]), 1.0)


class TestScheme:
    def test_explicit_step(self):
        cfg = ThermalConfig(alpha=1e-4, T_i=300.0, T_s=900.0, L=0.1)
        grid = GridSpec(L=0.1, dx=0.01, dt=0.5, theta=0.0, t_end=0.5, snapshot_times=(0.5,))
        (f,) = solve_fd("ibvp1", cfg, grid)
        assert grid.mesh_ratio(cfg.alpha) == pytest.approx(0.5)
        assert f.values[0] == 900.0
        assert f.values[1] == pytest.approx(600.0, abs=1e-9)
        assert f.values[2] == pytest.approx(300.0, abs=1e-9)

    def test_explicit_instability(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, theta=0.0, t_end=10.0)
        with pytest.raises(StabilityViolation):
            solve_fd("ibvp1", fast_material, grid)

    def test_equilibrium_preserved(self):
        cfg = ThermalConfig(alpha=1e-4, T_i=650.0, T_s=650.0, L=0.5)
        grid = GridSpec(L=0.5, dx=0.01, dt=2.0, t_end=100.0, snapshot_times=(10.0, 100.0))
        for f in solve_fd("ibvp1", cfg, grid):
            np.testing.assert_allclose(f.values, 650.0, rtol=0, atol=1e-9)

    def test_no_flux_stays_zero(self, fast_material):
        cfg = fast_material.model_copy(update={"q0pp": 0.0})
        grid = GridSpec(L=0.5, dx=0.01, dt=2.0, t_end=100.0, snapshot_times=(50.0, 100.0))
        for f in solve_fd("ibvp2", cfg, grid):
            assert np.all(f.values == 0.0)

    def test_boundary_values(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=60.0, snapshot_times=(60.0,))
        (f1,) = solve_fd("ibvp1", fast_material, grid)
        (f2,) = solve_fd("ibvp2", fast_material, grid)
        assert f1.values[0] == 900.0 and f1.values[-1] == 300.0
        assert f2.values[-1] == 0.0 and f2.values[0] > 0.0

    @pytest.mark.parametrize("theta,dt", [(1.0, 5.0), (0.5, 1.0), (0.0, 0.5)])
    def test_maximum_principle(self, fast_material, theta, dt):
        grid = GridSpec(L=0.5, dx=0.01, dt=dt, theta=theta, t_end=200.0,
                        snapshot_times=tuple(float(s) for s in range(10, 201, 10)))
        for f in solve_fd("ibvp1", fast_material, grid):
            assert f.values.min() >= 300.0 - 1e-9
            assert f.values.max() <= 900.0 + 1e-9

    def test_snapshot_snapping(self, fast_material, caplog):
        grid = GridSpec(L=0.5, dx=0.01, dt=0.3, t_end=1.0, snapshot_times=(1.0,))
        with caplog.at_level(logging.WARNING, logger="fdsolver"):
            (f,) = solve_fd("ibvp1", fast_material, grid)
        assert f.time == pytest.approx(0.9)
        assert "snapped" in caplog.text

    def test_multiple_of_dt_is_not_snapped(self, fast_material, caplog):
        grid = GridSpec(L=0.5, dx=0.01, dt=0.1, t_end=0.3, snapshot_times=(0.3,))
        with caplog.at_level(logging.WARNING, logger="fdsolver"):
            (f,) = solve_fd("ibvp1", fast_material, grid)
        assert f.time == pytest.approx(0.3)
        assert "snapped" not in caplog.text

    def test_initial_field_length(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=10.0)
        with pytest.raises(ValueError):
            ThetaSolver("ibvp1", fast_material, grid, initial=Field(np.zeros(10), 1.0))

    def test_snapshot_before_start(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=10.0, snapshot_times=(5.0,))
        start = Field(np.full(51, 300.0), 6.0)
        with pytest.raises(ValueError):
            solve_fd("ibvp1", fast_material, grid, initial=start)

    def test_solver_counts_steps(self, fast_material):
        solver = ThetaSolver("ibvp1", fast_material, GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=10.0))
        solver.step()
        solver.step()
        assert solver.steps == 2
        assert solver.time == 2.0
        assert solver.ghost() is None


class TestConvergence:
    def test_spatial_second_order(self):
        cfg = ThermalConfig(alpha=1e-4, L=1.0)
        errors = []
        for dx in (0.02, 0.01):
            numeric, exact = march_from_exact("ibvp1", cfg, dx, 0.05, 20.0, 100.0)
            errors.append(np.max(np.abs(numeric.values - exact)))
        assert 3.0 <= errors[0] / errors[1] <= 5.0

    def test_temporal_second_order(self):
        cfg = ThermalConfig(alpha=1e-4, L=1.0)
        reference, _ = march_from_exact("ibvp1", cfg, 0.01, 0.0625, 20.0, 100.0)
        errors = []
        for dt in (1.0, 0.5):
            numeric, _ = march_from_exact("ibvp1", cfg, 0.01, dt, 20.0, 100.0)
            errors.append(np.max(np.abs(numeric.values - reference.values)))
        assert 3.0 <= errors[0] / errors[1] <= 5.0


class TestFlux:
    def test_ghost_node_imposes_flux(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=100.0, snapshot_times=(10.0, 50.0, 100.0))
        for f in solve_fd("ibvp2", fast_material, grid):
            assert ghost_flux(f, grid, fast_material) == pytest.approx(5000.0, rel=1e-9)

    def test_one_sided_estimate_converges(self):
        cfg = ThermalConfig(alpha=1e-4, L=1.0)
        gaps = []
        for dx in (0.02, 0.01, 0.005):
            grid = GridSpec(L=1.0, dx=dx, dt=0.1, t_end=100.0, snapshot_times=(100.0,))
            (f,) = solve_fd("ibvp2", cfg, grid)
            gaps.append(abs(boundary_flux(f, grid, cfg) - cfg.q0pp))
        assert gaps[2] < gaps[0]
        assert gaps[2] < 0.01 * cfg.q0pp

    def test_ghost_needs_flux_march(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=1.0)
        (f,) = solve_fd("ibvp1", fast_material, grid)
        with pytest.raises(ValueError):
            ghost_flux(f, grid, fast_material)


class TestTruncation:
    def test_far_end_reached(self, fast_material, caplog):
        last = Field(np.full(51, 300.0), 2500.0)
        with caplog.at_level(logging.WARNING, logger="fdsolver"):
            report = validate_truncation(last, fast_material, "ibvp1")
        assert not report.passed
        assert report.analytic_deviation > 1.0
        assert "truncation" in caplog.text

    def test_no_flux_passes(self, fast_material):
        cfg = fast_material.model_copy(update={"q0pp": 0.0})
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=100.0)
        (last,) = solve_fd("ibvp2", cfg, grid)
        report = validate_truncation(last, cfg, "ibvp2")
        assert report.passed
        assert report.to_dict()["passed"] is True

    @pytest.mark.slow
    def test_default_grid_passes(self, steel):
        grid = default_grid("ibvp1")
        fields = solve_fd("ibvp1", steel, grid)
        report = validate_truncation(fields[-1], steel, "ibvp1")
        assert report.passed
        assert report.time == 3600.0

    def test_checked_at_end_time(self, fast_material):
        grid = GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=5000.0, snapshot_times=(10.0,))
        fields, final = march("ibvp1", fast_material, grid)
        assert [f.time for f in fields] == [10.0]
        assert final.time == pytest.approx(5000.0)
        report = validate_truncation(final, fast_material, "ibvp1")
        assert report.time == pytest.approx(5000.0)
        assert report.analytic_deviation > 300.0
        assert not report.passed

    def test_final_is_last_snapshot_at_end_time(self, fast_material):
        solver = ThetaSolver("ibvp1", fast_material,
                             GridSpec(L=0.5, dx=0.01, dt=1.0, t_end=20.0, snapshot_times=(10.0, 20.0)))
        fields = solver.run()
        assert solver.final is fields[-1]
        assert solver.steps == 20
