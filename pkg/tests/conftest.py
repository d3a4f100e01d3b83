"""Shared fixtures for the heatsym test suite."""

import pytest

from analytic import ThermalConfig


@pytest.fixture
def steel() -> ThermalConfig:
    """AISI 304 stainless steel with the default drivers."""
    return ThermalConfig()


@pytest.fixture
def fast_material() -> ThermalConfig:
    """alpha = 1e-4 m^2/s on a 0.5 m bar, for coarse and quick marches."""
    return ThermalConfig(alpha=1e-4, T_i=300.0, T_s=900.0, q0pp=5000.0, L=0.5)
