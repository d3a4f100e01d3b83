"""
Closed-Form Heat Conduction Solutions

Numerical evaluation of the similarity solutions of the two semi-infinite
solid problems:
- ibvp1: constant surface temperature T_s, initial temperature T_i
- ibvp2: constant surface heat flux q0pp into an initially zero field

plus the error function they are built from, Fourier-law fluxes and a
finite-difference check that a formula satisfies T_t = alpha T_xx.
"""

import math
from typing import Any, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import DomainError

Problem = Literal["ibvp1", "ibvp2"]
PROBLEM_NAMES: tuple[str, ...] = ("ibvp1", "ibvp2")

# Diffusivity as printed alongside the AISI 304 property list; k/(rho c) of
# the same list gives about 4.341e-6 m^2/s, which is the default.
PRINTED_DIFFUSIVITY = 4.34e-3

_SERIES_LIMIT = 2.5
_SQRT_PI = math.sqrt(math.pi)
_TWO_OVER_SQRT_PI = 2.0 / _SQRT_PI


class ThermalConfig(BaseModel):
    """Material properties and boundary drivers, SI units.

    alpha is derived as kcond / (rho * c_heat) when not given.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kcond: float = Field(18.2, gt=0, description="thermal conductivity, W/(m K)")
    rho: float = Field(7822.0, gt=0, description="density, kg/m^3")
    c_heat: float = Field(536.0, gt=0, description="specific heat, J/(kg K)")
    alpha: float = Field(gt=0, description="thermal diffusivity, m^2/s")
    T_i: float = Field(300.0, description="initial temperature, K")
    T_s: float = Field(900.0, description="surface temperature, K")
    q0pp: float = Field(5000.0, description="surface heat flux, W/m^2")
    L: float = Field(2.0, gt=0, description="truncated domain length, m")

    @model_validator(mode="before")
    @classmethod
    def _derive_alpha(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("alpha") is not None:
            return data
        values = {}
        for key in ("kcond", "rho", "c_heat"):
            raw = data.get(key, cls.model_fields[key].default)
            try:
                values[key] = float(raw)
            except (TypeError, ValueError):
                return data
        if values["rho"] > 0 and values["c_heat"] > 0:
            data = {**data, "alpha": values["kcond"] / (values["rho"] * values["c_heat"])}
        return data

    def diffusion_length(self, t: float) -> float:
        """2 sqrt(alpha t), the width of the similarity front."""
        return 2.0 * math.sqrt(self.alpha * t)


# ---------------------------------------------------------------------------
# Error function
# ---------------------------------------------------------------------------

def _erf_series(y: float) -> float:
    """Alternating Maclaurin series, used for |y| <= 2.5."""
    y2 = y * y
    power = y
    total = y
    n = 0
    while True:
        n += 1
        power *= -y2 / n
        term = power / (2 * n + 1)
        total += term
        if abs(term) < 1e-17 or n > 200:
            break
    return _TWO_OVER_SQRT_PI * total


def _erfc_continued_fraction(y: float) -> float:
    """erfc(y) for y > 2.5 by modified Lentz evaluation of the Laplace continued fraction."""
    tiny = 1e-300
    f = y
    C = f
    D = 0.0
    for n in range(1, 500):
        a = 0.5 * n
        D = y + a * D
        D = 1.0 / (D if D != 0.0 else tiny)
        C = y + a / C
        if C == 0.0:
            C = tiny
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-y * y) / (_SQRT_PI * f)


def erf(y: float) -> float:
    """Error function, absolute accuracy 1e-12 or better."""
    if math.isnan(y):
        raise DomainError("erf of NaN")
    if math.isinf(y):
        return math.copysign(1.0, y)
    a = abs(y)
    value = _erf_series(a) if a <= _SERIES_LIMIT else 1.0 - _erfc_continued_fraction(a)
    return math.copysign(value, y)


def erfc(y: float) -> float:
    """Complementary error function without cancellation in the right tail."""
    if y > _SERIES_LIMIT:
        return _erfc_continued_fraction(y)
    return 1.0 - erf(y)


# ---------------------------------------------------------------------------
# Solutions
# ---------------------------------------------------------------------------

def _check_point(x: float, t: float) -> None:
    if t <= 0:
        raise DomainError(f"t = {t} must be positive; the closed forms are singular at t = 0")
    if x < 0:
        raise DomainError(f"x = {x} lies outside the solid x >= 0")


def similarity_argument(x: float, t: float, cfg: ThermalConfig) -> float:
    """x / (2 sqrt(alpha t))."""
    _check_point(x, t)
    return x / cfg.diffusion_length(t)


def temp_ibvp1(x: float, t: float, cfg: ThermalConfig) -> float:
    """T = (T_i - T_s) erf(x / 2 sqrt(alpha t)) + T_s."""
    y = similarity_argument(x, t, cfg)
    return cfg.T_s + (cfg.T_i - cfg.T_s) * erf(y)


def temp_ibvp2(x: float, t: float, cfg: ThermalConfig) -> float:
    """T = (q/k) [2 sqrt(alpha t / pi) exp(-y^2) - x erfc(y)], y = x / 2 sqrt(alpha t).

    Same as 2 (q/k) sqrt(alpha t/pi) exp(-y^2) + (q/k) x (erf(y) - 1), written
    with erfc to keep the far field free of cancellation.
    """
    y = similarity_argument(x, t, cfg)
    q_over_k = cfg.q0pp / cfg.kcond
    return q_over_k * (2.0 * math.sqrt(cfg.alpha * t / math.pi) * math.exp(-y * y) - x * erfc(y))


def temperature(problem: Problem, x: float, t: float, cfg: ThermalConfig) -> float:
    if problem == "ibvp1":
        return temp_ibvp1(x, t, cfg)
    if problem == "ibvp2":
        return temp_ibvp2(x, t, cfg)
    raise ValueError(f"unknown problem {problem!r}")


def flux(x: float, t: float, cfg: ThermalConfig, problem: Problem) -> float:
    """Fourier-law flux -kcond dT/dx from the differentiated closed form."""
    y = similarity_argument(x, t, cfg)
    if problem == "ibvp1":
        return cfg.kcond * (cfg.T_s - cfg.T_i) * math.exp(-y * y) / math.sqrt(math.pi * cfg.alpha * t)
    if problem == "ibvp2":
        return cfg.q0pp * erfc(y)
    raise ValueError(f"unknown problem {problem!r}")


def far_field_value(problem: Problem, cfg: ThermalConfig) -> float:
    """Temperature the solution approaches as x -> infinity."""
    return cfg.T_i if problem == "ibvp1" else 0.0


def temperature_scale(problem: Problem, t: float, cfg: ThermalConfig) -> float:
    """|T_s - T_i| for ibvp1, the surface temperature T(0, t) for ibvp2."""
    if problem == "ibvp1":
        return abs(cfg.T_s - cfg.T_i)
    return abs(temp_ibvp2(0.0, t, cfg))


def profile(problem: Problem, xs: Sequence[float], t: float, cfg: ThermalConfig) -> np.ndarray:
    """Temperatures at the nodes xs at time t."""
    return np.array([temperature(problem, float(x), t, cfg) for x in xs], dtype=float)


def pde_residual(problem: Problem, x: float, t: float, h: float, cfg: ThermalConfig) -> float:
    """|T_t - alpha T_xx| by central differences with step h in both x and t."""
    if h <= 0:
        raise DomainError(f"step h = {h} must be positive")
    if x - h < 0 or t - h <= 0:
        raise DomainError(f"stencil of width {h} around (x={x}, t={t}) leaves the domain")

    def T(xx: float, tt: float) -> float:
        return temperature(problem, xx, tt, cfg)

    centre = T(x, t)
    T_t = (T(x, t + h) - T(x, t - h)) / (2.0 * h)
    T_xx = (T(x + h, t) - 2.0 * centre + T(x - h, t)) / (h * h)
    return abs(T_t - cfg.alpha * T_xx)


def invariant_solution(x: float, t: float, cfg: ThermalConfig) -> float:
    """T_i erf(x / 2 sqrt(alpha t)), the scaling-invariant solution with zero surface value."""
    return cfg.T_i * erf(similarity_argument(x, t, cfg))


def invariant_trace(t: float, cfg: ThermalConfig) -> float:
    """invariant_solution on the line x = 2 sqrt(alpha), equal to T_i erf(1/sqrt(t))."""
    return invariant_solution(2.0 * math.sqrt(cfg.alpha), t, cfg)
