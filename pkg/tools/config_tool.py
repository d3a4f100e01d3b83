"""
Run Configuration Tool

Reads the flat `key = value` run files (one pair per line, `#` comments, SI
units) and validates them into a RunConfig. Keys:

    problem          ibvp1 | ibvp2
    T_i, T_s         initial / surface temperature, K
    q0pp             surface heat flux, W/m^2
    k                thermal conductivity, W/(m K)
    rho, c_heat      density kg/m^3, specific heat J/(kg K)
    alpha            thermal diffusivity, m^2/s (default k / (rho c_heat))
    L, dx            domain length and node spacing, m
    dt, t_end        time step and final time, s
    theta            0 explicit, 0.5 Crank-Nicolson, 1 implicit
    snapshot_times   comma-separated times, s
    output_dir       directory for CSV output, relative to the config file
"""

import io
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from dotenv.parser import parse_stream
from pydantic import BaseModel, ConfigDict, ValidationError

import settings
from analytic import PROBLEM_NAMES, Problem, ThermalConfig
from errors import ConfigError
from fdsolver import DEFAULT_SNAPSHOT_TIMES, GridSpec, default_grid


CONFIG_KEYS: dict[str, str] = {
    "problem": "ibvp1 | ibvp2",
    "T_i": "initial temperature, K",
    "T_s": "surface temperature, K",
    "q0pp": "surface heat flux, W/m^2",
    "k": "thermal conductivity, W/(m K)",
    "rho": "density, kg/m^3",
    "c_heat": "specific heat, J/(kg K)",
    "alpha": "thermal diffusivity, m^2/s",
    "L": "domain length, m",
    "dx": "node spacing, m",
    "dt": "time step, s",
    "theta": "implicitness in [0, 1]",
    "t_end": "final time, s",
    "snapshot_times": "comma-separated output times, s",
    "output_dir": "CSV output directory",
}

# ThermalConfig field -> config key
_THERMAL_FIELDS = {
    "kcond": "k", "rho": "rho", "c_heat": "c_heat", "alpha": "alpha",
    "T_i": "T_i", "T_s": "T_s", "q0pp": "q0pp", "L": "L",
}
_GRID_FIELDS = ("L", "dx", "dt", "theta", "t_end", "snapshot_times")


class RunConfig(BaseModel):
    """Everything one run needs: problem, material, grid and output location."""

    model_config = ConfigDict(frozen=True)

    problem: Problem
    thermal: ThermalConfig
    grid: GridSpec
    output_dir: Path


def required_keys(problem: Optional[str]) -> list[str]:
    """Keys that must appear for a problem; alpha may stand in for rho and c_heat."""
    keys = ["problem", "k"]
    if problem in (None, "ibvp1"):
        keys += ["T_i", "T_s"]
    if problem in (None, "ibvp2"):
        keys += ["q0pp"]
    return keys


def _parse_value(key: str, raw: str, line: Optional[int]) -> Any:
    if key == "problem":
        if raw not in PROBLEM_NAMES:
            raise ConfigError(f"problem must be one of {', '.join(PROBLEM_NAMES)}, got {raw!r}", line, key)
        return raw
    if key == "snapshot_times":
        try:
            return tuple(float(part) for part in raw.split(",") if part.strip())
        except ValueError:
            raise ConfigError(f"snapshot_times must be comma-separated numbers, got {raw!r}", line, key) from None
    if key == "output_dir":
        return raw
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}", line, key) from None


def _validation_error(exc: ValidationError, field_to_key: Mapping[str, str],
                      lines: Mapping[str, int], fallback: Optional[str] = None) -> ConfigError:
    """First pydantic error as a ConfigError; model-level errors are pinned to `fallback`."""
    first = exc.errors()[0]
    name = str(first["loc"][0]) if first["loc"] else ""
    key = field_to_key.get(name, name) or fallback
    if not key:
        return ConfigError(first["msg"])
    return ConfigError(f"{key}: {first['msg']}", lines.get(key), key)


def config_from_mapping(values: Mapping[str, Any], lines: Optional[Mapping[str, int]] = None,
                        base_dir: Optional[Path] = None) -> RunConfig:
    """Validate already-split key/value pairs; `lines` maps keys to source lines."""
    lines = dict(lines or {})
    for key in values:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", lines.get(key), key)
    parsed = {
        key: _parse_value(key, str(raw), lines.get(key)) if isinstance(raw, str) else raw
        for key, raw in values.items()
    }

    problem = parsed.get("problem")
    missing = [key for key in required_keys(problem) if key not in parsed]
    if "alpha" not in parsed and not {"rho", "c_heat"} <= parsed.keys():
        missing += [key for key in ("rho", "c_heat") if key not in parsed]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    defaults = default_grid(problem)
    L = parsed.get("L", defaults.L)
    thermal_args = {
        field: parsed[key] for field, key in _THERMAL_FIELDS.items() if key in parsed
    }
    thermal_args["L"] = L
    try:
        thermal = ThermalConfig(**thermal_args)
    except ValidationError as exc:
        raise _validation_error(exc, _THERMAL_FIELDS, lines) from None

    grid_args = {name: parsed.get(name, getattr(defaults, name)) for name in _GRID_FIELDS}
    grid_args["L"] = L
    if "snapshot_times" not in parsed:
        kept = tuple(s for s in DEFAULT_SNAPSHOT_TIMES if s <= grid_args["t_end"])
        grid_args["snapshot_times"] = kept or (grid_args["t_end"],)
    try:
        grid = GridSpec(**grid_args)
    except ValidationError as exc:
        fallback = "snapshot_times" if "snapshot" in exc.errors()[0]["msg"] else "dx"
        raise _validation_error(exc, {name: name for name in _GRID_FIELDS}, lines, fallback) from None

    output_dir = Path(parsed.get("output_dir", settings.DEFAULT_OUTPUT_DIR))
    if not output_dir.is_absolute() and base_dir is not None:
        output_dir = base_dir / output_dir
    if output_dir.exists() and not output_dir.is_dir():
        raise ConfigError(f"output_dir {output_dir} is not a directory", lines.get("output_dir"), "output_dir")

    return RunConfig(problem=problem, thermal=thermal, grid=grid, output_dir=output_dir)


def _binding_line(binding) -> int:
    # the parser marks a binding where the blank lines before it begin
    raw = binding.original.string
    return binding.original.line + raw[: len(raw) - len(raw.lstrip())].count("\n")


def parse_config_text(text: str, base_dir: Optional[Path] = None) -> RunConfig:
    """Parse the flat key = value format; errors carry the offending line number."""
    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = _binding_line(binding)
        if binding.error:
            raise ConfigError(f"cannot parse {binding.original.string.strip()!r}", line)
        if binding.key is None:
            continue
        if binding.key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {binding.key!r}", line, binding.key)
        if binding.value is None or not binding.value.strip():
            raise ConfigError(f"{binding.key} has no value", line, binding.key)
        if binding.key in values:
            raise ConfigError(f"{binding.key} given twice (first on line {lines[binding.key]})", line, binding.key)
        values[binding.key] = binding.value.strip()
        lines[binding.key] = line
    return config_from_mapping(values, lines, base_dir)


def load_config(path: Union[str, Path]) -> RunConfig:
    """Load a run file; relative output_dir resolves against the file's directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_config_text(text, base_dir=path.parent)


def default_run_config(problem: str, output_dir: Optional[Union[str, Path]] = None) -> RunConfig:
    """AISI 304 material with the default drivers and grid of a problem."""
    values: dict[str, Any] = {
        "problem": problem, "k": 18.2, "rho": 7822.0, "c_heat": 536.0,
        "T_i": 300.0, "T_s": 900.0, "q0pp": 5000.0,
    }
    if output_dir is not None:
        values["output_dir"] = str(output_dir)
    return config_from_mapping(values)


def describe_config(rc: RunConfig) -> dict:
    """JSON-serializable summary of a RunConfig."""
    return {
        "problem": rc.problem,
        "thermal": rc.thermal.model_dump(),
        "grid": rc.grid.model_dump(),
        "mesh_ratio": rc.grid.mesh_ratio(rc.thermal.alpha),
        "output_dir": str(rc.output_dir),
    }
