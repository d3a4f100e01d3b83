"""Tests for run-file parsing and validation."""

from pathlib import Path

import pytest

from errors import ConfigError
from tools.config_tool import (
    config_from_mapping,
    default_run_config,
    describe_config,
    load_config,
    parse_config_text,
    required_keys,
)

IBVP1 = """\
# constant surface temperature
problem = ibvp1
T_i = 300
T_s = 900   # K
k = 18.2
rho = 7822
c_heat = 536
"""


def test_surface_temperature_file(tmp_path):
    rc = parse_config_text(IBVP1, base_dir=tmp_path)
    assert rc.problem == "ibvp1"
    assert (rc.thermal.T_i, rc.thermal.T_s, rc.thermal.kcond) == (300.0, 900.0, 18.2)
    assert rc.thermal.alpha == pytest.approx(4.341e-6, abs=1e-9)
    assert rc.grid.L == 2.0 and rc.grid.dx == 0.002
    assert rc.grid.targets == (60.0, 600.0, 3600.0)
    assert rc.output_dir == tmp_path / "output"


def test_flux_file_defaults():
    rc = parse_config_text("problem = ibvp2\nq0pp = 5000\nk = 18.2\nalpha = 4.34e-3\n")
    assert rc.thermal.alpha == 4.34e-3
    assert rc.thermal.L == rc.grid.L == 10.0


def test_grid_overrides():
    text = IBVP1 + "L = 0.5\ndx = 0.01\ndt = 0.5\ntheta = 1\nt_end = 100\nsnapshot_times = 10, 50,100\n"
    rc = parse_config_text(text)
    assert rc.grid.n_cells == 50
    assert rc.grid.theta == 1.0
    assert rc.grid.targets == (10.0, 50.0, 100.0)
    assert rc.thermal.L == 0.5


def test_default_snapshots_follow_end_time():
    rc = parse_config_text(IBVP1 + "t_end = 300\n")
    assert rc.grid.targets == (60.0,)
    rc = parse_config_text(IBVP1 + "t_end = 30\n")
    assert rc.grid.targets == (30.0,)


def test_empty_file_lists_required_keys():
    with pytest.raises(ConfigError) as info:
        parse_config_text("")
    for key in ("problem", "k", "T_i", "T_s", "q0pp", "rho", "c_heat"):
        assert key in str(info.value)


def test_required_keys():
    assert required_keys("ibvp1") == ["problem", "k", "T_i", "T_s"]
    assert required_keys("ibvp2") == ["problem", "k", "q0pp"]


@pytest.mark.parametrize("extra,line,key", [
    ("colour = blue\n", 8, "colour"),
    ("\n\ndt = fast\n", 10, "dt"),
    ("T_i = 310\n", 8, "T_i"),
    ("theta = 2\n", 8, "theta"),
    ("dx = 0.003\n", 8, "dx"),
    ("snapshot_times = 60, 9000\n", 8, "snapshot_times"),
])
def test_errors_carry_line_numbers(extra, line, key):
    with pytest.raises(ConfigError) as info:
        parse_config_text(IBVP1 + extra)
    assert info.value.line == line
    assert info.value.key == key


def test_nonphysical_conductivity():
    with pytest.raises(ConfigError) as info:
        parse_config_text(IBVP1.replace("k = 18.2", "k = -18.2"))
    assert info.value.key == "k"
    assert info.value.line == 5


def test_unknown_problem():
    with pytest.raises(ConfigError, match="problem must be one of"):
        parse_config_text(IBVP1.replace("ibvp1", "ibvp3"))


def test_unparsable_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text(IBVP1 + "just some words\n")
    assert info.value.line == 8


def test_missing_value():
    with pytest.raises(ConfigError, match="has no value"):
        parse_config_text(IBVP1 + "dx =\n")


def test_load_config(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(IBVP1 + "output_dir = results\n", encoding="utf-8")
    rc = load_config(path)
    assert rc.output_dir == tmp_path / "results"


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.conf")


def test_output_dir_must_be_directory(tmp_path):
    (tmp_path / "taken").write_text("x", encoding="utf-8")
    with pytest.raises(ConfigError, match="not a directory"):
        parse_config_text(IBVP1 + "output_dir = taken\n", base_dir=tmp_path)


def test_shipped_configs_load():
    root = Path(__file__).resolve().parents[1] / "configs"
    for name in ("ibvp1", "ibvp2"):
        rc = load_config(root / f"{name}.conf")
        assert rc.problem == name


def test_mapping_and_defaults():
    rc = config_from_mapping({"problem": "ibvp2", "k": 18.2, "alpha": 1e-5, "q0pp": 100.0})
    assert rc.thermal.q0pp == 100.0
    rc = default_run_config("ibvp1", output_dir="out")
    summary = describe_config(rc)
    assert summary["problem"] == "ibvp1"
    assert summary["output_dir"] == "out"
    assert summary["mesh_ratio"] == pytest.approx(rc.thermal.alpha * 1.0 / 0.002 ** 2)
