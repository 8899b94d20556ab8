import os
import dataclasses

import pytest

from bondsim.config import ConfigError, ScenarioConfig, dump_config, load_config, loads_config
from bondsim.errors import ValidationError
from bondsim.lumped import Mode
from bondsim.stiffness import Variant


def test_empty_file_gives_defaults():
    cfg = loads_config("")
    assert cfg == ScenarioConfig()


def test_sections_apply():
    cfg = loads_config("""
[scenario]
model = roller
[materials]
K_steel = 17     ; inline comment
T_steel = 25.5
[stiffness]
variant = linear
[roller]
radius_m = 0.3
line_speed_m_s = 2
compression_ratio = 0.9
[solver]
rel_tol = 1e-10
""")
    assert cfg.model == "roller" and cfg.variant is Variant.LINEAR
    assert cfg.materials.K_steel == 17.0 and cfg.materials.T_steel == 25.5
    assert (cfg.radius_m, cfg.line_speed_m_s, cfg.compression_ratio) == (0.3, 2.0, 0.9)
    assert cfg.lumped_scenario().mode is Mode.ROLLER
    assert cfg.step_control().rel_tol == 1e-10


@pytest.mark.parametrize("text,field", [
    ("[roller]\ncompression_ratio = 0.4\n", "roller.compression_ratio"),
    ("[roller]\ncompression_ratio = 1.0\n", "roller.compression_ratio"),
    ("[roller]\nradius_m = -1\n", "roller.radius_m"),
    ("[roller]\nline_speed_m_s = 0\n", "roller.line_speed_m_s"),
    ("[materials]\nK_steel = -3\n", "materials.K_steel"),
    ("[materials]\nT_ambient = abc\n", "materials.T_ambient"),
    ("[materials]\nbogus = 1\n", "materials.bogus"),
    ("[roller]\nspeed = 1\n", "roller.speed"),
    ("[nonsense]\nx = 1\n", "nonsense"),
    ("[scenario]\nmodel = fem\n", "scenario.model"),
    ("[parabolic]\ngrid_n = 7\n", "parabolic.grid_n"),
    ("[parabolic]\ndtau = 0\n", "parabolic.dtau"),
    ("[parabolic]\ntau_end = 0\n", "parabolic.tau_end"),
    ("[lumped]\npoints = 1\n", "lumped.points"),
    ("[lumped]\nheating = maybe\n", "lumped.heating"),
    ("[scenario]\nmodel = adiabatic\n[lumped]\nstrain_end = 0.6\n", "lumped.strain_end"),
    ("[scenario]\nmodel = constant_speed\n[lumped]\ncompression_time_s = 0\n", "lumped.compression_time_s"),
    ("[scenario]\nmodel = constant_speed\n[roller]\ncompression_ratio = 0.3\n", "roller.compression_ratio"),
    ("[solver]\nrel_tol = 0\n", "solver.rel_tol"),
    ("[sweep]\nr_values = 0.4\nv_values = 1\n", "sweep.r_values"),
    ("[sweep]\nr_values = 0.8\nv_values =\n", "sweep.v_values"),
    ("[sweep]\nr_values = 0.8\nv_values = 1\nmodel = adiabatic\n", "sweep.model"),
    ("[sweep]\nr_values = 0.8\nv_values = 1\ncolour = red\n", "sweep.colour"),
])
def test_errors_name_the_field(text, field):
    with pytest.raises(ValidationError) as err:
        loads_config(text)
    assert err.value.field == field
    assert str(err.value).startswith(field + ": ")
    assert not err.value.message.startswith(field)


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError) as err:
        loads_config("[roller]\nradius_m = 0.2\nthis line is broken\n")
    assert err.value.field == "line 3"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as err:
        load_config(str(tmp_path / "absent.ini"))
    assert err.value.field == "file"


def test_file_name_becomes_scenario_name(tmp_path):
    p = tmp_path / "nip_a.ini"
    p.write_text("[roller]\ncompression_ratio = 0.7\n")
    assert load_config(str(p)).name == "nip_a"


def test_sweep_with_base(tmp_path):
    (tmp_path / "base.ini").write_text("[materials]\nK_steel = 17\n[parabolic]\ngrid_n = 20\n")
    (tmp_path / "map.ini").write_text(
        "[sweep]\nbase = base.ini\nr_values = 0.7, 0.8 0.9\nv_values = 0.6 6\nbond_threshold = 140\n"
        "[parabolic]\ntau_end = 2\n")
    cfg = load_config(str(tmp_path / "map.ini"))
    assert cfg.materials.K_steel == 17.0 and cfg.grid_n == 20 and cfg.tau_end == 2.0
    assert cfg.sweep.r_values == (0.7, 0.8, 0.9) and cfg.sweep.v_values == (0.6, 6.0)
    assert cfg.sweep.bond_threshold == 140.0 and cfg.sweep.model == "parabolic"


def test_sweep_threshold_above_cutoff():
    with pytest.raises(ValidationError) as err:
        loads_config("[sweep]\nr_values = 0.8\nv_values = 1\nbond_threshold = 170\n")
    assert err.value.field == "sweep.bond_threshold"


@pytest.mark.parametrize("text", [
    "",
    "[scenario]\nmodel = constant_speed\n[lumped]\ncompression_time_s = 3.3e-4\nflux = false\n",
    "[materials]\nT_steel = 0.1\nh_max = none\n[sweep]\nr_values = 0.6 0.7\nv_values = 0.3\n",
])
def test_dump_round_trip(text):
    cfg = loads_config(text)
    again = loads_config(dump_config(cfg))
    assert again == cfg


def test_echo_is_plain_data():
    echo = ScenarioConfig().echo()
    assert echo["variant"] == "quadratic"
    assert echo["materials"]["K_steel"] == 50.0


def test_validate_reuses_module_rules():
    cfg = dataclasses.replace(ScenarioConfig(), compression_ratio=0.5)
    with pytest.raises(ValidationError) as err:
        cfg.validate()
    assert err.value.field == "roller.compression_ratio"


def test_missing_header_reports_line(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("radius_m = 0.2\n")
    with pytest.raises(ConfigError) as err:
        load_config(str(p))
    assert err.value.field == "line 1"


@pytest.mark.parametrize("name", ["nip_fast.ini", "roller_lumped.ini", "bonding_map.ini"])
def test_shipped_configs_validate(name):
    here = os.path.dirname(os.path.abspath(__file__))
    cfg = load_config(os.path.join(here, "..", "configs", name))
    assert cfg.name == name[:-4]
