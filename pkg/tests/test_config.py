import json
import math

import pytest

from geqbit.config import ConfigError, config_hash, load_config, parse_axis, parse_config, parse_grade
from geqbit.impurity_strain import GradeMode
from geqbit.sweep import Parameter


def test_grades():
    assert parse_grade("5N").value == 1e-5
    g = parse_grade("13N")
    assert g.mode is GradeMode.NUMBER_DENSITY and g.value == pytest.approx(1e16)
    assert parse_grade("c=2e-7").value == 2e-7
    assert parse_grade("n=1e12cm-3").value == pytest.approx(1e18)
    assert parse_grade("1e12cm-3").value == pytest.approx(1e18)
    for bad in ("7N", "c=2", "n=1e12", "n=-1cm-3"):
        with pytest.raises(ConfigError):
            parse_grade(bad)


def test_defaults_without_file():
    cfg = load_config(None)
    assert cfg.calibration is None
    with pytest.raises(ConfigError, match="calibration"):
        cfg.base_config()
    with pytest.raises(ConfigError, match="Xx"):
        cfg.species("Xx")


def test_full_config(tmp_path):
    (tmp_path / "modes.csv").write_text("omega_hz,kappa_hz,weight\n# comment\n3e9,3e5,1\n")
    raw = {
        "constants": {"lattice_constant": "565.8pm", "valley_degeneracy_Nv": 1},
        "species": [{"symbol": "Sn", "dopant_type": "donor", "covalent_radius_pm": 139}],
        "species_loads": [{"symbol": "Sn", "grade": "9N"}],
        "sampling_volume": "1e-21m3",
        "operating_point": {"g_eff": 1.5, "field": "500mT", "temperature": "100mK", "modality": "gate_hole"},
        "calibration": "donor-ge-p",
        "s_pnc": 0.01,
        "t_phi": "2ms",
        "channels": {"gamma_surf": "2s-1", "gamma_other": "1/s"},
        "cavity": {"frequency": "3GHz", "quality_Q": 1e4, "coupling_g": "6.3MHz"},
        "mode_spectrum": "modes.csv",
        "reference_density": {"per_hz": 1e-9},
        "sweep": {"axes": [{"parameter": "delta_cav", "min": "-1GHz", "max": "1GHz", "points": 5}],
                  "crossover": False},
        "format": "json",
    }
    p = tmp_path / "c.json"
    p.write_text(json.dumps(raw))
    cfg = load_config(p)
    assert cfg.masses.valley_degeneracy_Nv == 1
    assert cfg.lattice.lattice_constant_a0 == pytest.approx(5.658e-10)
    assert cfg.species("Sn").mismatch_eta == pytest.approx(19 / 120)
    assert cfg.operating_point.field_B0 == pytest.approx(0.5)
    assert cfg.operating_point.temperature == pytest.approx(0.1)
    assert cfg.t_phi == pytest.approx(2e-3)
    assert cfg.channels.total == pytest.approx(3.0)
    assert cfg.cavity.omega_c == pytest.approx(2 * math.pi * 3e9)
    assert cfg.spectrum.modes[0].omega == pytest.approx(2 * math.pi * 3e9)
    assert cfg.sweep_axes[0].min == pytest.approx(-2 * math.pi * 1e9)
    assert cfg.format == "json"
    base = cfg.base_config()
    assert base.s_pnc == 0.01 and base.sampling_volume == pytest.approx(1e-21)


@pytest.mark.parametrize(
    "raw",
    [
        {"typo_key": 1},
        {"constants": {"m_x": 1.0}},
        {"sampling_volume": 1e-21},
        {"operating_point": {"field": "0.44", "temperature": "0.35K"}},
        {"operating_point": {"field": "0.44K", "temperature": "0.35K"}},
        {"channels": {"gamma_surf": "-1s-1"}},
        {"calibration": "nonexistent"},
        {"calibration": {"t1_ref": "1ms", "field": "1T"}},
        {"s_pnc": -1},
        {"format": "xml"},
        {"reference_density": {"per_hz": 1e-9}},
        {"species_loads": [{"symbol": "Zz", "grade": "5N"}]},
        {"constants": {"m_l": 0.01}},
        {"line_shape": "voigt"},
        {"mode_spectrum": "missing.csv", "reference_density": {"per_hz": 1e-9}},
    ],
)
def test_rejections(raw, tmp_path):
    with pytest.raises(ConfigError):
        parse_config(raw, tmp_path)


def test_calibration_object():
    cfg = parse_config({"calibration": {"t1_ref": "1ms", "field": "1T", "temperature": "1K",
                                        "field_exponent": 5, "temp_exponent": 2, "source": "test"}})
    assert cfg.calibration.t1_ref == pytest.approx(1e-3)
    assert cfg.calibration.field_exponent == 5


def test_axis_parsing():
    ax = parse_axis({"parameter": "B0", "min": "0.1T", "max": "1T", "points": 4, "scale": "log"})
    assert ax.parameter is Parameter.B0 and ax.max == 1.0
    ax = parse_axis({"parameter": "impurity_density", "min": "1e10cm-3", "max": "1e12cm-3", "points": 3})
    assert ax.min == pytest.approx(1e16)
    for bad in (
        {"parameter": "B0", "min": 0.1, "max": "1T", "points": 4},
        {"parameter": "Q", "min": 1e3, "max": 1e5, "points": 4.5},
        {"parameter": "nope", "min": 1, "max": 2, "points": 2},
        {"parameter": "S_pnc", "min": 1, "max": 1, "points": 2},
        {"parameter": "S_pnc", "min": 1},
    ):
        with pytest.raises(ConfigError):
            parse_axis(bad)


def test_hash_stable_and_sensitive():
    a = config_hash({"s_pnc": 0.1, "format": "csv"}, {"seed": 1})
    assert a == config_hash({"format": "csv", "s_pnc": 0.1}, {"seed": 1})
    assert a != config_hash({"s_pnc": 0.1, "format": "csv"}, {"seed": 2})
    assert len(a) == 16


def test_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")
