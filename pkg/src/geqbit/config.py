"""Strict JSON run configuration.

Unknown keys are errors; dimensioned values are strings with a unit suffix
(``"0.44T"``, ``"3GHz"``, ``"0.6ms"``, ``"2/s"``). Relative paths resolve
against the config file's directory and are checked before any computation.

Example::

    {
      "constants": {"m_lh": 0.28},
      "operating_point": {"g_eff": 2.0, "field": "0.44T", "temperature": "0.35K"},
      "calibration": "donor-ge-p",
      "s_pnc": 0.01,
      "channels": {"gamma_other": "1/s"},
      "cavity": {"frequency": "3GHz", "quality_Q": 1e4, "coupling_g": "6.3MHz"},
      "sweep": {"axes": [{"parameter": "S_pnc", "min": 1e-4, "max": 1, "scale": "log", "points": 41}]}
    }
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .impurity_strain import GRADES, ImpuritySpecies, PurityGrade, load_species
from .materials import BandEdgeMasses, GeLatticeConstants, PhysicalConstants
from .relaxation_budget import (
    SIGILLITO_DONOR,
    CalibrationPoint,
    CavityParams,
    LineShape,
    ModeSpectrum,
    ParasiticChannels,
    QubitOperatingPoint,
    ReferenceDensity,
    load_mode_spectrum,
    load_reference_density,
)
from .sweep import Axis, BaseConfig, Parameter
from .units import UnitError, hz_to_rad, parse_quantity

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "parse_grade", "CALIBRATIONS", "config_hash"]


class ConfigError(ValueError):
    pass


CALIBRATIONS = {"donor-ge-p": SIGILLITO_DONOR}

_TOP_KEYS = {
    "constants", "species_database", "species", "species_loads", "sampling_volume",
    "operating_point", "calibration", "s_pnc", "t_phi", "channels", "cavity",
    "mode_spectrum", "reference_density", "line_shape", "sweep", "mc", "output_dir", "format",
}
_CONST_KEYS = {
    "lattice_constant", "bohr_magneton_J_per_T", "reduced_planck_J_s", "electron_mass_kg",
    "m_l", "m_t", "m_hh", "m_lh", "m_so", "m_gamma", "valley_degeneracy_Nv",
}


def _strict(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {extra}; allowed: {sorted(allowed)}")
    return obj


def _q(value: Any, dimension: str, where: str) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        raise ConfigError(f"{where}: bare number {value!r} needs a {dimension} unit suffix")
    try:
        return parse_quantity(value, dimension)
    except UnitError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def parse_grade(text: str) -> PurityGrade:
    """``5N``/``9N``/``13N``, ``c=<fraction>`` or ``n=<density with unit>`` (``n=`` optional)."""
    t = str(text).strip()
    if t.upper() in GRADES:
        return GRADES[t.upper()]
    try:
        if t.startswith("c="):
            return PurityGrade.fraction(float(t[2:]), label=t)
        body = t[2:] if t.startswith("n=") else t
        return PurityGrade.density(parse_quantity(body, "density"), label=t)
    except ValueError as exc:
        raise ConfigError(f"bad purity grade {text!r}: {exc}") from None


@dataclass
class RunConfig:
    raw: dict = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)
    masses: BandEdgeMasses = field(default_factory=BandEdgeMasses)
    lattice: GeLatticeConstants = field(default_factory=GeLatticeConstants)
    consts: PhysicalConstants = field(default_factory=PhysicalConstants)
    species_db: dict[str, ImpuritySpecies] = field(default_factory=load_species)
    species_loads: tuple = ()
    sampling_volume: float | None = None
    operating_point: QubitOperatingPoint | None = None
    calibration: CalibrationPoint | None = None
    s_pnc: float | None = None
    t_phi: float = math.inf
    channels: ParasiticChannels = field(default_factory=ParasiticChannels)
    cavity: CavityParams | None = None
    spectrum: ModeSpectrum | None = None
    sweep_axes: tuple[Axis, ...] = ()
    sweep_crossover: bool = False
    mc: dict = field(default_factory=dict)
    output_dir: Path | None = None
    format: str = "csv"

    def species(self, symbol: str) -> ImpuritySpecies:
        try:
            return self.species_db[symbol]
        except KeyError:
            raise ConfigError(f"unknown species symbol {symbol!r}; known: {sorted(self.species_db)}") from None

    def base_config(self) -> BaseConfig:
        """Fixed budget inputs; the operating point defaults to the calibration's (B0, T) at g = 2."""
        if self.calibration is None:
            raise ConfigError("no calibration point: set 'calibration' in the config or pass --calibration")
        op = self.operating_point or QubitOperatingPoint(2.0, self.calibration.field_ref, self.calibration.temp_ref)
        return BaseConfig(
            operating_point=op,
            calibration=self.calibration,
            channels=self.channels,
            cavity=self.cavity,
            s_pnc=self.s_pnc,
            spectrum=self.spectrum,
            t_phi=self.t_phi,
            species_loads=self.species_loads,
            sampling_volume=self.sampling_volume,
            lattice=self.lattice,
            consts=self.consts,
        )


def config_hash(raw: dict, extra: dict | None = None) -> str:
    blob = json.dumps({"config": raw, "flags": extra or {}}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return parse_config({})
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from None
    return parse_config(raw, p.parent)


def _path(value: Any, base: Path, where: str) -> Path:
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a path string")
    p = Path(value)
    p = p if p.is_absolute() else base / p
    if not p.is_file():
        raise ConfigError(f"{where}: file not found: {p}")
    return p


_AXIS_DIM = {
    Parameter.B0: "field",
    Parameter.T: "temperature",
    Parameter.DELTA_CAV: "frequency",
    Parameter.G_COUPLING: "frequency",
    Parameter.IMPURITY_DENSITY: "density",
}


def parse_axis(obj: Any, where: str = "sweep.axes[]") -> Axis:
    obj = _strict(obj, {"parameter", "min", "max", "scale", "points"}, where)
    for k in ("parameter", "min", "max", "points"):
        if k not in obj:
            raise ConfigError(f"{where}: missing {k!r}")
    try:
        param = Parameter(obj["parameter"])
    except ValueError:
        raise ConfigError(f"{where}: unknown parameter {obj['parameter']!r}; use one of {[p.value for p in Parameter]}") from None
    dim = _AXIS_DIM.get(param)
    if dim is None:
        lo, hi = _num(obj["min"], f"{where}.min"), _num(obj["max"], f"{where}.max")
    else:
        lo, hi = _q(obj["min"], dim, f"{where}.min"), _q(obj["max"], dim, f"{where}.max")
        if dim == "frequency":
            lo, hi = hz_to_rad(lo), hz_to_rad(hi)
    points = obj["points"]
    if isinstance(points, bool) or not isinstance(points, int):
        raise ConfigError(f"{where}.points: expected an integer")
    try:
        return Axis(param, lo, hi, points, obj.get("scale", "linear"))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(raw: dict, base_dir: Path | None = None) -> RunConfig:
    _strict(raw, _TOP_KEYS, "config")
    cfg = RunConfig(raw=raw, base_dir=base_dir or Path.cwd())
    try:
        _fill(cfg, raw, cfg.base_dir)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _fill(cfg: RunConfig, raw: dict, base: Path) -> None:
    if "constants" in raw:
        c = _strict(raw["constants"], _CONST_KEYS, "constants")
        if "lattice_constant" in c:
            cfg.lattice = GeLatticeConstants(_q(c["lattice_constant"], "length", "constants.lattice_constant"))
        pc = {}
        for key, name in (("bohr_magneton_J_per_T", "bohr_magneton"), ("reduced_planck_J_s", "reduced_planck"),
                          ("electron_mass_kg", "electron_mass")):
            if key in c:
                pc[name] = _num(c[key], f"constants.{key}")
        cfg.consts = PhysicalConstants(**pc)
        mk = {k: c[k] for k in ("m_l", "m_t", "m_hh", "m_lh", "m_so", "m_gamma", "valley_degeneracy_Nv") if k in c}
        for k, v in mk.items():
            _num(v, f"constants.{k}")
        cfg.masses = BandEdgeMasses(**mk)

    if "species_database" in raw:
        cfg.species_db = load_species(_path(raw["species_database"], base, "species_database"))
    for i, sp in enumerate(raw.get("species", [])):
        sp = _strict(sp, {"symbol", "dopant_type", "covalent_radius_pm"}, f"species[{i}]")
        cfg.species_db[sp["symbol"]] = ImpuritySpecies(
            sp["symbol"], sp["dopant_type"], _num(sp["covalent_radius_pm"], f"species[{i}].covalent_radius_pm")
        )

    loads = []
    for i, ld in enumerate(raw.get("species_loads", [])):
        ld = _strict(ld, {"symbol", "grade"}, f"species_loads[{i}]")
        loads.append((cfg.species(ld["symbol"]), parse_grade(ld["grade"])))
    cfg.species_loads = tuple(loads)
    if "sampling_volume" in raw:
        cfg.sampling_volume = _q(raw["sampling_volume"], "volume", "sampling_volume")

    if "operating_point" in raw:
        op = _strict(raw["operating_point"], {"g_eff", "field", "temperature", "modality"}, "operating_point")
        cfg.operating_point = QubitOperatingPoint(
            _num(op.get("g_eff", 2.0), "operating_point.g_eff"),
            _q(op["field"], "field", "operating_point.field"),
            _q(op["temperature"], "temperature", "operating_point.temperature"),
            op.get("modality", "donor"),
        )
    if "calibration" in raw:
        cfg.calibration = parse_calibration(raw["calibration"])
    if "s_pnc" in raw:
        cfg.s_pnc = _num(raw["s_pnc"], "s_pnc")
        if cfg.s_pnc < 0:
            raise ConfigError("s_pnc must be non-negative")
    if "t_phi" in raw:
        cfg.t_phi = math.inf if raw["t_phi"] == "inf" else _q(raw["t_phi"], "time", "t_phi")
    if "channels" in raw:
        names = {"gamma_surf", "gamma_def", "gamma_mw", "gamma_cav", "gamma_other"}
        ch = _strict(raw["channels"], names, "channels")
        cfg.channels = ParasiticChannels(**{k: _q(v, "rate", f"channels.{k}") for k, v in ch.items()})
    if "cavity" in raw:
        cv = _strict(raw["cavity"], {"frequency", "quality_Q", "coupling_g"}, "cavity")
        cfg.cavity = CavityParams(
            hz_to_rad(_q(cv["frequency"], "frequency", "cavity.frequency")),
            _num(cv["quality_Q"], "cavity.quality_Q"),
            hz_to_rad(_q(cv["coupling_g"], "frequency", "cavity.coupling_g")),
        )

    shape = LineShape(raw.get("line_shape", "lorentzian"))
    if "mode_spectrum" in raw:
        if "reference_density" not in raw:
            raise ConfigError("mode_spectrum needs a reference_density")
        rd = _strict(raw["reference_density"], {"file", "per_hz", "per_rad_s"}, "reference_density")
        if len(rd) != 1:
            raise ConfigError("reference_density: give exactly one of file, per_hz, per_rad_s")
        if "file" in rd:
            ref = load_reference_density(_path(rd["file"], base, "reference_density.file"))
        elif "per_hz" in rd:
            ref = ReferenceDensity.flat(_num(rd["per_hz"], "reference_density.per_hz") / (2 * math.pi))
        else:
            ref = ReferenceDensity.flat(_num(rd["per_rad_s"], "reference_density.per_rad_s"))
        cfg.spectrum = load_mode_spectrum(_path(raw["mode_spectrum"], base, "mode_spectrum"), ref, shape)
    elif "reference_density" in raw:
        raise ConfigError("reference_density given without mode_spectrum")

    if "sweep" in raw:
        sw = _strict(raw["sweep"], {"axes", "crossover"}, "sweep")
        cfg.sweep_axes = tuple(parse_axis(a, f"sweep.axes[{i}]") for i, a in enumerate(sw.get("axes", [])))
        cfg.sweep_crossover = bool(sw.get("crossover", False))
    if "mc" in raw:
        cfg.mc = _strict(raw["mc"], {"cases", "trials", "convergence"}, "mc")
    if "output_dir" in raw:
        od = Path(raw["output_dir"])
        cfg.output_dir = od if od.is_absolute() else base / od
    if "format" in raw:
        if raw["format"] not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        cfg.format = raw["format"]


def parse_calibration(obj: Any) -> CalibrationPoint:
    if isinstance(obj, str):
        if obj not in CALIBRATIONS:
            raise ConfigError(f"unknown calibration preset {obj!r}; known: {sorted(CALIBRATIONS)}")
        return CALIBRATIONS[obj]
    c = _strict(obj, {"t1_ref", "field", "temperature", "field_exponent", "temp_exponent", "source"}, "calibration")
    for k in ("t1_ref", "field", "temperature"):
        if k not in c:
            raise ConfigError(f"calibration: missing {k!r}")
    return CalibrationPoint(
        _q(c["t1_ref"], "time", "calibration.t1_ref"),
        _q(c["field"], "field", "calibration.field"),
        _q(c["temperature"], "temperature", "calibration.temperature"),
        _num(c.get("field_exponent", 4.0), "calibration.field_exponent"),
        _num(c.get("temp_exponent", 1.0), "calibration.temp_exponent"),
        str(c.get("source", "")),
    )
