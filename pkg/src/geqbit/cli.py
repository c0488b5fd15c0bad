"""``geqbit`` command line.

Exit codes: 0 success, 1 validation failure (mc-validate only), 2 usage or
configuration error. Files are written atomically into ``--out``; console
output uses three significant figures, files use full precision.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import CALIBRATIONS, ConfigError, RunConfig, config_hash, load_config, parse_axis, parse_grade
from .impurity_strain import GRADES, default_species, number_density, strain_curve, strain_table
from .materials import derived_masses
from .output import csv_text, json_text, provenance_line, write_atomic
from .relaxation_budget import CHANNEL_ORDER, GATED_MESSAGE, format_time, purcell_rate
from .strain_montecarlo import McConfig, check_against_analytic, convergence_sweep, simulate_volume_strain
from .svgplot import loglog_svg
from .sweep import BaseConfig, Parameter, SweepSpec, evaluate_point, find_crossover, run_sweep
from .units import PER_CM3, UnitError, parse_quantity, rad_to_hz

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2
DEFAULT_OUT = "geqbit-out"


class UsageError(Exception):
    pass


def _g3(x: float) -> str:
    return f"{x:.3g}"


class _Run:
    """Shared per-invocation state: parsed config, output dir, provenance."""

    def __init__(self, args: argparse.Namespace, flags: dict):
        self.args = args
        self.cfg: RunConfig = load_config(args.config)
        self.fmt = args.format or self.cfg.format
        out = args.out or self.cfg.output_dir or DEFAULT_OUT
        self.out = Path(out)
        self.seed = getattr(args, "seed", None)
        self.hash = config_hash(self.cfg.raw, flags)

    def emit(self, stem: str, header: Sequence[str], rows: list[list], payload: dict) -> Path:
        if self.fmt == "json":
            doc = {"tool": f"geqbit {__version__}", "config_sha256": self.hash, "seed": self.seed, **payload}
            return write_atomic(self.out / f"{stem}.json", json_text(doc))
        return write_atomic(self.out / f"{stem}.csv", csv_text(header, rows, provenance_line(self.hash, self.seed)))


# -- masses -------------------------------------------------------------------

def cmd_masses(run: _Run) -> int:
    m = run.cfg.masses
    derived = derived_masses(m)
    inputs = {
        "m_l": m.m_l, "m_t": m.m_t, "m_hh": m.m_hh, "m_lh": m.m_lh, "m_so": m.m_so,
        "m_gamma": m.m_gamma, "valley_degeneracy_Nv": m.valley_degeneracy_Nv,
    }
    print("derived effective masses (units of m0)")
    for k, v in derived.items():
        print(f"  {k:<24}{v:.2f}")
    rows = [["input", k, v] for k, v in inputs.items()] + [["derived", k, v] for k, v in derived.items()]
    run.emit("masses", ["kind", "quantity", "value_m0"], rows, {"inputs": inputs, "derived": derived})
    return EXIT_OK


# -- strain table / curve -----------------------------------------------------

def _species_list(run: _Run, symbols: Sequence[str] | None):
    if not symbols:
        return [run.cfg.species(s.symbol) for s in default_species()]
    return [run.cfg.species(s) for s in symbols]


def cmd_strain_table(run: _Run) -> int:
    species = _species_list(run, run.args.species)
    grades = [parse_grade(g) for g in (run.args.grade or list(GRADES))]
    table = strain_table(species, grades, run.cfg.lattice)
    print(table.format())
    header = ["symbol", "dopant_type", "covalent_radius_pm", "eta"] + [f"abs_strain_{g}" for g in table.grades]
    rows = [
        [s.symbol, s.dopant_type.value, s.covalent_radius, s.mismatch_eta, *map(float, row)]
        for s, row in zip(species, table.values)
    ]
    payload = {
        "grades": [
            {"label": g.label, "density_cm-3": number_density(g, run.cfg.lattice) / PER_CM3} for g in grades
        ],
        "rows": [dict(zip(header, r)) for r in rows],
    }
    run.emit("strain_table", header, rows, payload)
    return EXIT_OK


def cmd_strain_curve(run: _Run) -> int:
    a = run.args
    lo = parse_quantity(a.min, "density")
    hi = parse_quantity(a.max, "density")
    species = _species_list(run, a.species)
    curves = strain_curve(species, (lo, hi), a.points_per_decade, run.cfg.lattice)
    n_cgs = curves.densities / PER_CM3
    names = list(curves.curves)
    header = ["n_cm-3"] + [f"abs_strain_{s}" for s in names]
    rows = [[float(n), *(float(curves.curves[s][i]) for s in names)] for i, n in enumerate(n_cgs)]
    payload = {
        "markers_cm-3": {g: d / PER_CM3 for g, d in curves.markers.items()},
        "marker_values": curves.marker_values,
        "n_cm-3": n_cgs,
        "curves": curves.curves,
    }
    run.emit("strain_curve", header, rows, payload)
    mrows = [[g, d / PER_CM3, *(curves.marker_values[s][g] for s in names)] for g, d in curves.markers.items()]
    write_atomic(
        run.out / "strain_curve_markers.csv",
        csv_text(["grade", "n_cm-3"] + [f"abs_strain_{s}" for s in names], mrows, provenance_line(run.hash, run.seed)),
    )
    svg = loglog_svg(
        n_cgs,
        {s: curves.curves[s] for s in names},
        title="Average impurity-induced linear strain in Ge",
        x_label="impurity density (cm^-3)",
        y_label="|average linear strain|",
        vlines={g: d / PER_CM3 for g, d in curves.markers.items() if lo <= d <= hi},
    )
    path = write_atomic(run.out / "strain_curve.svg", svg)
    distinct = len({tuple(v) for v in curves.curves.values()})
    print(f"{len(names)} species, {distinct} distinct curves, {len(n_cgs)} points -> {path}")
    return EXIT_OK


# -- T1 budget ----------------------------------------------------------------

def _apply_budget_flags(run: _Run) -> BaseConfig:
    a, cfg = run.args, run.cfg
    if a.calibration:
        cfg.calibration = CALIBRATIONS[a.calibration]
    base = cfg.base_config()
    op = base.operating_point
    if a.field:
        op = replace(op, field_B0=parse_quantity(a.field, "field"))
    if a.temperature:
        op = replace(op, temperature=parse_quantity(a.temperature, "temperature"))
    if a.g_eff is not None:
        op = replace(op, g_eff=a.g_eff)
    kw = {"operating_point": op}
    if a.s_pnc is not None:
        if a.s_pnc < 0:
            raise UsageError("--s-pnc must be non-negative")
        kw["s_pnc"] = a.s_pnc
    if a.t_phi:
        kw["t_phi"] = math.inf if a.t_phi == "inf" else parse_quantity(a.t_phi, "time")
    return replace(base, **kw)


def cmd_t1_budget(run: _Run) -> int:
    base = _apply_budget_flags(run)
    cell = evaluate_point(base)
    total_rate = math.fsum(cell.rates.values())
    print(f"qubit frequency      {_g3(rad_to_hz(cell.omega_q))} Hz  ({_g3(cell.omega_q)} rad/s)")
    print(f"reference T1 (bulk)  {format_time(cell.t1_ref_phonon)}")
    print(f"S_PnC                {_g3(cell.s_pnc_used)}")
    for name in CHANNEL_ORDER:
        r = cell.rates[name]
        share = f"{100 * r / total_rate:5.1f}%" if total_rate > 0 else "   - "
        print(f"  rate[{name:<6}]      {_g3(r):>10} 1/s  {share}")
    print(f"dominant channel     {cell.dominant_channel}")
    print(f"T1                   {format_time(cell.t1_total)}")
    print(f"T2                   {format_time(cell.t2)}")
    purcell = purcell_rate(base.cavity, cell.omega_q) if base.cavity is not None else None
    if purcell is not None:
        print(f"Purcell rate         {_g3(purcell)} 1/s")
    summary = {
        "g_eff": base.operating_point.g_eff,
        "field_T": base.operating_point.field_B0,
        "temperature_K": base.operating_point.temperature,
        "modality": base.operating_point.modality.value,
        "qubit_frequency_hz": rad_to_hz(cell.omega_q),
        "t1_ref_phonon_s": cell.t1_ref_phonon,
        "s_pnc": cell.s_pnc_used,
        **{f"rate_{k}_s-1": v for k, v in cell.rates.items()},
        "purcell_rate_s-1": purcell,
        "dominant_channel": cell.dominant_channel,
        "t1_total_s": cell.t1_total,
        "t2_s": cell.t2,
        "t_phi_s": base.t_phi,
        "status": GATED_MESSAGE if math.isinf(cell.t1_total) else "finite",
    }
    run.emit("t1_budget", ["quantity", "value"], [[k, v] for k, v in summary.items()], {"budget": summary})
    return EXIT_OK


# -- sweep ----------------------------------------------------------------------

_AXIS_COLUMN = {
    Parameter.B0: ("B0_T", 1.0),
    Parameter.T: ("T_K", 1.0),
    Parameter.S_PNC: ("S_pnc", 1.0),
    Parameter.DELTA_CAV: ("delta_cav_hz", 1 / (2 * math.pi)),
    Parameter.Q: ("Q", 1.0),
    Parameter.G_COUPLING: ("g_coupling_hz", 1 / (2 * math.pi)),
    Parameter.IMPURITY_DENSITY: ("impurity_density_cm-3", 1 / PER_CM3),
}


def _parse_axis_flag(text: str):
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise UsageError(f"--axis {text!r}: expected PARAM:MIN:MAX:POINTS[:SCALE]")
    param, lo, hi, pts = parts[:4]

    def val(s: str):
        try:
            return float(s)
        except ValueError:
            return s

    try:
        points = int(pts)
    except ValueError:
        raise UsageError(f"--axis {text!r}: POINTS must be an integer") from None
    obj = {"parameter": param, "min": val(lo), "max": val(hi), "points": points}
    if len(parts) == 5:
        obj["scale"] = parts[4]
    return parse_axis(obj, f"--axis {text}")


def cmd_sweep(run: _Run) -> int:
    a = run.args
    run.cfg.calibration = CALIBRATIONS[a.calibration] if a.calibration else run.cfg.calibration
    axes = tuple(_parse_axis_flag(t) for t in a.axis) if a.axis else run.cfg.sweep_axes
    if not axes:
        raise UsageError("sweep needs at least one axis (--axis or sweep.axes in the config)")
    spec = SweepSpec(axes, run.cfg.base_config())
    result = run_sweep(spec, workers=a.workers)
    cols = [_AXIS_COLUMN[ax.parameter] for ax in axes]
    header = [c for c, _ in cols] + [
        "t1_total_s", "t2_s", "dominant_channel", "s_pnc_used",
        *(f"rate_{k}_s-1" for k in CHANNEL_ORDER), "total_avg_strain", "rms_strain", "error",
    ]
    rows = []
    for cell in result.grid:
        coord = [cell.coords[ax.parameter.value] * scale for ax, (_, scale) in zip(axes, cols)]
        rates = [cell.rates.get(k) for k in CHANNEL_ORDER]
        rows.append(
            [*coord, cell.t1_total, cell.t2, cell.dominant_channel, cell.s_pnc_used, *rates,
             cell.total_avg_strain, cell.rms_strain, cell.error or ""]
        )
    run.emit("sweep", header, rows, {"columns": header, "rows": rows})
    ok = [c for c in result.grid if not c.failed]
    print(f"{len(result.grid)} cells, {len(result.failed)} failed")
    if ok:
        t1 = np.array([c.t1_total for c in ok])
        print(f"T1 range {format_time(float(t1.min()))} .. {format_time(float(t1.max()))}")
    for c in result.failed[:10]:
        print(f"  failed at {c.coords}: {c.error}")
    if a.crossover or run.cfg.sweep_crossover:
        cross = find_crossover(spec)
        print(f"crossover S* = {_g3(cross.s_star)} (closed form), {_g3(cross.s_star_bisection)} (bisection)")
        write_atomic(
            run.out / f"crossover.{run.fmt}",
            json_text({"s_star": cross.s_star, "s_star_bisection": cross.s_star_bisection,
                       "t1_ref_phonon_s": cross.t1_ref_phonon, "gamma_parasitic_s-1": cross.gamma_parasitic})
            if run.fmt == "json"
            else csv_text(["s_star", "s_star_bisection", "t1_ref_phonon_s", "gamma_parasitic_s-1"],
                          [[cross.s_star, cross.s_star_bisection, cross.t1_ref_phonon, cross.gamma_parasitic]],
                          provenance_line(run.hash, run.seed)),
        )
    return EXIT_OK


# -- Monte Carlo validation -----------------------------------------------------

DEFAULT_VOLUME = "1e-21m3"  # (100 nm)^3
DEFAULT_MC_CASES = [
    [("B", "13N")], [("Sb", "13N")], [("B", "5N")], [("Sb", "5N")], [("B", "5N"), ("Sb", "5N")],
]


def _case_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence([seed, i]).generate_state(1, np.uint64)[0])


def _mc_cases(run: _Run, volume: float):
    spec = run.cfg.mc
    cases = []
    raw_cases = spec.get("cases")
    if raw_cases is None:
        for loads in DEFAULT_MC_CASES:
            cases.append((loads, volume))
    else:
        for i, c in enumerate(raw_cases):
            if not isinstance(c, dict) or set(c) - {"loads", "volume"} or "loads" not in c:
                raise ConfigError(f"mc.cases[{i}]: expected {{'loads': [...], 'volume': ...}}")
            loads = [(ld["symbol"], ld["grade"]) for ld in c["loads"]]
            v = parse_quantity(c["volume"], "volume") if "volume" in c else volume
            cases.append((loads, v))
    conv = spec.get("convergence", {"loads": [{"symbol": "B", "grade": "5N"}], "volumes": [volume, 4 * volume]})
    conv_loads = [(ld["symbol"], ld["grade"]) for ld in conv["loads"]]
    conv_vols = [v if isinstance(v, float) else parse_quantity(v, "volume") for v in conv["volumes"]]
    return cases, (conv_loads, conv_vols)


def _resolve(run: _Run, loads):
    return tuple((run.cfg.species(sym), number_density(parse_grade(g), run.cfg.lattice)) for sym, g in loads)


def cmd_mc_validate(run: _Run) -> int:
    a = run.args
    trials = a.trials if a.trials is not None else int(run.cfg.mc.get("trials", 1_000_000))
    if trials < 1:
        raise UsageError("--trials must be a positive integer")
    seed = a.seed if a.seed is not None else 0
    run.seed = seed
    volume = parse_quantity(a.volume, "volume")
    cases, (conv_loads, conv_vols) = _mc_cases(run, volume)

    header = ["species_set", "volume_m3", "analytic_mean", "analytic_std", "sampled_mean", "sampled_std",
              "se_mean", "se_std", "z_mean", "z_std"]
    rows, worst = [], 0.0
    for i, (loads, v) in enumerate(cases):
        cfg = McConfig(_resolve(run, loads), v, trials, _case_seed(seed, i))
        chk = check_against_analytic(simulate_volume_strain(cfg, run.cfg.lattice, a.workers), cfg, run.cfg.lattice)
        label = "+".join(f"{s}@{g}" for s, g in loads)
        r = chk.result
        rows.append([label, v, chk.analytic_mean, chk.analytic_std, r.sample_mean, r.sample_std,
                     r.standard_error_of_mean, r.standard_error_of_std, chk.z_mean, chk.z_std])
        worst = max(worst, abs(chk.z_mean), abs(chk.z_std))
        print(f"{label:<14} V={v:.3g} m^3  std {r.sample_std:.3g} vs {chk.analytic_std:.3g}  "
              f"z_mean={chk.z_mean:+.2f} z_std={chk.z_std:+.2f}")

    cfg = McConfig(_resolve(run, conv_loads), conv_vols[0], trials, _case_seed(seed, len(cases)))
    sweep = convergence_sweep(cfg, conv_vols, run.cfg.lattice, a.workers)
    crow = []
    s0, se0 = sweep[0][1].sample_std, sweep[0][1].standard_error_of_std
    for v, r in sweep:
        expected = math.sqrt(v / conv_vols[0])
        ratio = s0 / r.sample_std if r.sample_std > 0 else math.inf
        se = ratio * math.hypot(se0 / s0, r.standard_error_of_std / r.sample_std) if r.sample_std > 0 else math.inf
        z = 0.0 if v == conv_vols[0] else (ratio - expected) / se
        worst = max(worst, abs(z))
        crow.append([v, r.sample_std, r.standard_error_of_std, ratio, expected, z])
        print(f"convergence V={v:.3g} m^3  std ratio {ratio:.4f} (expect {expected:.4f})  z={z:+.2f}")

    run.emit("mc_validate", header, rows, {"cases": [dict(zip(header, r)) for r in rows]})
    conv_header = ["volume_m3", "sampled_std", "se_std", "std_ratio_to_first", "expected_ratio", "z_ratio"]
    if run.fmt == "json":
        write_atomic(run.out / "mc_convergence.json", json_text({"rows": [dict(zip(conv_header, r)) for r in crow]}))
    else:
        write_atomic(run.out / "mc_convergence.csv", csv_text(conv_header, crow, provenance_line(run.hash, seed)))
    if worst >= 3.0:
        print(f"VALIDATION FAILED: max |z| = {worst:.2f} >= 3")
        return EXIT_VALIDATION
    print(f"all z-scores below 3 (max |z| = {worst:.2f})")
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help=f"output directory (default: {DEFAULT_OUT})")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=_u64)

    p = argparse.ArgumentParser(prog="geqbit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"geqbit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("masses", parents=[common], help="derived DOS and conductivity masses")

    st = sub.add_parser("strain-table", parents=[common], help="|average strain| per species and purity grade")
    st.add_argument("--species", nargs="+", metavar="SYMBOL")
    st.add_argument("--grade", nargs="+", metavar="GRADE", help="5N, 9N, 13N, c=<fraction> or n=<density>cm-3")

    sc = sub.add_parser("strain-curve", parents=[common], help="strain vs impurity density, CSV + SVG")
    sc.add_argument("--species", nargs="+", metavar="SYMBOL")
    sc.add_argument("--min", default="1e9cm-3")
    sc.add_argument("--max", default="1e18cm-3")
    sc.add_argument("--points-per-decade", type=int, default=10)

    def budget_flags(sp):
        sp.add_argument("--calibration", choices=sorted(CALIBRATIONS))
        sp.add_argument("--field", help="e.g. 0.44T")
        sp.add_argument("--temperature", help="e.g. 0.35K")
        sp.add_argument("--g-eff", type=float)
        sp.add_argument("--s-pnc", type=float)
        sp.add_argument("--t-phi", help="pure dephasing time, e.g. 1ms, or inf")

    tb = sub.add_parser("t1-budget", parents=[common], help="T1/T2 budget with channel breakdown")
    budget_flags(tb)

    sw = sub.add_parser("sweep", parents=[common], help="grid sweep of the T1 budget")
    sw.add_argument("--calibration", choices=sorted(CALIBRATIONS))
    sw.add_argument("--axis", action="append", metavar="PARAM:MIN:MAX:POINTS[:SCALE]")
    sw.add_argument("--crossover", action="store_true", help="report S* where phonon and parasitic rates match")
    sw.add_argument("--workers", type=int, default=1)

    mc = sub.add_parser("mc-validate", parents=[common], help="Monte Carlo check of mean and RMS strain")
    mc.add_argument("--trials", type=int)
    mc.add_argument("--volume", default=DEFAULT_VOLUME)
    mc.add_argument("--workers", type=int, default=1)
    return p


COMMANDS = {
    "masses": cmd_masses,
    "strain-table": cmd_strain_table,
    "strain-curve": cmd_strain_curve,
    "t1-budget": cmd_t1_budget,
    "sweep": cmd_sweep,
    "mc-validate": cmd_mc_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "out", "format", "workers")}
    try:
        run = _Run(args, flags)
        return COMMANDS[args.command](run)
    except (ConfigError, UnitError, UsageError, ValueError, OverflowError) as exc:
        print(f"geqbit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
