import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geqbit.impurity_strain import GRADES, load_species, rms_strain, total_avg_strain
from geqbit.relaxation_budget import (
    SIGILLITO_DONOR,
    CavityParams,
    Mode,
    ModeSpectrum,
    ParasiticChannels,
    QubitOperatingPoint,
    ReferenceDensity,
    channel_rates,
    pnc_suppression_factor,
    purcell_rate,
    purcell_rate_detuned,
    qubit_frequency,
    reference_t1,
    t2_from,
    total_t1,
)
from geqbit.sweep import (
    Axis,
    BaseConfig,
    Parameter,
    SweepSpec,
    evaluate_point,
    find_crossover,
    purcell_safe_detuning,
    run_sweep,
)

TWO_PI = 2 * math.pi
S_AXIS = Axis(Parameter.S_PNC, 1e-4, 1.0, 41, "log")


def cavity():
    return CavityParams(TWO_PI * 3e9, 1e4, TWO_PI * 6.3e6)


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis(Parameter.B0, 0.5, 0.5, 10)
    with pytest.raises(ValueError):
        Axis(Parameter.B0, 0.5, 1.0, 1)
    with pytest.raises(ValueError):
        Axis(Parameter.B0, 0.0, 1.0, 5, "log")
    with pytest.raises(ValueError):
        Axis(Parameter.B0, 0.1, 1.0, 5, "cubic")
    with pytest.raises(ValueError):
        Axis("bogus", 0.1, 1.0, 5)
    v = Axis(Parameter.T, 0.01, 10.0, 7, "log").values()
    assert v[0] == 0.01 and v[-1] == 10.0
    assert np.allclose(np.diff(np.log10(v)), 0.5)


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(())
    with pytest.raises(ValueError):
        SweepSpec((S_AXIS,) * 2)
    axes = [Axis(p, 0.1, 1.0, 2) for p in (Parameter.B0, Parameter.T, Parameter.S_PNC, Parameter.Q)]
    with pytest.raises(ValueError):
        SweepSpec(tuple(axes), BaseConfig(cavity=cavity()))
    with pytest.raises(ValueError):
        SweepSpec((Axis(Parameter.Q, 1e3, 1e5, 3),))
    with pytest.raises(ValueError):
        SweepSpec((Axis(Parameter.IMPURITY_DENSITY, 1e16, 1e20, 3, "log"),))


def test_s_axis_monotone_and_saturating():
    spec = SweepSpec((S_AXIS,), BaseConfig(channels=ParasiticChannels(gamma_other=1.0)))
    res = run_sweep(spec)
    t1 = res.column("t1_total")
    assert len(res.grid) == 41
    assert np.all(np.diff(t1) <= 0)
    assert np.all(t1 < 1.0)
    assert t1[0] == pytest.approx(1.0 / (1e-4 / 0.6e-3 + 1.0), rel=1e-12)
    assert t1[-1] == pytest.approx(1.0 / (1 / 0.6e-3 + 1.0), rel=1e-12)
    assert res.grid[0].dominant_channel == "other"
    assert res.grid[-1].dominant_channel == "phonon"


def test_b_t_homogeneity():
    spec = SweepSpec((Axis(Parameter.B0, 0.1, 2.0, 10, "log"), Axis(Parameter.T, 0.02, 4.0, 10, "log")))
    res = run_sweep(spec)
    assert len(res.grid) == 100
    inv = np.array([c.t1_total * c.coords["B0"] ** 4 * c.coords["T"] for c in res.grid])
    assert np.max(np.abs(inv / inv[0] - 1)) < 1e-9
    assert inv[0] == pytest.approx(0.6e-3 * 0.44**4 * 0.35, rel=1e-9)
    # row-major: first axis slowest
    assert [c.coords["B0"] for c in res.grid[:10]] == [0.1] * 10
    assert res.grid[1].coords["T"] > res.grid[0].coords["T"]


@given(
    st.floats(0.1, 3.0), st.floats(0.05, 4.0), st.floats(1e-4, 1.0),
    st.floats(-TWO_PI * 1e9, TWO_PI * 1e9), st.floats(1e2, 1e6), st.floats(0.0, 50.0),
)
def test_pointwise_equivalence(b, t, s, delta, q, g_other):
    channels = ParasiticChannels(gamma_surf=2.0, gamma_other=g_other)
    base = BaseConfig(channels=channels, cavity=cavity())
    cell = evaluate_point(base, {Parameter.B0: b, Parameter.T: t, Parameter.S_PNC: s,
                                 Parameter.DELTA_CAV: delta})
    op = QubitOperatingPoint(2.0, b, t)
    gamma_p = purcell_rate_detuned(cavity(), delta)
    direct = total_t1(reference_t1(op, SIGILLITO_DONOR), s,
                      ParasiticChannels(gamma_surf=2.0, gamma_other=g_other, gamma_cav=gamma_p))
    assert cell.t1_total == pytest.approx(direct, rel=1e-12)
    assert cell.t2 == pytest.approx(t2_from(direct), rel=1e-12)
    q_cell = evaluate_point(BaseConfig(cavity=cavity()), {Parameter.Q: q})
    cq = CavityParams(TWO_PI * 3e9, q, TWO_PI * 6.3e6)
    rates = channel_rates(0.6e-3, 1.0, ParasiticChannels(gamma_cav=purcell_rate(cq, q_cell.omega_q)))
    assert q_cell.rates == pytest.approx(rates, rel=1e-12)


def test_spectrum_drives_s_and_out_of_domain_cells_fail():
    wq = qubit_frequency(QubitOperatingPoint(2.0, 0.44, 0.35))
    ref = ReferenceDensity(omega=(0.5 * wq, 1.5 * wq), density=(1e-9, 1e-9))
    spec_modes = ModeSpectrum((Mode(1.1 * wq, 1e-3 * wq, 1.0),), ref)
    base = BaseConfig(spectrum=spec_modes)
    cell = evaluate_point(base)
    assert cell.s_pnc_used == pytest.approx(pnc_suppression_factor(spec_modes, wq), rel=1e-15)
    assert evaluate_point(BaseConfig(spectrum=spec_modes, s_pnc=0.5)).s_pnc_used == 0.5
    assert evaluate_point(BaseConfig()).s_pnc_used == 1.0
    res = run_sweep(SweepSpec((Axis(Parameter.B0, 0.1, 1.0, 10),), base))
    assert len(res.grid) == 10
    bad = res.failed
    assert bad and len(bad) < 10
    assert all("B0" in c.coords and "outside" in c.error for c in bad)


def test_impurity_axis_reports_strain():
    sp = load_species()
    loads = ((sp["B"], GRADES["5N"]), (sp["Sb"], GRADES["5N"]))
    base = BaseConfig(species_loads=loads, sampling_volume=1e-21)
    res = run_sweep(SweepSpec((Axis(Parameter.IMPURITY_DENSITY, 1e16, 1e22, 4, "log"),), base))
    for c in res.grid:
        n = c.coords["impurity_density"]
        assert c.total_avg_strain == pytest.approx(total_avg_strain(((sp["B"], n), (sp["Sb"], n))), rel=1e-14)
        assert c.rms_strain == pytest.approx(rms_strain(((sp["B"], n), (sp["Sb"], n)), 1e-21), rel=1e-14)


def test_threaded_matches_sequential():
    spec = SweepSpec((Axis(Parameter.B0, 0.1, 2.0, 8), S_AXIS), BaseConfig(channels=ParasiticChannels(gamma_mw=3.0)))
    assert run_sweep(spec) == run_sweep(spec, workers=4)


def test_crossover_examples():
    base = BaseConfig(channels=ParasiticChannels(gamma_other=1e-2 / 0.6e-3))
    x = find_crossover(SweepSpec((S_AXIS,), base))
    assert x.s_star == pytest.approx(1e-2, rel=1e-12)
    assert x.s_star_bisection == pytest.approx(1e-2, rel=1e-6)
    cell = evaluate_point(base, {Parameter.S_PNC: x.s_star})
    assert cell.rates["phonon"] == pytest.approx(cell.rates["other"], rel=1e-6)

    unity = find_crossover(SweepSpec((S_AXIS,), BaseConfig(channels=ParasiticChannels(gamma_def=1 / 0.6e-3))))
    assert unity.s_star == pytest.approx(1.0, rel=1e-12)

    with pytest.raises(ValueError, match="no crossover"):
        find_crossover(SweepSpec((S_AXIS,)))
    with pytest.raises(ValueError, match="outside"):
        find_crossover(SweepSpec((S_AXIS,), BaseConfig(channels=ParasiticChannels(gamma_other=1e5))))
    with pytest.raises(ValueError):
        find_crossover(SweepSpec((Axis(Parameter.B0, 0.1, 1.0, 3),)))


@given(st.floats(1e-3, 1e3))
def test_crossover_closed_form(gamma):
    base = BaseConfig(channels=ParasiticChannels(gamma_surf=gamma))
    x = find_crossover(SweepSpec((Axis(Parameter.S_PNC, 1e-8, 10.0, 30, "log"),), base))
    assert x.s_star == pytest.approx(0.6e-3 * gamma, rel=1e-12)
    assert abs(x.s_star_bisection / x.s_star - 1) <= 1e-6


def test_safe_detuning_examples():
    cav = cavity()
    on_res = 4 * cav.coupling_g**2 / cav.kappa
    assert purcell_safe_detuning(cav, on_res) == 0.0
    assert purcell_safe_detuning(cav, 1e300) == 0.0
    d = purcell_safe_detuning(cav, TWO_PI * 1.19e3)
    assert d / TWO_PI == pytest.approx(100e6, rel=1e-3)
    with pytest.raises(ValueError):
        purcell_safe_detuning(cav, 0.0)


@given(st.floats(1e-3, 0.999), st.floats(1e2, 1e7), st.floats(1e5, 1e8))
def test_safe_detuning_round_trip(frac, q, g_hz):
    cav = CavityParams(TWO_PI * 5e9, q, TWO_PI * g_hz)
    budget = frac * 4 * cav.coupling_g**2 / cav.kappa
    d = purcell_safe_detuning(cav, budget)
    assert purcell_rate_detuned(cav, d) == pytest.approx(budget, rel=1e-9)
    assert purcell_rate_detuned(cav, -d) == pytest.approx(budget, rel=1e-9)
    # through absolute frequencies the rounding of omega_c + d is the only extra error
    wq = cav.omega_c + d
    assert purcell_rate(cav, wq) == pytest.approx(purcell_rate_detuned(cav, wq - cav.omega_c), rel=1e-15)
