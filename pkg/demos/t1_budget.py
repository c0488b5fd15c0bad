"""
A T1 budget for a donor spin in patterned Ge
============================================

Start from the calibrated bulk T1, suppress the phonon channel with a
phononic-crystal gap, and watch the parasitic channels take over.
"""

import math

from geqbit import (
    SIGILLITO_DONOR,
    CavityParams,
    ModeSpectrum,
    ParasiticChannels,
    QubitOperatingPoint,
    ReferenceDensity,
    pnc_suppression_factor,
    purcell_rate,
    qubit_frequency,
    reference_t1,
    t2_from,
    total_t1,
)
from geqbit.relaxation_budget import Mode, format_time

op = QubitOperatingPoint(g_eff=2.0, field_B0=0.44, temperature=0.35)
wq = qubit_frequency(op)
t1_ref = reference_t1(op, SIGILLITO_DONOR)
print(f"f_q = {wq / 2 / math.pi:.3e} Hz, bulk T1 = {format_time(t1_ref)}, T2 = {format_time(t2_from(t1_ref))}")

# a single mode 1 GHz above the qubit, against a flat control density
spectrum = ModeSpectrum((Mode(wq + 2 * math.pi * 1e9, 2 * math.pi * 3e5, 1.0),), ReferenceDensity.flat(1e-9))
s = pnc_suppression_factor(spectrum, wq)
print(f"S_PnC = {s:.2e} -> phonon-limited T1 = {format_time(t1_ref / s)}")

# a detuned microwave cavity and a surface channel cap the gain
cav = CavityParams(omega_c=wq - 2 * math.pi * 100e6, quality_Q=1e4, coupling_g=2 * math.pi * 6.3e6)
ch = ParasiticChannels(gamma_surf=0.5, gamma_cav=purcell_rate(cav, wq))
print(f"Purcell rate {ch.gamma_cav:.3g}/s, total T1 = {format_time(total_t1(t1_ref, s, ch))}")
print(f"with S = 0 and no parasitics: {format_time(total_t1(t1_ref, 0.0))}")

# the cavity dominates; pushing it 2 GHz away recovers most of the gain
far = CavityParams(omega_c=wq - 2 * math.pi * 2e9, quality_Q=1e4, coupling_g=2 * math.pi * 6.3e6)
ch = ParasiticChannels(gamma_surf=0.5, gamma_cav=purcell_rate(far, wq))
print(f"2 GHz detuned: Purcell rate {ch.gamma_cav:.3g}/s, total T1 = {format_time(total_t1(t1_ref, s, ch))}")
