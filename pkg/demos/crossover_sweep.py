"""
Where does suppression stop paying off?
=======================================

Sweep S_PnC with a fixed parasitic floor, locate the crossover, and size the
cavity detuning that keeps the Purcell rate under budget.
"""

import math

from geqbit import Axis, BaseConfig, CavityParams, ParasiticChannels, SweepSpec, find_crossover, run_sweep
from geqbit import purcell_safe_detuning
from geqbit.relaxation_budget import format_time

base = BaseConfig(channels=ParasiticChannels(gamma_surf=10.0, gamma_other=6.67))
spec = SweepSpec((Axis("S_pnc", 1e-4, 1.0, 9, "log"),), base)
for cell in run_sweep(spec).grid:
    print(f"S = {cell.coords['S_pnc']:.0e}  T1 = {format_time(cell.t1_total):>9}  dominated by {cell.dominant_channel}")

x = find_crossover(spec)
print(f"S* = {x.s_star:.4g} (bisection {x.s_star_bisection:.4g})")

# detuning that keeps the cavity channel at 1% of the remaining budget
cav = CavityParams(2 * math.pi * 3e9, 1e4, 2 * math.pi * 6.3e6)
d = purcell_safe_detuning(cav, 0.01 * x.gamma_parasitic)
print(f"keep |f_q - f_c| >= {d / 2 / math.pi / 1e6:.1f} MHz")
