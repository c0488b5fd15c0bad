"""
Monte Carlo check of the RMS strain formula
===========================================

Poisson impurity counts in a finite volume reproduce the closed-form mean and
RMS strain; quadrupling the volume halves the spread.
"""

from geqbit import GRADES, McConfig, convergence_sweep, load_species, number_density
from geqbit.materials import GeLatticeConstants
from geqbit.strain_montecarlo import check_against_analytic, simulate_volume_strain

lat = GeLatticeConstants()
sp = load_species()
v = 1e-21  # (100 nm)^3

loads = ((sp["B"], number_density(GRADES["5N"], lat)), (sp["Sb"], number_density(GRADES["5N"], lat)))
cfg = McConfig(loads, v, trials=1_000_000, seed=2024)
chk = check_against_analytic(simulate_volume_strain(cfg, lat, workers=4), cfg, lat)
print(f"mean  {chk.result.sample_mean:.4e}  analytic {chk.analytic_mean:.4e}  z={chk.z_mean:+.2f}")
print(f"std   {chk.result.sample_std:.4e}  analytic {chk.analytic_std:.4e}  z={chk.z_std:+.2f}")

# V^-1/2 law
for vol, r in convergence_sweep(McConfig(loads[:1], v, 200_000, 7), [v, 4 * v, 16 * v], lat):
    print(f"V = {vol:.0e} m^3  std = {r.sample_std:.3e} +- {r.standard_error_of_std:.1e}")
