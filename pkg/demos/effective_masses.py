"""
Effective masses of Ge
======================

Derived density-of-states and conductivity masses from the band-edge masses.
"""

from geqbit import BandEdgeMasses, derived_masses

# defaults: L-valley electrons (Nv = 4), heavy and light holes at Gamma
m = BandEdgeMasses()
for name, value in derived_masses(m).items():
    print(f"{name:<24}{value:.4f} m0")

# a single valley leaves only the anisotropic-mass geometric mean
print("electron DOS mass, Nv=1:", round(derived_masses(m.with_overrides(valley_degeneracy_Nv=1))["dos_electron"], 4))

# degenerate hole bands: conductivity mass collapses to the shared mass
print("hole conductivity mass, m_lh=m_hh:", derived_masses(m.with_overrides(m_lh=m.m_hh))["conductivity_hole"])
