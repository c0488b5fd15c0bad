"""
Impurity strain at three purity grades
======================================

Average and RMS strain from substitutional dopants, plus the strain-vs-density
curves written as an SVG.
"""

import sys
from pathlib import Path

from geqbit import GRADES, load_species, rms_strain, strain_curve, strain_table
from geqbit.svgplot import loglog_svg
from geqbit.units import PER_CM3

# |average strain| per species and grade (13N is a density, not a fraction)
table = strain_table()
print(table.format())

# RMS fluctuation over a (100 nm)^3 volume falls as V^-1/2
species = load_species()
v = (100e-9) ** 3
for grade in ("13N", "5N"):
    print(f"B @ {grade}: rms strain over (100 nm)^3 = {rms_strain([(species['B'], GRADES[grade])], v):.2e}")

# straight lines of slope 1; Al and As share |eta| and overlap
curves = strain_curve(list(species.values()), (1e15, 1e24), 10)
n = curves.densities / PER_CM3
svg = loglog_svg(n, curves.curves, x_label="impurity density (cm^-3)", y_label="|average strain|",
                 vlines={g: d / PER_CM3 for g, d in curves.markers.items()})
out = Path(sys.argv[1] if len(sys.argv) > 1 else "strain_curve_demo.svg")
out.write_text(svg)
print("wrote", out)
