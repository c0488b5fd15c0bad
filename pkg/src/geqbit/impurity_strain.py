"""Background strain from dilute substitutional impurities in Ge.

Each species contributes an average linear strain eta * n / N0, where eta is
its covalent-radius mismatch against Ge (the relaxation volume is taken as
3 eta per atom, and one third of the volumetric strain is linear). Random
placement gives a volume-averaged fluctuation

    eps_rms(V) = sqrt( sum_i eta_i**2 n_i / (N0**2 V) ).
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .materials import GeLatticeConstants
from .units import PER_CM3

__all__ = [
    "R_GE_PM",
    "DopantType",
    "ImpuritySpecies",
    "GradeMode",
    "PurityGrade",
    "GRADES",
    "StrainReport",
    "StrainTable",
    "StrainCurves",
    "load_species",
    "default_species",
    "number_density",
    "avg_linear_strain",
    "total_avg_strain",
    "strain_report",
    "rms_strain",
    "strain_table",
    "strain_curve",
]

# Ge covalent radius. Every tabulated mismatch (e.g. B: (84-120)/120 = -0.300)
# is reproduced by this value.
R_GE_PM = 120.0


class DopantType(str, enum.Enum):
    DONOR = "donor"
    ACCEPTOR = "acceptor"


@dataclass(frozen=True)
class ImpuritySpecies:
    symbol: str
    dopant_type: DopantType
    covalent_radius: float  # pm
    mismatch_eta: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.covalent_radius > 0:
            raise ValueError(f"{self.symbol}: covalent radius must be positive")
        object.__setattr__(self, "dopant_type", DopantType(self.dopant_type))
        object.__setattr__(self, "mismatch_eta", (self.covalent_radius - R_GE_PM) / R_GE_PM)


def load_species(path: str | Path | None = None) -> dict[str, ImpuritySpecies]:
    """Read a species CSV (symbol, dopant_type, covalent_radius_pm).

    With no path, the six bundled species (B, Al, Ga, P, As, Sb) are returned.
    """
    if path is None:
        text = resources.files("geqbit").joinpath("data/species.csv").read_text()
    else:
        text = Path(path).read_text()
    out: dict[str, ImpuritySpecies] = {}
    reader = csv.DictReader(io.StringIO(text))
    expected = {"symbol", "dopant_type", "covalent_radius_pm"}
    if reader.fieldnames is None or set(reader.fieldnames) != expected:
        raise ValueError(f"species file must have columns {sorted(expected)}, got {reader.fieldnames}")
    for row in reader:
        sym = row["symbol"].strip()
        out[sym] = ImpuritySpecies(sym, DopantType(row["dopant_type"].strip()), float(row["covalent_radius_pm"]))
    return out


def default_species() -> list[ImpuritySpecies]:
    return list(load_species().values())


class GradeMode(str, enum.Enum):
    ATOMIC_FRACTION = "atomic_fraction"
    NUMBER_DENSITY = "number_density"


@dataclass(frozen=True)
class PurityGrade:
    """Impurity level, either as an atomic fraction or a direct density (m^-3).

    The ``13N`` label means a net active density of 1e10 cm^-3 (detector-grade
    HPGe usage), not an atomic fraction of 1e-13.
    """

    mode: GradeMode
    value: float
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", GradeMode(self.mode))
        if not self.value > 0:
            raise ValueError(f"purity grade value must be positive, got {self.value}")
        if self.mode is GradeMode.ATOMIC_FRACTION and not self.value < 1:
            raise ValueError(f"atomic fraction must be < 1, got {self.value}")
        if not self.label:
            object.__setattr__(self, "label", self._auto_label())

    def _auto_label(self) -> str:
        if self.mode is GradeMode.ATOMIC_FRACTION:
            return f"c={self.value:g}"
        return f"n={self.value / PER_CM3:g}cm-3"

    @classmethod
    def fraction(cls, c: float, label: str = "") -> "PurityGrade":
        return cls(GradeMode.ATOMIC_FRACTION, c, label)

    @classmethod
    def density(cls, n: float, label: str = "") -> "PurityGrade":
        return cls(GradeMode.NUMBER_DENSITY, n, label)

    @classmethod
    def named(cls, label: str) -> "PurityGrade":
        try:
            return GRADES[label.upper()]
        except KeyError:
            raise ValueError(f"unknown purity grade {label!r}; known: {sorted(GRADES)}") from None


GRADES: dict[str, PurityGrade] = {
    "5N": PurityGrade(GradeMode.ATOMIC_FRACTION, 1e-5, "5N"),
    "9N": PurityGrade(GradeMode.ATOMIC_FRACTION, 1e-9, "9N"),
    "13N": PurityGrade(GradeMode.NUMBER_DENSITY, 1e10 * PER_CM3, "13N"),
}


def number_density(grade: PurityGrade, lattice: GeLatticeConstants | None = None) -> float:
    """Impurity number density in m^-3."""
    lattice = lattice or GeLatticeConstants()
    if grade.mode is GradeMode.ATOMIC_FRACTION:
        return grade.value * lattice.atomic_density_N0
    if not grade.value < lattice.atomic_density_N0:
        raise ValueError(
            f"impurity density {grade.value:g} m^-3 is not below the host atomic density "
            f"{lattice.atomic_density_N0:g} m^-3"
        )
    return grade.value


def _density_of(load, lattice: GeLatticeConstants) -> float:
    # loads carry either a PurityGrade or a bare density in m^-3
    amount = load
    if isinstance(amount, PurityGrade):
        return number_density(amount, lattice)
    n = float(amount)
    if not 0 < n < lattice.atomic_density_N0:
        raise ValueError(f"impurity density must lie in (0, N0), got {n:g} m^-3")
    return n


def avg_linear_strain(
    species: ImpuritySpecies, grade: PurityGrade | float, lattice: GeLatticeConstants | None = None
) -> float:
    """Signed average linear strain eta * n / N0 of one species.

    ``grade`` may also be a bare number density in m^-3.
    """
    lattice = lattice or GeLatticeConstants()
    return species.mismatch_eta * _density_of(grade, lattice) / lattice.atomic_density_N0


def _check_loads(species_loads) -> list:
    loads = list(species_loads)
    if not loads:
        raise ValueError("at least one (species, grade) load is required")
    return loads


def total_avg_strain(
    species_loads: Iterable[tuple[ImpuritySpecies, PurityGrade | float]],
    lattice: GeLatticeConstants | None = None,
) -> float:
    """Signed sum of per-species average strains (opposite mismatches cancel)."""
    lattice = lattice or GeLatticeConstants()
    return math.fsum(avg_linear_strain(s, g, lattice) for s, g in _check_loads(species_loads))


def rms_strain(
    species_loads: Iterable[tuple[ImpuritySpecies, PurityGrade | float]],
    volume: float,
    lattice: GeLatticeConstants | None = None,
) -> float:
    """RMS fluctuation of the strain averaged over a volume (m^3) with random placement."""
    if not volume > 0:
        raise ValueError(f"sampling volume must be positive, got {volume}")
    lattice = lattice or GeLatticeConstants()
    N0 = lattice.atomic_density_N0
    var = math.fsum(s.mismatch_eta**2 * _density_of(g, lattice) for s, g in _check_loads(species_loads))
    return math.sqrt(var / (N0**2 * volume))


@dataclass(frozen=True)
class StrainReport:
    """Per-species and combined strain for a set of impurity loads.

    ``total_signed`` is the literal sum of signed strains; ``total_magnitude``
    sums absolute values and is the worst-case bound.
    """

    per_species: tuple[tuple[str, float], ...]
    total_signed: float
    total_magnitude: float
    rms_strain: float | None = None
    sampling_volume: float | None = None


def strain_report(
    species_loads: Iterable[tuple[ImpuritySpecies, PurityGrade | float]],
    lattice: GeLatticeConstants | None = None,
    volume: float | None = None,
) -> StrainReport:
    lattice = lattice or GeLatticeConstants()
    loads = _check_loads(species_loads)
    per = tuple((s.symbol, avg_linear_strain(s, g, lattice)) for s, g in loads)
    rms = rms_strain(loads, volume, lattice) if volume is not None else None
    return StrainReport(
        per_species=per,
        total_signed=math.fsum(v for _, v in per),
        total_magnitude=math.fsum(abs(v) for _, v in per),
        rms_strain=rms,
        sampling_volume=volume,
    )


@dataclass(frozen=True)
class StrainTable:
    """|strain| for every species x grade pair; rows follow ``species``."""

    species: tuple[str, ...]
    grades: tuple[str, ...]
    eta: tuple[float, ...]
    values: np.ndarray  # shape (n_species, n_grades)

    def value(self, symbol: str, grade: str) -> float:
        return float(self.values[self.species.index(symbol), self.grades.index(grade)])

    def rows(self) -> list[dict]:
        return [
            {"symbol": s, "eta": e, **{g: float(v) for g, v in zip(self.grades, row)}}
            for s, e, row in zip(self.species, self.eta, self.values)
        ]

    def format(self) -> str:
        """Two-significant-figure text table in the style of a printed summary."""
        head = f"{'species':<8}{'eta':>11}" + "".join(f"{g:>12}" for g in self.grades)
        lines = [head]
        for s, e, row in zip(self.species, self.eta, self.values):
            lines.append(f"{s:<8}{e:>+11.3g}" + "".join(f"{v:>12.1e}" for v in row))
        return "\n".join(lines)


def strain_table(
    species_list: Sequence[ImpuritySpecies] | None = None,
    grades_list: Sequence[PurityGrade] | None = None,
    lattice: GeLatticeConstants | None = None,
) -> StrainTable:
    species_list = list(species_list) if species_list is not None else default_species()
    grades_list = list(grades_list) if grades_list is not None else list(GRADES.values())
    if not species_list or not grades_list:
        raise ValueError("species and grade lists must be nonempty")
    lattice = lattice or GeLatticeConstants()
    vals = np.array([[abs(avg_linear_strain(s, g, lattice)) for g in grades_list] for s in species_list])
    return StrainTable(
        species=tuple(s.symbol for s in species_list),
        grades=tuple(g.label for g in grades_list),
        eta=tuple(s.mismatch_eta for s in species_list),
        values=vals,
    )


@dataclass(frozen=True)
class StrainCurves:
    densities: np.ndarray  # m^-3
    curves: dict[str, np.ndarray]  # symbol -> |strain|
    markers: dict[str, float]  # grade label -> density (m^-3)
    marker_values: dict[str, dict[str, float]]  # symbol -> grade label -> |strain|


def grade_markers(lattice: GeLatticeConstants | None = None) -> dict[str, float]:
    lattice = lattice or GeLatticeConstants()
    return {label: number_density(GRADES[label], lattice) for label in ("13N", "9N", "5N")}


def strain_curve(
    species_list: Sequence[ImpuritySpecies] | None = None,
    density_range: tuple[float, float] = (1e9 * PER_CM3, 1e18 * PER_CM3),
    points_per_decade: int = 10,
    lattice: GeLatticeConstants | None = None,
) -> StrainCurves:
    """|eta| n / N0 on a log-spaced density grid, one curve per species."""
    lattice = lattice or GeLatticeConstants()
    species_list = list(species_list) if species_list is not None else default_species()
    lo, hi = map(float, density_range)
    if not 0 < lo < hi < lattice.atomic_density_N0:
        raise ValueError(f"density range must satisfy 0 < min < max < N0, got ({lo:g}, {hi:g})")
    if int(points_per_decade) != points_per_decade or points_per_decade < 1:
        raise ValueError("points_per_decade must be an integer >= 1")
    decades = math.log10(hi / lo)
    npts = max(2, math.ceil(decades * points_per_decade - 1e-9) + 1)
    n = np.logspace(math.log10(lo), math.log10(hi), npts)
    n[0], n[-1] = lo, hi
    N0 = lattice.atomic_density_N0
    curves = {s.symbol: abs(s.mismatch_eta) * n / N0 for s in species_list}
    markers = grade_markers(lattice)
    mvals = {s.symbol: {g: abs(s.mismatch_eta) * d / N0 for g, d in markers.items()} for s in species_list}
    return StrainCurves(densities=n, curves=curves, markers=markers, marker_values=mvals)
