"""Physical constants, Ge lattice data and derived effective masses.

Masses are dimensionless multiples of the free-electron mass m0. Everything
else is SI.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from scipy import constants as _sc

__all__ = [
    "PhysicalConstants",
    "GeLatticeConstants",
    "BandEdgeMasses",
    "dos_mass_electron",
    "dos_mass_hole",
    "conductivity_mass_electron",
    "conductivity_mass_hole",
    "derived_masses",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used by the frequency and budget formulas."""

    bohr_magneton: float = _sc.physical_constants["Bohr magneton"][0]  # J/T
    reduced_planck: float = _sc.hbar  # J s
    electron_mass: float = _sc.m_e  # kg

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")


@dataclass(frozen=True)
class GeLatticeConstants:
    """Diamond-cubic Ge lattice. ``atomic_density_N0`` is derived (8 atoms per cell)."""

    lattice_constant_a0: float = 5.658e-10  # m
    atomic_density_N0: float = field(init=False)  # m^-3

    def __post_init__(self) -> None:
        if not self.lattice_constant_a0 > 0:
            raise ValueError("lattice_constant_a0 must be positive")
        object.__setattr__(self, "atomic_density_N0", 8.0 / self.lattice_constant_a0**3)


@dataclass(frozen=True)
class BandEdgeMasses:
    """Band-edge masses of Ge in units of m0.

    ``m_gamma`` is the direct-valley conduction mass; it is carried for
    completeness and feeds no derived quantity.
    """

    m_l: float = 1.64
    m_t: float = 0.082
    m_hh: float = 0.28
    m_lh: float = 0.044
    m_so: float = 0.084
    m_gamma: float = 0.041
    valley_degeneracy_Nv: int = 4

    def __post_init__(self) -> None:
        for name in ("m_l", "m_t", "m_hh", "m_lh", "m_so", "m_gamma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.m_l >= self.m_t:
            raise ValueError("expected m_l >= m_t")
        if not self.m_hh >= self.m_lh:
            raise ValueError("expected m_hh >= m_lh")
        if int(self.valley_degeneracy_Nv) != self.valley_degeneracy_Nv or self.valley_degeneracy_Nv < 1:
            raise ValueError("valley_degeneracy_Nv must be an integer >= 1")

    def with_overrides(self, **kw) -> "BandEdgeMasses":
        return replace(self, **kw)


# The strict orderings m_l > m_t and m_hh > m_lh are physical for Ge, but the
# isotropic and degenerate limits are useful checks, so equality is admitted.


def dos_mass_electron(m: BandEdgeMasses) -> float:
    """Conduction-band density-of-states mass, Nv^(2/3) (m_l m_t^2)^(1/3)."""
    return m.valley_degeneracy_Nv ** (2.0 / 3.0) * (m.m_l * m.m_t**2) ** (1.0 / 3.0)


def dos_mass_hole(m: BandEdgeMasses) -> float:
    """Valence-band density-of-states mass from the combined HH and LH bands."""
    return (m.m_hh**1.5 + m.m_lh**1.5) ** (2.0 / 3.0)


def conductivity_mass_electron(m: BandEdgeMasses) -> float:
    return 3.0 / (1.0 / m.m_l + 2.0 / m.m_t)


def conductivity_mass_hole(m: BandEdgeMasses) -> float:
    return (m.m_hh**1.5 + m.m_lh**1.5) / (m.m_hh**0.5 + m.m_lh**0.5)


def derived_masses(m: BandEdgeMasses | None = None) -> dict[str, float]:
    """All four averaged masses keyed by short name, in units of m0."""
    m = m or BandEdgeMasses()
    return {
        "dos_electron": dos_mass_electron(m),
        "dos_hole": dos_mass_hole(m),
        "conductivity_electron": conductivity_mass_electron(m),
        "conductivity_hole": conductivity_mass_hole(m),
    }
