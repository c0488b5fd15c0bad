"""T1 budgets for spin qubits in phononic-crystal (PnC) patterned Ge.

The phonon rate is factored as (calibrated bulk reference rate) x S, where S
is the mode-weighted strain density of states at the qubit frequency in the
patterned structure divided by that of an unpatterned control. Surface,
defect, microwave, cavity and other channels add to it:

    1/T1 = S / T1_ref + G_surf + G_def + G_mw + G_cav + G_other

Frequencies are angular (rad/s) throughout; times in s, rates in 1/s.
An unbounded T1 is ``math.inf``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .materials import PhysicalConstants

__all__ = [
    "GATED_MESSAGE",
    "Modality",
    "QubitOperatingPoint",
    "CalibrationPoint",
    "SIGILLITO_DONOR",
    "LineShape",
    "ReferenceDensity",
    "Mode",
    "ModeSpectrum",
    "ParasiticChannels",
    "CavityParams",
    "CHANNEL_ORDER",
    "qubit_frequency",
    "reference_t1",
    "lorentzian",
    "gaussian",
    "pnc_suppression_factor",
    "pnc_t1",
    "purcell_rate",
    "purcell_rate_detuned",
    "channel_rates",
    "dominant_channel",
    "total_t1",
    "effective_suppression",
    "t2_from",
    "load_mode_spectrum",
    "load_reference_density",
    "format_time",
]

GATED_MESSAGE = "phonon-channel fully gated"


class Modality(str, enum.Enum):
    DONOR = "donor"
    ACCEPTOR = "acceptor"
    GATE_ELECTRON = "gate_electron"
    GATE_HOLE = "gate_hole"


@dataclass(frozen=True)
class QubitOperatingPoint:
    g_eff: float
    field_B0: float  # T
    temperature: float  # K
    modality: Modality = Modality.DONOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "modality", Modality(self.modality))
        if self.g_eff == 0:
            raise ValueError("g_eff must be nonzero")
        if not self.field_B0 > 0:
            raise ValueError("field_B0 must be positive")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")


@dataclass(frozen=True)
class CalibrationPoint:
    """A measured T1 at (field, temperature) anchoring T1 ~ B^-p T^-q.

    The defaults p=4, q=1 are the direct one-phonon law; other donor species
    or orientations may call for different exponents.
    """

    t1_ref: float  # s
    field_ref: float  # T
    temp_ref: float  # K
    field_exponent: float = 4.0
    temp_exponent: float = 1.0
    source: str = ""

    def __post_init__(self) -> None:
        for name in ("t1_ref", "field_ref", "temp_ref", "field_exponent", "temp_exponent"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


# Enriched Ge:P pulsed ESR: T2 = 2 T1 = 1.2 ms at 0.44 T, 0.35 K.
SIGILLITO_DONOR = CalibrationPoint(
    t1_ref=0.6e-3, field_ref=0.44, temp_ref=0.35, source="enriched Ge:P donor, T2=2T1=1.2 ms"
)


def qubit_frequency(op: QubitOperatingPoint, consts: PhysicalConstants | None = None) -> float:
    """Zeeman angular frequency |g| mu_B B0 / hbar in rad/s."""
    consts = consts or PhysicalConstants()
    return abs(op.g_eff) * consts.bohr_magneton * op.field_B0 / consts.reduced_planck


def reference_t1(op: QubitOperatingPoint, cal: CalibrationPoint) -> float:
    """Bulk phonon-limited T1 at ``op`` scaled from the calibration point."""
    return (
        cal.t1_ref
        * (cal.field_ref / op.field_B0) ** cal.field_exponent
        * (cal.temp_ref / op.temperature) ** cal.temp_exponent
    )


# -- broadened line shapes, unit area in omega ------------------------------

def lorentzian(omega, center, kappa):
    """(kappa/2pi) / ((omega-center)^2 + (kappa/2)^2); ``kappa`` is the FWHM."""
    d = np.subtract(omega, center)
    return (kappa / (2.0 * math.pi)) / (d * d + 0.25 * kappa * kappa)


def gaussian(omega, center, kappa):
    """Unit-area Gaussian with FWHM ``kappa``."""
    sigma = kappa / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    d = np.subtract(omega, center)
    return np.exp(-0.5 * (d / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


class LineShape(str, enum.Enum):
    LORENTZIAN = "lorentzian"
    GAUSSIAN = "gaussian"

    @property
    def func(self) -> Callable:
        return lorentzian if self is LineShape.LORENTZIAN else gaussian


@dataclass(frozen=True)
class ReferenceDensity:
    """Weighted strain density of the control structure, per rad/s.

    Either a flat ``constant`` or a table interpolated linearly; evaluation
    outside the table raises rather than extrapolating.
    """

    constant: float | None = None
    omega: tuple[float, ...] = ()
    density: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.constant is not None:
            if self.omega or self.density:
                raise ValueError("give either a constant or a table, not both")
            if not self.constant > 0:
                raise ValueError("reference density must be positive")
            return
        om = np.asarray(self.omega, dtype=float)
        rho = np.asarray(self.density, dtype=float)
        if om.size < 2 or om.shape != rho.shape:
            raise ValueError("tabulated reference density needs >= 2 matching (omega, density) points")
        if np.any(np.diff(om) <= 0):
            raise ValueError("reference density omega values must be strictly increasing")
        if np.any(rho <= 0):
            raise ValueError("reference density must be strictly positive")
        object.__setattr__(self, "omega", tuple(om.tolist()))
        object.__setattr__(self, "density", tuple(rho.tolist()))

    @classmethod
    def flat(cls, value: float) -> "ReferenceDensity":
        return cls(constant=float(value))

    @property
    def domain(self) -> tuple[float, float]:
        if self.constant is not None:
            return (0.0, math.inf)
        return (self.omega[0], self.omega[-1])

    def __call__(self, omega: float) -> float:
        if self.constant is not None:
            return self.constant
        lo, hi = self.domain
        if not lo <= omega <= hi:
            raise ValueError(
                f"omega = {omega:.6g} rad/s is outside the reference density table [{lo:.6g}, {hi:.6g}]"
            )
        return float(np.interp(omega, self.omega, self.density))


@dataclass(frozen=True)
class Mode:
    omega: float  # rad/s
    linewidth_kappa: float  # rad/s, FWHM
    coupling_weight: float  # |M|^2, dimensionless

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError("mode omega must be positive")
        if not self.linewidth_kappa > 0:
            raise ValueError("mode linewidth must be positive")
        if not self.coupling_weight >= 0:
            raise ValueError("mode coupling weight must be non-negative")


@dataclass(frozen=True)
class ModeSpectrum:
    modes: tuple[Mode, ...]
    reference_density: ReferenceDensity
    line_shape: LineShape = LineShape.LORENTZIAN

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "line_shape", LineShape(self.line_shape))

    @classmethod
    def from_arrays(cls, omega, kappa, weight, reference_density, line_shape=LineShape.LORENTZIAN) -> "ModeSpectrum":
        modes = tuple(Mode(float(o), float(k), float(w)) for o, k, w in zip(omega, kappa, weight))
        return cls(modes, reference_density, line_shape)

    def weighted_density(self, omega):
        """Broadened, weight-summed mode density at ``omega`` (per rad/s)."""
        if not self.modes:
            return np.zeros_like(np.asarray(omega, dtype=float))
        w = np.array([m.coupling_weight for m in self.modes])
        c = np.array([m.omega for m in self.modes])
        k = np.array([m.linewidth_kappa for m in self.modes])
        om = np.asarray(omega, dtype=float)
        vals = self.line_shape.func(om[..., None], c, k)
        return vals @ w


def pnc_suppression_factor(spectrum: ModeSpectrum, omega_q: float) -> float:
    """Patterned-to-reference weighted strain density ratio S at ``omega_q``."""
    ref = spectrum.reference_density(omega_q)
    if ref == 0:
        raise ValueError("reference density vanishes at omega_q; S is undefined")
    return float(spectrum.weighted_density(omega_q)) / ref


def pnc_t1(t1_ref: float, s_pnc: float) -> float:
    """Phonon-limited T1 after suppression; ``inf`` when S = 0."""
    if not t1_ref > 0:
        raise ValueError("t1_ref must be positive")
    if s_pnc < 0:
        raise ValueError(f"suppression factor must be non-negative, got {s_pnc}")
    if s_pnc == 0:
        return math.inf
    return t1_ref / s_pnc


@dataclass(frozen=True)
class ParasiticChannels:
    gamma_surf: float = 0.0
    gamma_def: float = 0.0
    gamma_mw: float = 0.0
    gamma_cav: float = 0.0
    gamma_other: float = 0.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) >= 0:
                raise ValueError(f"{f.name} must be non-negative")

    @property
    def total(self) -> float:
        return math.fsum(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class CavityParams:
    """Localized mechanical mode: frequency and coupling in rad/s."""

    omega_c: float
    quality_Q: float
    coupling_g: float

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")

    @property
    def kappa(self) -> float:
        return self.omega_c / self.quality_Q


def purcell_rate(cav: CavityParams, omega_q: float) -> float:
    """Relaxation rate g^2 kappa / (Delta^2 + (kappa/2)^2) through the cavity mode."""
    return purcell_rate_detuned(cav, omega_q - cav.omega_c)


def purcell_rate_detuned(cav: CavityParams, delta: float) -> float:
    """Purcell rate at detuning ``delta`` = omega_q - omega_c.

    Use this when the detuning is the controlled quantity: forming omega_c +
    delta first rounds small detunings against a GHz carrier.
    """
    k = cav.kappa
    return cav.coupling_g**2 * k / (delta * delta + 0.25 * k * k)


CHANNEL_ORDER = ("phonon", "surf", "def", "mw", "cav", "other")


def channel_rates(t1_ref_phonon: float, s_pnc: float, channels: ParasiticChannels) -> dict[str, float]:
    if not t1_ref_phonon > 0:
        raise ValueError("t1_ref_phonon must be positive")
    if s_pnc < 0:
        raise ValueError(f"suppression factor must be non-negative, got {s_pnc}")
    return {
        "phonon": s_pnc / t1_ref_phonon,
        "surf": channels.gamma_surf,
        "def": channels.gamma_def,
        "mw": channels.gamma_mw,
        "cav": channels.gamma_cav,
        "other": channels.gamma_other,
    }


def dominant_channel(rates: dict[str, float]) -> str:
    """Largest channel; ties go to the earlier entry of CHANNEL_ORDER, "none" if all zero."""
    best, best_rate = "none", 0.0
    for name in CHANNEL_ORDER:
        if rates[name] > best_rate:
            best, best_rate = name, rates[name]
    return best


def total_t1(t1_ref_phonon: float, s_pnc: float, channels: ParasiticChannels | None = None) -> float:
    """Measured T1 from the phonon channel plus all parasitic channels."""
    channels = channels or ParasiticChannels()
    if channels.total == 0:
        return pnc_t1(t1_ref_phonon, s_pnc)  # exact t1_ref / S, no reciprocal round trip
    rates = channel_rates(t1_ref_phonon, s_pnc, channels)
    return 1.0 / math.fsum(rates.values())


def effective_suppression(
    t1_control: float, t1_pnc: float, gamma_other: float = 0.0, strict: bool = True
) -> float:
    """S from paired control/patterned T1 measurements, with known other rates removed.

    A negative value means ``gamma_other`` exceeds the measured patterned
    rate. That raises unless ``strict`` is False.
    """
    if not (t1_control > 0 and t1_pnc > 0):
        raise ValueError("relaxation times must be positive")
    if gamma_other < 0:
        raise ValueError("gamma_other must be non-negative")
    s = (1.0 / t1_pnc - gamma_other) * t1_control
    if s < 0 and strict:
        raise ValueError(
            f"inconsistent inputs: gamma_other = {gamma_other:g}/s exceeds the measured rate {1 / t1_pnc:g}/s"
        )
    return s


def t2_from(t1: float, t_phi: float = math.inf) -> float:
    """T2 from 1/T2 = 1/(2 T1) + 1/T_phi."""
    if not t1 > 0:
        raise ValueError("t1 must be positive")
    if not t_phi > 0:
        raise ValueError("t_phi must be positive or inf")
    if math.isinf(t1) and math.isinf(t_phi):
        return math.inf
    return 1.0 / (0.5 / t1 + 1.0 / t_phi)


def format_time(t: float) -> str:
    """Three significant figures with a convenient unit; ``inf`` gets the gated label."""
    if math.isinf(t):
        return GATED_MESSAGE
    for unit, scale in (("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9)):
        if abs(t) >= scale:
            return f"{t / scale:.3g} {unit}"
    return f"{t:.3g} s"


# -- file ingestion (ordinary Hz on disk, rad/s in memory) -------------------

def _read_csv(path: str | Path, columns: Sequence[str]) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if not rows or [c.strip() for c in rows[0]] != list(columns):
        raise ValueError(f"{path}: expected header {','.join(columns)}")
    body = rows[1:]
    try:
        return np.array([[float(x) for x in r] for r in body], dtype=float).reshape(len(body), len(columns))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def load_reference_density(path: str | Path) -> ReferenceDensity:
    """CSV columns ``omega_hz,density_per_hz``; converted to per rad/s."""
    arr = _read_csv(path, ("omega_hz", "density_per_hz"))
    return ReferenceDensity(omega=tuple(2 * math.pi * arr[:, 0]), density=tuple(arr[:, 1] / (2 * math.pi)))


def load_mode_spectrum(
    path: str | Path,
    reference_density: ReferenceDensity,
    line_shape: LineShape = LineShape.LORENTZIAN,
) -> ModeSpectrum:
    """CSV columns ``omega_hz,kappa_hz,weight``."""
    arr = _read_csv(path, ("omega_hz", "kappa_hz", "weight"))
    return ModeSpectrum.from_arrays(2 * math.pi * arr[:, 0], 2 * math.pi * arr[:, 1], arr[:, 2], reference_density, line_shape)
