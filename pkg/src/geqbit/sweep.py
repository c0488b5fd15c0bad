"""Grid sweeps of the T1 budget and closed-form design inversions."""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .impurity_strain import ImpuritySpecies, PurityGrade, rms_strain, total_avg_strain
from .materials import GeLatticeConstants, PhysicalConstants
from .relaxation_budget import (
    CHANNEL_ORDER,
    SIGILLITO_DONOR,
    CalibrationPoint,
    CavityParams,
    ModeSpectrum,
    ParasiticChannels,
    QubitOperatingPoint,
    channel_rates,
    dominant_channel,
    pnc_suppression_factor,
    purcell_rate,
    purcell_rate_detuned,
    qubit_frequency,
    reference_t1,
    t2_from,
    total_t1,
)

__all__ = [
    "Parameter",
    "Axis",
    "BaseConfig",
    "SweepSpec",
    "Cell",
    "SweepResult",
    "evaluate_point",
    "run_sweep",
    "Crossover",
    "find_crossover",
    "purcell_safe_detuning",
]


class Parameter(str, enum.Enum):
    B0 = "B0"  # T
    T = "T"  # K
    S_PNC = "S_pnc"
    DELTA_CAV = "delta_cav"  # rad/s, omega_q - omega_c
    Q = "Q"
    G_COUPLING = "g_coupling"  # rad/s
    IMPURITY_DENSITY = "impurity_density"  # m^-3, applied to every species load


@dataclass(frozen=True)
class Axis:
    parameter: Parameter
    min: float
    max: float
    points: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        object.__setattr__(self, "parameter", Parameter(self.parameter))
        if self.scale not in ("linear", "log"):
            raise ValueError(f"axis {self.parameter.value}: scale must be 'linear' or 'log'")
        if int(self.points) != self.points or self.points < 2:
            raise ValueError(f"axis {self.parameter.value}: need at least 2 points")
        if not self.min < self.max:
            raise ValueError(f"axis {self.parameter.value}: min must be < max (got {self.min}, {self.max})")
        if self.scale == "log" and not self.min > 0:
            raise ValueError(f"axis {self.parameter.value}: log scale requires min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            v = np.logspace(math.log10(self.min), math.log10(self.max), self.points)
        else:
            v = np.linspace(self.min, self.max, self.points)
        v[0], v[-1] = self.min, self.max
        return v


@dataclass(frozen=True)
class BaseConfig:
    """Everything held fixed while axes vary.

    ``s_pnc`` wins over ``spectrum``; with neither the structure is treated as
    unpatterned (S = 1). A cavity, if present, adds its Purcell rate to the
    cavity channel.
    """

    operating_point: QubitOperatingPoint = QubitOperatingPoint(2.0, 0.44, 0.35)
    calibration: CalibrationPoint = SIGILLITO_DONOR
    channels: ParasiticChannels = ParasiticChannels()
    cavity: CavityParams | None = None
    s_pnc: float | None = None
    spectrum: ModeSpectrum | None = None
    t_phi: float = math.inf
    species_loads: tuple[tuple[ImpuritySpecies, PurityGrade | float], ...] = ()
    sampling_volume: float | None = None
    lattice: GeLatticeConstants = field(default_factory=GeLatticeConstants)
    consts: PhysicalConstants = field(default_factory=PhysicalConstants)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[Axis, ...]
    fixed: BaseConfig = field(default_factory=BaseConfig)

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 3:
            raise ValueError(f"a sweep needs 1 to 3 axes, got {len(self.axes)}")
        names = [a.parameter for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("each parameter may appear on at most one axis")
        cav_axes = {Parameter.DELTA_CAV, Parameter.Q, Parameter.G_COUPLING} & set(names)
        if cav_axes and self.fixed.cavity is None:
            raise ValueError(f"axes {sorted(p.value for p in cav_axes)} need a cavity in the base configuration")
        if Parameter.IMPURITY_DENSITY in names and not self.fixed.species_loads:
            raise ValueError("an impurity_density axis needs species loads in the base configuration")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.points for a in self.axes)


@dataclass(frozen=True)
class Cell:
    coords: dict[str, float]
    t1_total: float = math.nan
    t2: float = math.nan
    dominant_channel: str = ""
    s_pnc_used: float = math.nan
    rates: dict[str, float] = field(default_factory=dict)
    t1_ref_phonon: float = math.nan
    omega_q: float = math.nan
    total_avg_strain: float | None = None
    rms_strain: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class SweepResult:
    axes: tuple[Axis, ...]
    grid: tuple[Cell, ...]  # row-major over the declared axes

    @property
    def failed(self) -> list[Cell]:
        return [c for c in self.grid if c.failed]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(c, name) for c in self.grid], dtype=float)


def evaluate_point(base: BaseConfig, coords: dict[Parameter, float] | None = None) -> Cell:
    """One budget evaluation with ``coords`` overriding ``base``.

    Raises on invalid inputs; :func:`run_sweep` turns that into a failed cell.
    """
    coords = dict(coords or {})
    op = base.operating_point
    if Parameter.B0 in coords:
        op = replace(op, field_B0=coords[Parameter.B0])
    if Parameter.T in coords:
        op = replace(op, temperature=coords[Parameter.T])
    omega_q = qubit_frequency(op, base.consts)
    t1_ref = reference_t1(op, base.calibration)

    if Parameter.S_PNC in coords:
        s = coords[Parameter.S_PNC]
    elif base.s_pnc is not None:
        s = base.s_pnc
    elif base.spectrum is not None:
        s = pnc_suppression_factor(base.spectrum, omega_q)
    else:
        s = 1.0

    channels = base.channels
    if base.cavity is not None:
        cav = base.cavity
        if Parameter.Q in coords:
            cav = replace(cav, quality_Q=coords[Parameter.Q])
        if Parameter.G_COUPLING in coords:
            cav = replace(cav, coupling_g=coords[Parameter.G_COUPLING])
        if Parameter.DELTA_CAV in coords:
            gamma_p = purcell_rate_detuned(cav, coords[Parameter.DELTA_CAV])
        else:
            gamma_p = purcell_rate(cav, omega_q)
        channels = replace(channels, gamma_cav=channels.gamma_cav + gamma_p)

    rates = channel_rates(t1_ref, s, channels)
    t1 = total_t1(t1_ref, s, channels)

    strain = rms = None
    if base.species_loads:
        loads = base.species_loads
        if Parameter.IMPURITY_DENSITY in coords:
            loads = tuple((sp, coords[Parameter.IMPURITY_DENSITY]) for sp, _ in loads)
        strain = total_avg_strain(loads, base.lattice)
        if base.sampling_volume is not None:
            rms = rms_strain(loads, base.sampling_volume, base.lattice)

    return Cell(
        coords={p.value: v for p, v in coords.items()},
        t1_total=t1,
        t2=t2_from(t1, base.t_phi),
        dominant_channel=dominant_channel(rates),
        s_pnc_used=s,
        rates=rates,
        t1_ref_phonon=t1_ref,
        omega_q=omega_q,
        total_avg_strain=strain,
        rms_strain=rms,
    )


def _safe_cell(base: BaseConfig, coords: dict[Parameter, float]) -> Cell:
    try:
        return evaluate_point(base, coords)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        return Cell(coords={p.value: v for p, v in coords.items()}, error=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every grid cell; the first axis varies slowest."""
    values = [a.values() for a in spec.axes]
    points = [
        {a.parameter: float(v) for a, v in zip(spec.axes, combo)} for combo in itertools.product(*values)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda c: _safe_cell(spec.fixed, c), points))
    else:
        cells = [_safe_cell(spec.fixed, c) for c in points]
    return SweepResult(axes=spec.axes, grid=tuple(cells))


@dataclass(frozen=True)
class Crossover:
    s_star: float  # closed form t1_ref * Gamma_parasitic
    s_star_bisection: float  # from the cell evaluation path
    t1_ref_phonon: float
    gamma_parasitic: float


def find_crossover(spec: SweepSpec, rtol: float = 1e-6) -> Crossover:
    """Suppression factor at which the phonon rate equals the total parasitic rate.

    The closed form is checked against bisection on the cell evaluator within
    the bracketing pair of grid points of the single S_pnc axis.
    """
    if len(spec.axes) != 1 or spec.axes[0].parameter is not Parameter.S_PNC:
        raise ValueError("crossover search needs a sweep with a single S_pnc axis")
    axis = spec.axes[0]
    base = spec.fixed

    def excess(s: float) -> tuple[float, Cell]:
        cell = evaluate_point(base, {Parameter.S_PNC: s})
        parasitic = math.fsum(cell.rates[k] for k in CHANNEL_ORDER if k != "phonon")
        return cell.rates["phonon"] - parasitic, cell

    probe = evaluate_point(base, {Parameter.S_PNC: axis.min})
    t1_ref = probe.t1_ref_phonon
    gamma_par = math.fsum(probe.rates[k] for k in CHANNEL_ORDER if k != "phonon")
    if gamma_par <= 0:
        raise ValueError("no crossover exists: all parasitic channels are zero")
    s_closed = t1_ref * gamma_par

    grid = axis.values()
    f = [excess(float(s))[0] for s in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if f[i] == 0:
            return Crossover(s_closed, float(grid[i]), t1_ref, gamma_par)
        if f[i] < 0 <= f[i + 1]:
            bracket = (float(grid[i]), float(grid[i + 1]))
            break
    if bracket is None:
        raise ValueError(
            f"crossover S* = {s_closed:.6g} lies outside the swept range [{axis.min:g}, {axis.max:g}]"
        )
    lo, hi = bracket
    log = axis.scale == "log"
    while (hi - lo) > 1e-3 * rtol * hi:
        mid = math.sqrt(lo * hi) if log else 0.5 * (lo + hi)
        if excess(mid)[0] < 0:
            lo = mid
        else:
            hi = mid
    s_bis = 0.5 * (lo + hi)
    if abs(s_bis - s_closed) > rtol * s_closed:
        raise RuntimeError(f"crossover mismatch: closed form {s_closed:.9g} vs bisection {s_bis:.9g}")
    return Crossover(s_closed, s_bis, t1_ref, gamma_par)


def purcell_safe_detuning(cav: CavityParams, gamma_budget: float) -> float:
    """Smallest |omega_q - omega_c| keeping the Purcell rate at or below ``gamma_budget``."""
    if not gamma_budget > 0:
        raise ValueError("gamma_budget must be positive")
    k = cav.kappa
    if gamma_budget >= 4.0 * cav.coupling_g**2 / k:
        return 0.0
    return math.sqrt(cav.coupling_g**2 * k / gamma_budget - 0.25 * k * k)

