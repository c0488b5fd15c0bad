"""Sampling oracle for the mean and RMS impurity strain over a finite volume.

Each trial draws an independent Poisson count k_i ~ Poisson(n_i V) for every
species and forms the volume-averaged strain sum_i eta_i k_i / (N0 V). Sample
statistics of that quantity are compared against the closed forms in
:mod:`geqbit.impurity_strain`; nothing here reuses those formulas.

Trials are generated in fixed-size blocks, each with its own child stream of
a ``numpy.random.SeedSequence``. Block moments are merged with the exact
pairwise update, so a threaded run gives the same bits as a sequential one.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .impurity_strain import ImpuritySpecies, avg_linear_strain, rms_strain
from .materials import GeLatticeConstants

__all__ = [
    "McConfig",
    "McResult",
    "Moments",
    "simulate_volume_strain",
    "convergence_sweep",
    "OracleCheck",
    "check_against_analytic",
]

DEFAULT_TRIALS = 1_000_000
DEFAULT_BLOCK = 1 << 17
# numpy's Poisson sampler refuses lam near the int64 limit; stay well below.
POISSON_LAM_MAX = 1e18


@dataclass(frozen=True)
class McConfig:
    species_loads: tuple[tuple[ImpuritySpecies, float], ...]  # (species, density m^-3)
    sampling_volume: float  # m^3
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self) -> None:
        object.__setattr__(self, "species_loads", tuple((s, float(n)) for s, n in self.species_loads))
        if not self.species_loads:
            raise ValueError("at least one species load is required")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        if not self.sampling_volume > 0:
            raise ValueError("sampling_volume must be positive")
        if any(not n > 0 for _, n in self.species_loads):
            raise ValueError("species densities must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")


@dataclass(frozen=True)
class Moments:
    """Count, mean and central sums M2..M4 of a sample; ``merge`` is exact."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> "Moments":
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return cls()
        mu = float(x.mean())
        d = x - mu
        d2 = d * d
        return cls(x.size, mu, float(d2.sum()), float((d2 * d).sum()), float((d2 * d2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        na, nb = self.n, other.n
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        mean = self.mean + nb * d_n
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (
            self.m3
            + other.m3
            + delta * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4
            + other.m4
            + delta * d_n**3 * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3)
        )
        return Moments(n, mean, m2, m3, m4)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0


@dataclass(frozen=True)
class McResult:
    sample_mean: float
    sample_std: float
    trials: int
    standard_error_of_mean: float
    standard_error_of_std: float
    mean_counts: tuple[float, ...]  # average Poisson count per species
    expected_counts: tuple[float, ...]  # n_i V


def _std_error_of_std(m: Moments) -> float:
    # delta method on Var(s^2) = (mu4 - sigma^4 (n-3)/(n-1)) / n
    n = m.n
    if n < 4:
        return math.nan
    s2 = m.variance
    if s2 == 0.0:
        return 0.0
    mu4 = m.m4 / n
    var_s2 = (mu4 - s2 * s2 * (n - 3) / (n - 1)) / n
    return math.sqrt(max(var_s2, 0.0)) / (2.0 * math.sqrt(s2))


def _simulate(cfg: McConfig, lattice: GeLatticeConstants, seq: np.random.SeedSequence, workers: int) -> McResult:
    N0 = lattice.atomic_density_N0
    V = cfg.sampling_volume
    lams = np.array([n * V for _, n in cfg.species_loads])
    too_big = [(s.symbol, lam) for (s, _), lam in zip(cfg.species_loads, lams) if lam > POISSON_LAM_MAX]
    if too_big:
        sym, lam = too_big[0]
        raise OverflowError(
            f"expected count n*V = {lam:.3g} for {sym} exceeds the Poisson sampler limit {POISSON_LAM_MAX:g}; "
            "use a smaller sampling volume"
        )
    weights = np.array([s.mismatch_eta for s, _ in cfg.species_loads]) / (N0 * V)

    sizes = [cfg.block_size] * (cfg.trials // cfg.block_size)
    if cfg.trials % cfg.block_size:
        sizes.append(cfg.trials % cfg.block_size)
    children = seq.spawn(len(sizes))

    def run_block(i: int) -> tuple[Moments, np.ndarray]:
        rng = np.random.Generator(np.random.PCG64(children[i]))
        counts = rng.poisson(lams[:, None], size=(lams.size, sizes[i]))
        strain = weights @ counts
        return Moments.of(strain), counts.sum(axis=1)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, range(len(sizes))))
    else:
        parts = [run_block(i) for i in range(len(sizes))]

    total = Moments()
    count_sum = np.zeros(lams.size, dtype=np.int64)
    for mom, cs in parts:  # block order, never completion order
        total = total.merge(mom)
        count_sum += cs
    std = math.sqrt(total.variance)
    return McResult(
        sample_mean=total.mean,
        sample_std=std,
        trials=total.n,
        standard_error_of_mean=std / math.sqrt(total.n),
        standard_error_of_std=_std_error_of_std(total),
        mean_counts=tuple(float(c) / total.n for c in count_sum),
        expected_counts=tuple(float(x) for x in lams),
    )


def simulate_volume_strain(
    cfg: McConfig, lattice: GeLatticeConstants | None = None, workers: int = 1
) -> McResult:
    """Sample the volume-averaged strain ``cfg.trials`` times."""
    return _simulate(cfg, lattice or GeLatticeConstants(), np.random.SeedSequence(cfg.seed), workers)


def convergence_sweep(
    cfg: McConfig, volumes: Sequence[float], lattice: GeLatticeConstants | None = None, workers: int = 1
) -> list[tuple[float, McResult]]:
    """Independent runs at each volume; sub-seeds are spawned from ``cfg.seed``.

    The RMS strain should fall as V**-0.5.
    """
    volumes = [float(v) for v in volumes]
    if not volumes:
        raise ValueError("volumes must be nonempty")
    if any(not v > 0 for v in volumes):
        raise ValueError("volumes must be positive")
    lattice = lattice or GeLatticeConstants()
    seqs = np.random.SeedSequence(cfg.seed).spawn(len(volumes))
    out = []
    for v, seq in zip(volumes, seqs):
        sub = McConfig(cfg.species_loads, v, cfg.trials, cfg.seed, cfg.block_size)
        out.append((v, _simulate(sub, lattice, seq, workers)))
    return out


@dataclass(frozen=True)
class OracleCheck:
    analytic_mean: float
    analytic_std: float
    result: McResult
    z_mean: float
    z_std: float

    @property
    def passed(self) -> bool:
        return abs(self.z_mean) < 3.0 and abs(self.z_std) < 3.0


def _z(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else math.inf


def check_against_analytic(result: McResult, cfg: McConfig, lattice: GeLatticeConstants | None = None) -> OracleCheck:
    """z-scores of the sampled mean and std against the closed-form values."""
    lattice = lattice or GeLatticeConstants()
    mean = math.fsum(avg_linear_strain(s, n, lattice) for s, n in cfg.species_loads)
    std = rms_strain(cfg.species_loads, cfg.sampling_volume, lattice)
    return OracleCheck(
        analytic_mean=mean,
        analytic_std=std,
        result=result,
        z_mean=_z(result.sample_mean - mean, result.standard_error_of_mean),
        z_std=_z(result.sample_std - std, result.standard_error_of_std),
    )
