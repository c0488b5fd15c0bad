"""Design estimates for Ge spin qubits: effective masses, impurity strain, T1 budgets."""

__version__ = "0.1.0"

from .materials import (  # noqa: E402
    BandEdgeMasses,
    GeLatticeConstants,
    PhysicalConstants,
    conductivity_mass_electron,
    conductivity_mass_hole,
    derived_masses,
    dos_mass_electron,
    dos_mass_hole,
)
from .impurity_strain import (  # noqa: E402
    GRADES,
    ImpuritySpecies,
    PurityGrade,
    avg_linear_strain,
    load_species,
    number_density,
    rms_strain,
    strain_curve,
    strain_report,
    strain_table,
    total_avg_strain,
)
from .strain_montecarlo import McConfig, McResult, convergence_sweep, simulate_volume_strain  # noqa: E402
from .relaxation_budget import (  # noqa: E402
    SIGILLITO_DONOR,
    CalibrationPoint,
    CavityParams,
    ModeSpectrum,
    ParasiticChannels,
    QubitOperatingPoint,
    ReferenceDensity,
    effective_suppression,
    pnc_suppression_factor,
    pnc_t1,
    purcell_rate,
    qubit_frequency,
    reference_t1,
    t2_from,
    total_t1,
)
from .sweep import Axis, BaseConfig, SweepSpec, find_crossover, purcell_safe_detuning, run_sweep  # noqa: E402
