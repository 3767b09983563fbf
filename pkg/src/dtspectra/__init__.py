"""Circular orbits, spectra and potential reconstruction for discrete-time central-force dynamics."""

from ._backend import BACKEND
from .catalog import CatalogEntry, catalog_energy, catalog_radius
from .core import (
    Coulomb,
    DiscreteParams,
    Extrapolation,
    HydrogenReconstructed,
    Linear,
    Logarithmic,
    OrbitSolution,
    OscillatorReconstructed,
    PhaseState,
    PhysicalityReport,
    Polynomial,
    PotentialModel,
    Tabulated,
    angular_momentum,
    check_physical,
    evaluate_potential,
    potential_derivative,
    read_tabulated_csv,
    write_tabulated_csv,
)
from .dynamics import ClosureReport, Trajectory, check_closure, circular_orbit_state, simulate, step
from .errors import (
    AmbiguityError,
    BracketError,
    CollapseError,
    DiscreteTimeError,
    DomainError,
    MonotonicityError,
    NegativeRadicandError,
    RangeError,
    ReconstructionCheckError,
    ResidualError,
    SolverError,
)
from .inverse import (
    HydrogenLaw,
    LinearLaw,
    PowerLaw,
    RadiusProfile,
    SpectrumSpec,
    TabulatedLaw,
    beta_epsilon_conversions,
    epsilon_from_beta,
    hydrogen_orbit_radius,
    hydrogen_potential,
    invert_radius,
    oscillator_orbit_index,
    oscillator_orbit_radius,
    oscillator_potential,
    radius_profile,
    read_law_csv,
    reconstruct_potential,
)
from .spectrum import SolverOptions, SpectrumTable, compute_spectrum, orbit_energy, solve_orbit_radius

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
