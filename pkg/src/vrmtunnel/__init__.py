"""Transmission and reflection through one-dimensional barriers by the variational R-matrix method."""

from .basis import BasisSet, assemble_energy_matrices, assemble_system, basis_eval, basis_integrals, kappa_grid
from .config import RunConfig, load_config, parse_config
from .errors import (
    AccuracyError,
    ConfigError,
    DegenerateBoundaryError,
    DependentSolutionsError,
    DomainError,
    PreconditionError,
    QuadratureError,
    ResonanceError,
    TunnelingError,
)
from .harness import export_series, reproduce_table, run_sweep
from .oracles import (
    airy_pair,
    bell_transmission_exact,
    eckart_reflection_exact,
    integrate_reference,
    matched_pair_transmission,
    reference_solution,
)
from .potentials import (
    BellShaped,
    Eckart,
    ExponentialStep,
    LinearStep,
    Parabolic,
    Sampled,
    ScatteringSetup,
    evaluate,
    make_profile,
    peak,
)
from .quadrature import QuadratureSpec
from .solver import TunnelingResult, inner_solution, reflection_transmission, solve_tunneling

__version__ = "0.1.0"
