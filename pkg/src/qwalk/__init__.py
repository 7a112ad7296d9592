"""Continuous-time quantum-walk search on ergodic reversible Markov chains.

Spectral machinery (discriminants, hitting times, edge-space Hamiltonians)
plus two search algorithms run exactly at desk scale: the oracle-decoupled
edge walk and phase-randomized evolution on an interpolated chain.
"""

from .chains import (
    StationaryDistribution,
    StochasticChain,
    interpolate_chain,
    is_lazy,
    load_chain,
    make_lazy,
    save_chain,
    stationary_distribution,
    stationary_interpolated,
    validate_chain,
)
from .cg_prime import (
    CGPrimeDiagnostics,
    CGPrimeResult,
    check_spectral_condition,
    diagnostics,
    eigenvalue_bracketing,
    run_cg_prime,
)
from .graphs import FamilySpec, from_adjacency, generate
from .hamiltonian import (
    DenseEdgeOperator,
    ReducedHamiltonian,
    build_dense,
    build_reduced,
    measurement_matrix,
    szegedy_identity_check,
    verify_edge_locality,
)
from .hitting import (
    HittingReport,
    extended_hitting_time,
    hitting_report,
    hitting_time,
    interpolated_hitting_time,
    monte_carlo_hitting_time,
)
from .interpolated import (
    PhaseRandomConfig,
    PhaseRandomResult,
    averaged_success,
    dephasing_error,
    required_time,
    s_star,
    sampled_run,
)
from .spectral import (
    DiscriminantSpectrum,
    MarkedDecomposition,
    discriminant,
    marked_decomposition,
    principal_vector,
)
from .sweep import SweepConfig, SweepRow, fit_scaling, run_sweep

__version__ = "0.1.0"

__all__ = [
    "StochasticChain",
    "StationaryDistribution",
    "validate_chain",
    "make_lazy",
    "is_lazy",
    "interpolate_chain",
    "stationary_distribution",
    "stationary_interpolated",
    "save_chain",
    "load_chain",
    "DiscriminantSpectrum",
    "MarkedDecomposition",
    "discriminant",
    "principal_vector",
    "marked_decomposition",
    "HittingReport",
    "hitting_time",
    "interpolated_hitting_time",
    "extended_hitting_time",
    "monte_carlo_hitting_time",
    "hitting_report",
    "DenseEdgeOperator",
    "ReducedHamiltonian",
    "build_dense",
    "build_reduced",
    "verify_edge_locality",
    "szegedy_identity_check",
    "measurement_matrix",
    "CGPrimeDiagnostics",
    "CGPrimeResult",
    "diagnostics",
    "check_spectral_condition",
    "run_cg_prime",
    "eigenvalue_bracketing",
    "PhaseRandomConfig",
    "PhaseRandomResult",
    "s_star",
    "required_time",
    "averaged_success",
    "sampled_run",
    "dephasing_error",
    "FamilySpec",
    "generate",
    "from_adjacency",
    "SweepConfig",
    "SweepRow",
    "run_sweep",
    "fit_scaling",
    "__version__",
]
