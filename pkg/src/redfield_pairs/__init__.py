"""Factorized Bloch-Redfield dynamics for qubit pairs and its positivity diagnostics."""

__version__ = "0.1.0"

from .algebra import (
    SIGMA,
    BlochVector,
    ConvergenceError,
    NotHermitianError,
    bloch_compose,
    bloch_decompose,
    check_hermitian,
    herm_eigh,
    herm_eigvals,
    is_density_matrix,
    min_eigenvalue,
    pair_coords,
    pair_from_coords,
    partial_trace,
    pauli,
    tensor,
)
from .generators import (
    GeneratorParams,
    PhysicalParams,
    RedfieldCoefficients,
    apply_full_generator,
    apply_L,
    apply_L2,
    apply_product_generator,
    bloch_generator_matrix,
    general_master_rhs,
    markov_params,
    redfield_coefficients,
)
from .propagation import (
    OverdampedWarning,
    PairState,
    PropagatorResult,
    TraceDriftError,
    bloch_map_matrix,
    evolve_singlet_closed_form,
    local_map,
    make_product,
    make_singlet,
    make_theta,
    make_werner,
    product_map,
    propagate_bloch_analytic,
    propagate_numeric,
    singlet_eigenvalues_closed_form,
    superoperator,
)
from .diagnostics import (
    WITNESS,
    PositivityReport,
    ThresholdReport,
    UndefinedEntropyError,
    admissible_scan,
    choi_matrix,
    choi_min_eigenvalue,
    entropy,
    first_negative_time,
    lambda_closed_form,
    lambda_curvature_at_zero,
    lambda_curvature_fd,
    lambda_from_state,
    min_werner_lambda,
    purity,
    scan_theta_threshold,
    scan_werner_threshold,
    theta_threshold,
    werner_lambda,
    werner_threshold,
)
from .stochastic import (
    EnsembleResult,
    NoisePath,
    correlated_pair_paths,
    ensemble_average,
    markov_gap_report,
    ou_path,
    trajectory_evolve,
    weak_coupling_table,
)
