"""Numerical laboratory for periodically kicked collective spins.

Builds the unperturbed and kick operators of a collective spin, assembles
Floquet operators from their eigendecompositions, classifies eigenstates by
quantum resonance conditions, and measures how fragile each class is against
the kick strength, alongside the classical limit of the same dynamics.
"""

from .classical import (
    ClassicalOrbitRecord,
    PhasePoint,
    SingularOrbitError,
    classical_period,
    classical_resonant_energy,
    energy_contour_seeds,
    h0_classical,
    kick_classical,
    map_jacobian,
    one_period_map,
    poincare_section,
    strobe_clustering_sigma,
    stroboscopic_map,
)
from .diagnostics import (
    EpsMaxResult,
    EpsMaxSolverConfig,
    HusimiGrid,
    coherent_state,
    epsilon_max,
    fidelity_complement,
    fidelity_curve,
    husimi,
    max_fidelity,
    participation_ratio,
)
from .floquet import (
    FloquetBuilder,
    FloquetEigensystem,
    associate_states,
    build_floquet,
    diagonalize_unitary,
    follow_single_branch,
    solve_count,
    track_branch,
    unitarity_residual,
)
from .lmg import (
    ModelParams,
    Spectrum,
    build_h0,
    build_kick,
    diagonalize,
    kick_in_eigenbasis,
    kick_matrix_elements,
)
from .resonance import (
    ResonanceLabel,
    StateSelection,
    cr_mismatch_over_j,
    envelope_points,
    extract_delta,
    find_cr_state,
    find_nr_state,
    quantum_period,
    tune_tau_er,
)
from .scaling import (
    CollapseCurves,
    ScalingPoint,
    ScalingRun,
    collapse_curves,
    collapse_sizes,
    run_scaling,
    select_state,
)
from .scaling_fits import (
    PowerLawFit,
    collapse_deviation,
    default_j_grid,
    dominance_threshold,
    fit_power_law,
    monotone_mismatch_subset,
    smooth_decay_subset,
)
from .spin_ops import (
    AngularMomentumRep,
    HermitianOperator,
    angular_momentum_matrices,
    hermitian_product,
)
from .upt import (
    DegenerateQuasienergyError,
    UptDegenerate,
    UptNonDegenerate,
    a2_coefficient,
    a3_coefficient,
    degenerate_block,
    eigenstate_first_order,
    eigenstate_second_order,
    er_a2,
    er_fidelity_curve,
    er_first_order_mixing,
    predict_eps_max_pair,
    predict_eps_max_series,
    quasienergy_corrections,
    s2_split,
)

__version__ = "0.1.0"

__all__ = [
    "AngularMomentumRep",
    "ClassicalOrbitRecord",
    "CollapseCurves",
    "DegenerateQuasienergyError",
    "EpsMaxResult",
    "EpsMaxSolverConfig",
    "FloquetBuilder",
    "FloquetEigensystem",
    "HermitianOperator",
    "HusimiGrid",
    "ModelParams",
    "PhasePoint",
    "PowerLawFit",
    "ResonanceLabel",
    "ScalingPoint",
    "ScalingRun",
    "SingularOrbitError",
    "Spectrum",
    "StateSelection",
    "UptDegenerate",
    "UptNonDegenerate",
    "a2_coefficient",
    "a3_coefficient",
    "angular_momentum_matrices",
    "associate_states",
    "build_floquet",
    "build_h0",
    "build_kick",
    "classical_period",
    "classical_resonant_energy",
    "coherent_state",
    "collapse_curves",
    "collapse_deviation",
    "collapse_sizes",
    "cr_mismatch_over_j",
    "default_j_grid",
    "degenerate_block",
    "diagonalize",
    "diagonalize_unitary",
    "dominance_threshold",
    "eigenstate_first_order",
    "eigenstate_second_order",
    "energy_contour_seeds",
    "envelope_points",
    "epsilon_max",
    "er_a2",
    "er_fidelity_curve",
    "er_first_order_mixing",
    "extract_delta",
    "fidelity_complement",
    "fidelity_curve",
    "find_cr_state",
    "find_nr_state",
    "fit_power_law",
    "follow_single_branch",
    "h0_classical",
    "hermitian_product",
    "husimi",
    "kick_classical",
    "kick_in_eigenbasis",
    "kick_matrix_elements",
    "map_jacobian",
    "max_fidelity",
    "monotone_mismatch_subset",
    "one_period_map",
    "participation_ratio",
    "poincare_section",
    "predict_eps_max_pair",
    "predict_eps_max_series",
    "quantum_period",
    "quasienergy_corrections",
    "run_scaling",
    "s2_split",
    "select_state",
    "smooth_decay_subset",
    "solve_count",
    "strobe_clustering_sigma",
    "stroboscopic_map",
    "track_branch",
    "tune_tau_er",
    "unitarity_residual",
]
