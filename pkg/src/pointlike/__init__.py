"""Energy-dependent pointlike interactions in one dimension.

Regulated finite-range potentials V_a = v_a'' / v_a, their zero-range limits
with energy-dependent connection conditions, ring spectra with modified inner
products, capture dynamics, and chains of pointlike sites converging to
energy-dependent potentials.
"""

from .chain import (
    ChainSpec,
    convergence_table,
    ring_trace,
    solve_chain_spectrum,
    solve_continuum,
)
from .dynamics import (
    InitialState,
    captured_at_origin,
    completeness_check,
    decay_exponent,
    evolve_finite,
    evolve_infinite,
    finite_capture_curve,
    infinite_capture_curve,
    modes_for_completeness,
    overlaps,
)
from .errors import (
    BracketError,
    DomainError,
    FitError,
    GuardBandError,
    ModelMismatch,
    NoConvergence,
    NoPointMass,
    PointlikeError,
    QuadratureError,
    StiffnessError,
    TruncationError,
)
from .regulated import (
    Kind,
    RegulatedPotentialSpec,
    ShapeFunctions,
    eval_potential,
    eval_v,
    eval_v_derivatives,
    eval_w,
    fundamental_solutions,
    tanh_shapes,
    zero_energy_residual,
)
from .solver import (
    ConnectionEstimate,
    WaveSolution,
    convergence_study,
    extract_connection,
    integrate,
    jump_target,
    picard_solve,
)
from .spectrum import (
    ConnectionMatrix,
    EigenMode,
    PointlikeModel,
    RingFunction,
    alpha,
    duality_residual,
    eigenfunction,
    energy_functional,
    gram_matrix,
    inner_product,
    mode_function,
    quantization_residual,
    solve_modes,
    standard_product,
    two_particle_reduce,
)

__all__ = [
    "Kind",
    "RegulatedPotentialSpec",
    "ShapeFunctions",
    "tanh_shapes",
    "eval_potential",
    "eval_v",
    "eval_v_derivatives",
    "eval_w",
    "fundamental_solutions",
    "zero_energy_residual",
    "WaveSolution",
    "ConnectionEstimate",
    "integrate",
    "picard_solve",
    "extract_connection",
    "convergence_study",
    "jump_target",
    "PointlikeModel",
    "EigenMode",
    "ConnectionMatrix",
    "RingFunction",
    "alpha",
    "quantization_residual",
    "solve_modes",
    "eigenfunction",
    "mode_function",
    "standard_product",
    "inner_product",
    "gram_matrix",
    "energy_functional",
    "two_particle_reduce",
    "duality_residual",
    "InitialState",
    "captured_at_origin",
    "overlaps",
    "evolve_finite",
    "finite_capture_curve",
    "modes_for_completeness",
    "completeness_check",
    "evolve_infinite",
    "infinite_capture_curve",
    "decay_exponent",
    "ChainSpec",
    "ring_trace",
    "solve_chain_spectrum",
    "solve_continuum",
    "convergence_table",
    "PointlikeError",
    "DomainError",
    "QuadratureError",
    "StiffnessError",
    "GuardBandError",
    "FitError",
    "NoConvergence",
    "BracketError",
    "TruncationError",
    "ModelMismatch",
    "NoPointMass",
]
