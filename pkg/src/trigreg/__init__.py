"""Regularized trigonometric least squares on the circle.

Approximates noisy periodic signals sampled on equidistant grids by
penalized least squares in an orthonormal trigonometric basis, with
closed-form solves, diagnostics, and automatic selection of the
regularization parameter (discrepancy principle, L-curve, GCV, oracle)
plus a seeded experiment harness and a command-line interface.
"""

from .approximant import (
    RegularizedApproximant,
    condition_number,
    evaluate,
    evaluate_barycentric,
    lebesgue_bound,
    solve,
    stability_constant,
)
from .experiment import (
    NoisyRealization,
    SweepReport,
    SweepRow,
    add_noise_snr,
    gallery,
    gallery_names,
    l2_error,
    sweep,
    uniform_error,
    vallee_poussin,
    vallee_poussin_filter,
)
from .grid import (
    FourierCoefficients,
    HarmonicIndex,
    TrapezoidalGrid,
    analyze,
    basis_matrix,
    discrete_inner,
    eval_harmonic,
    harmonic_indices,
    make_grid,
    reduce_angle,
    synthesize,
    uniform_eval_points,
    weighted_norm,
)
from .penalty import (
    PenaltySequence,
    constant_penalty,
    laplace_penalty,
    sobolev_norm_truncated,
)
from .selection import (
    GridExhaustedError,
    InapplicableStrategyError,
    ParameterGrid,
    SelectionError,
    SelectionReport,
    gcv_bounds,
    gcv_trace,
    gcv_value,
    lcurve_curvature,
    parameter_grid,
    penalty_sq,
    penalty_sq_prime,
    residual_sq,
    residual_sq_prime,
    select_gcv,
    select_lcurve,
    select_morozov,
    select_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "RegularizedApproximant",
    "condition_number",
    "evaluate",
    "evaluate_barycentric",
    "lebesgue_bound",
    "solve",
    "stability_constant",
    "NoisyRealization",
    "SweepReport",
    "SweepRow",
    "add_noise_snr",
    "gallery",
    "gallery_names",
    "l2_error",
    "sweep",
    "uniform_error",
    "vallee_poussin",
    "vallee_poussin_filter",
    "FourierCoefficients",
    "HarmonicIndex",
    "TrapezoidalGrid",
    "analyze",
    "basis_matrix",
    "discrete_inner",
    "eval_harmonic",
    "harmonic_indices",
    "make_grid",
    "reduce_angle",
    "synthesize",
    "uniform_eval_points",
    "weighted_norm",
    "PenaltySequence",
    "constant_penalty",
    "laplace_penalty",
    "sobolev_norm_truncated",
    "GridExhaustedError",
    "InapplicableStrategyError",
    "ParameterGrid",
    "SelectionError",
    "SelectionReport",
    "gcv_bounds",
    "gcv_trace",
    "gcv_value",
    "lcurve_curvature",
    "parameter_grid",
    "penalty_sq",
    "penalty_sq_prime",
    "residual_sq",
    "residual_sq_prime",
    "select_gcv",
    "select_lcurve",
    "select_morozov",
    "select_oracle",
    "__version__",
]
