"""Pathwise solver and verification harness for SDEs driven by Wiener
noise, rough fractional noise, and finite-activity jumps.

The package splits into driver generation (`noise`), the pathwise
integral machinery (`fractional`, `norms`), the jump-restart Euler
solver (`solver`, `models`), Monte Carlo verification suites
(`analysis`), and a config-driven CLI (`config`, `cli`).
"""

from .analysis import (
    DEFAULT_THRESHOLDS,
    Ensemble,
    JumpMomentReport,
    KernelReport,
    LemmaReport,
    MomentTable,
    SelfSimReport,
    TailReport,
    Thresholds,
    estimate_moments,
    simulate_ensemble,
    tail_diagnostic,
    verify_jump_product_moment,
    verify_kernel_estimates,
    verify_pathwise_lemma,
    verify_self_similarity,
)
from .config import RunConfig, load_config, parse_config, serialize_config
from .errors import BlowUpError, EmbeddingError, GridMismatchError, ParameterError
from .fractional import (
    FracDerivative,
    GridFunction,
    forward_sum_integral,
    gls_integral,
    integral_bound_rhs,
    rl_left_derivative,
    rl_right_derivative,
)
from .models import MODELS, build_model
from .noise import (
    FracParams,
    GaussianMarks,
    GridSpec,
    JumpTrain,
    MarkLaw,
    SamplePath,
    Seed,
    TwoPointMarks,
    UniformMarks,
    build_mark_law,
    gen_driving_triple,
    gen_fbm,
    gen_jump_train,
    gen_wiener,
)
from .norms import (
    NormParams,
    NormReport,
    capital_lambda,
    evaluate_norms,
    grr_functional,
    norm_0_interval,
    norm_inf,
    norm_profile,
    norm_t,
    weighted_norms,
)
from .solver import (
    AssumptionReport,
    CoefficientSet,
    SamplingBox,
    SegmentProblem,
    SolutionPath,
    check_assumptions,
    euler_paths,
    ito_integral_path,
    pathwise_bound_rhs,
    read_solution_csv,
    solve_segment,
    solve_with_jumps,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport", "BlowUpError", "CoefficientSet", "DEFAULT_THRESHOLDS",
    "EmbeddingError", "Ensemble", "FracDerivative", "FracParams",
    "GaussianMarks", "GridFunction", "GridMismatchError", "GridSpec",
    "JumpMomentReport", "JumpTrain", "KernelReport", "LemmaReport", "MODELS",
    "MarkLaw", "MomentTable", "NormParams", "NormReport", "ParameterError",
    "RunConfig", "SamplePath", "SamplingBox", "Seed", "SegmentProblem",
    "SelfSimReport", "SolutionPath", "TailReport", "Thresholds",
    "TwoPointMarks", "UniformMarks", "build_mark_law", "build_model",
    "capital_lambda", "check_assumptions", "estimate_moments", "euler_paths",
    "evaluate_norms", "forward_sum_integral", "gen_driving_triple", "gen_fbm",
    "gen_jump_train", "gen_wiener", "gls_integral", "grr_functional",
    "integral_bound_rhs", "ito_integral_path", "load_config", "norm_0_interval",
    "norm_inf", "norm_profile", "norm_t", "parse_config", "pathwise_bound_rhs",
    "read_solution_csv", "rl_left_derivative", "rl_right_derivative",
    "serialize_config", "simulate_ensemble", "solve_segment",
    "solve_with_jumps", "tail_diagnostic", "verify_jump_product_moment",
    "verify_kernel_estimates", "verify_pathwise_lemma",
    "verify_self_similarity", "weighted_norms",
]
