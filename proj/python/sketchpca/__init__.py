"""Element-wise matrix sketches and sparse principal components."""

from ._core import (
    ComponentSet,
    ConvergenceFailure,
    DistributionKind,
    LeverageScores,
    Matrix,
    MixingProfile,
    SamplingDistribution,
    SketchResult,
    SpectralSummary,
    __version__,
    brute_force_spca,
    center_columns,
    exact_pca,
    gamma_bound,
    generate,
    gram_apply,
    hybrid_probabilities,
    iter_sparse_pca,
    leverage_probabilities,
    leverage_scores,
    load_matrix,
    norms,
    optimize_alpha,
    recovery_gap,
    rho_squared,
    sample_complexity,
    sample_sketch,
    save_matrix,
    select_threshold,
    spectral_deviation,
    threshold_sketch,
    truncate_components,
    uniform_probabilities,
    variance,
    xi_table,
)

__all__ = [
    "ComponentSet",
    "ConvergenceFailure",
    "DistributionKind",
    "LeverageScores",
    "Matrix",
    "MixingProfile",
    "SamplingDistribution",
    "SketchResult",
    "SpectralSummary",
    "__version__",
    "brute_force_spca",
    "center_columns",
    "exact_pca",
    "gamma_bound",
    "generate",
    "gram_apply",
    "hybrid_probabilities",
    "iter_sparse_pca",
    "leverage_probabilities",
    "leverage_scores",
    "load_matrix",
    "norms",
    "optimize_alpha",
    "recovery_gap",
    "rho_squared",
    "sample_complexity",
    "sample_sketch",
    "save_matrix",
    "select_threshold",
    "spectral_deviation",
    "threshold_sketch",
    "truncate_components",
    "uniform_probabilities",
    "variance",
    "xi_table",
]
