from .observation import (
    DimensionMismatchError,
    GaussianSpec,
    ModelSpec,
    ModelVariant,
    MultinomialSpec,
    NegativeCountError,
    PoissonSpec,
    SuffStats,
    VariantMismatchError,
    as_matrix,
    cluster_stats,
    combine,
    combine_all,
    default_hyperparams,
    delta_lobs,
    empty_stats,
    log_marginal,
    suff_stats,
    suff_stats_matrix,
)

__all__ = [
    "DimensionMismatchError",
    "GaussianSpec",
    "ModelSpec",
    "ModelVariant",
    "MultinomialSpec",
    "NegativeCountError",
    "PoissonSpec",
    "SuffStats",
    "VariantMismatchError",
    "as_matrix",
    "cluster_stats",
    "combine",
    "combine_all",
    "default_hyperparams",
    "delta_lobs",
    "empty_stats",
    "log_marginal",
    "suff_stats",
    "suff_stats_matrix",
]
