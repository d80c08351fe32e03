"""
Conjugate exponential-family observation models.

Every cluster is summarized by additive sufficient statistics; the integrated
log-likelihood of a cluster is a closed form of those statistics only.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator
from scipy.special import gammaln

from regionclust.errors import InvalidInputError

logger = logging.getLogger(__name__)

LOG_2PI = float(np.log(2.0 * np.pi))
VARIANCE_FLOOR = 1e-8


class ModelVariant(str, Enum):
    GAUSSIAN = "gaussian-diag"
    POISSON = "poisson"
    MULTINOMIAL = "multinomial"


class DimensionMismatchError(InvalidInputError):
    def __init__(self, expected: int, got: int) -> None:
        super().__init__(f"Expected {expected} feature(s), got {got}")


class NegativeCountError(InvalidInputError):
    def __init__(self, variant: ModelVariant) -> None:
        super().__init__(f"The {variant.value} model requires non-negative integer counts")


class VariantMismatchError(InvalidInputError):
    def __init__(self, left: ModelVariant, right: ModelVariant) -> None:
        super().__init__(f"Cannot combine {left.value} statistics with {right.value} statistics")


class GaussianSpec(BaseModel):
    """
    Diagonal Gaussian with a Normal-Gamma prior per dimension.

    ``mu | V ~ N(mu0, 1 / (tau * V))`` and ``V ~ Gamma(kappa, rate=beta)``.
    """

    model_config = ConfigDict(frozen=True)

    variant: Literal["gaussian-diag"] = "gaussian-diag"
    mu0: tuple[float, ...]
    tau: PositiveFloat = 0.01
    kappa: PositiveFloat = 1.0
    beta: tuple[PositiveFloat, ...]

    @model_validator(mode="after")
    def check_lengths(self) -> "GaussianSpec":
        if len(self.mu0) != len(self.beta) or not self.mu0:
            msg = f"mu0 and beta must have the same positive length, got {len(self.mu0)} and {len(self.beta)}"
            raise ValueError(msg)
        return self

    @property
    def dims(self) -> int:
        return len(self.mu0)


class PoissonSpec(BaseModel):
    """Independent Poisson counts per dimension with Gamma(shape, rate) priors."""

    model_config = ConfigDict(frozen=True)

    variant: Literal["poisson"] = "poisson"
    shape: tuple[PositiveFloat, ...]
    rate: tuple[PositiveFloat, ...]

    @model_validator(mode="after")
    def check_lengths(self) -> "PoissonSpec":
        if len(self.shape) != len(self.rate) or not self.shape:
            msg = f"shape and rate must have the same positive length, got {len(self.shape)} and {len(self.rate)}"
            raise ValueError(msg)
        return self

    @property
    def dims(self) -> int:
        return len(self.shape)


class MultinomialSpec(BaseModel):
    """Category counts with a Dirichlet prior."""

    model_config = ConfigDict(frozen=True)

    variant: Literal["multinomial"] = "multinomial"
    concentration: tuple[PositiveFloat, ...] = Field(min_length=1)

    @property
    def dims(self) -> int:
        return len(self.concentration)


ModelSpec = Annotated[GaussianSpec | PoissonSpec | MultinomialSpec, Field(discriminator="variant")]


@dataclass(frozen=True, eq=False)
class SuffStats:
    """
    Additive summary of a cluster.

    Parameters:
        variant (ModelVariant): Model the statistics belong to.
        n (int): Number of aggregated observations.
        total (np.ndarray): Per-dimension sum (Gaussian, Poisson) or category totals (Multinomial).
        squares (np.ndarray | None): Per-dimension sum of squares, Gaussian only.
    """

    variant: ModelVariant
    n: int
    total: np.ndarray
    squares: np.ndarray | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuffStats):
            return NotImplemented
        return (
            self.variant is other.variant
            and self.n == other.n
            and np.array_equal(self.total, other.total)
            and (self.squares is None) == (other.squares is None)
            and (self.squares is None or np.array_equal(self.squares, other.squares))
        )


def as_matrix(features: np.ndarray) -> np.ndarray:
    """Float ``N x dims`` view; a 1-d array is one column."""
    matrix = np.asarray(features, dtype=np.float64)
    return matrix.reshape(-1, 1) if matrix.ndim == 1 else matrix


def _variant(spec: ModelSpec) -> ModelVariant:
    return ModelVariant(spec.variant)


def _check_rows(x: np.ndarray, spec: ModelSpec) -> None:
    if x.shape[-1] != spec.dims:
        raise DimensionMismatchError(spec.dims, x.shape[-1])
    variant = _variant(spec)
    if variant is not ModelVariant.GAUSSIAN and (np.any(x < 0) or np.any(x != np.floor(x))):
        raise NegativeCountError(variant)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("Features must be finite numbers")


def empty_stats(spec: ModelSpec) -> SuffStats:
    variant = _variant(spec)
    squares = np.zeros(spec.dims) if variant is ModelVariant.GAUSSIAN else None
    return SuffStats(variant=variant, n=0, total=np.zeros(spec.dims), squares=squares)


def suff_stats(x: Iterable[float] | np.ndarray, spec: ModelSpec) -> SuffStats:
    """
    Statistics of a single observation.

    Raises:
        DimensionMismatchError: If ``x`` does not have ``spec.dims`` entries.
        NegativeCountError: If a count model receives negative or fractional values.
    """
    row = np.atleast_1d(np.asarray(x, dtype=np.float64))
    _check_rows(row, spec)
    variant = _variant(spec)
    squares = row**2 if variant is ModelVariant.GAUSSIAN else None
    return SuffStats(variant=variant, n=1, total=row.copy(), squares=squares)


def suff_stats_matrix(features: np.ndarray, spec: ModelSpec) -> list[SuffStats]:
    """Per-row statistics of an ``N x dims`` matrix, validated once."""
    matrix = as_matrix(features)
    _check_rows(matrix, spec)
    variant = _variant(spec)
    squares = matrix**2 if variant is ModelVariant.GAUSSIAN else None
    return [
        SuffStats(variant=variant, n=1, total=matrix[i], squares=None if squares is None else squares[i])
        for i in range(matrix.shape[0])
    ]


def cluster_stats(features: np.ndarray, nodes: Iterable[int], spec: ModelSpec) -> SuffStats:
    """Statistics of the rows listed in ``nodes``."""
    matrix = as_matrix(features)
    rows = matrix[sorted(nodes)]
    _check_rows(rows, spec)
    variant = _variant(spec)
    squares = (rows**2).sum(axis=0) if variant is ModelVariant.GAUSSIAN else None
    return SuffStats(variant=variant, n=rows.shape[0], total=rows.sum(axis=0), squares=squares)


def combine(a: SuffStats, b: SuffStats) -> SuffStats:
    """
    Statistics of the union of two disjoint groups.

    Raises:
        VariantMismatchError: If the statistics come from different models.
        DimensionMismatchError: If dimensionalities differ.
    """
    if a.variant is not b.variant:
        raise VariantMismatchError(a.variant, b.variant)
    if a.total.shape != b.total.shape:
        raise DimensionMismatchError(a.total.shape[0], b.total.shape[0])
    squares = None if a.squares is None or b.squares is None else a.squares + b.squares
    return SuffStats(variant=a.variant, n=a.n + b.n, total=a.total + b.total, squares=squares)


def combine_all(stats: Iterable[SuffStats], spec: ModelSpec) -> SuffStats:
    return reduce(combine, stats, empty_stats(spec))


def _gaussian_log_marginal(t: SuffStats, spec: GaussianSpec) -> float:
    mu0 = np.asarray(spec.mu0)
    beta = np.asarray(spec.beta)
    tau, kappa, n = spec.tau, spec.kappa, t.n
    squares = t.squares if t.squares is not None else np.zeros_like(t.total)
    kappa_n = kappa + 0.5 * n
    tau_n = tau + n
    # sum of squares around the posterior mean plus the prior-mean shrinkage term
    spread = squares + tau * mu0**2 - (tau * mu0 + t.total) ** 2 / tau_n
    beta_n = beta + 0.5 * np.maximum(spread, 0.0)
    per_dim = (
        -0.5 * n * LOG_2PI
        + 0.5 * (np.log(tau) - np.log(tau_n))
        + kappa * np.log(beta)
        - kappa_n * np.log(beta_n)
        + gammaln(kappa_n)
        - gammaln(kappa)
    )
    return float(per_dim.sum())


def _poisson_log_marginal(t: SuffStats, spec: PoissonSpec) -> float:
    shape = np.asarray(spec.shape)
    rate = np.asarray(spec.rate)
    per_dim = (
        shape * np.log(rate)
        - gammaln(shape)
        + gammaln(shape + t.total)
        - (shape + t.total) * np.log(rate + t.n)
    )
    return float(per_dim.sum())


def _multinomial_log_marginal(t: SuffStats, spec: MultinomialSpec) -> float:
    alpha = np.asarray(spec.concentration)
    return float(
        gammaln(alpha.sum())
        - gammaln(alpha.sum() + t.total.sum())
        + np.sum(gammaln(alpha + t.total) - gammaln(alpha)),
    )


def log_marginal(t: SuffStats, spec: ModelSpec) -> float:
    """
    Integrated log-likelihood of a cluster given its statistics.

    Base measures that depend on the data only (``log x!`` for Poisson,
    multinomial coefficients) are left out; the Gaussian ``2 pi`` term
    depends on ``n`` only and is kept. Empty statistics give 0.
    """
    if t.variant is not _variant(spec):
        raise VariantMismatchError(t.variant, _variant(spec))
    if t.total.shape[0] != spec.dims:
        raise DimensionMismatchError(spec.dims, t.total.shape[0])
    if t.n == 0:
        return 0.0
    if isinstance(spec, GaussianSpec):
        return _gaussian_log_marginal(t, spec)
    if isinstance(spec, PoissonSpec):
        return _poisson_log_marginal(t, spec)
    return _multinomial_log_marginal(t, spec)


def delta_lobs(tg: SuffStats, th: SuffStats, spec: ModelSpec) -> float:
    """Change of the integrated log-likelihood when two clusters are merged."""
    return log_marginal(combine(tg, th), spec) - log_marginal(tg, spec) - log_marginal(th, spec)


def default_hyperparams(features: np.ndarray, variant: ModelVariant | str) -> ModelSpec:
    """
    Empirical-Bayes defaults from the data matrix.

    Gaussian: ``tau=0.01``, ``kappa=1``, ``beta=0.1 * s^2`` per column and
    ``mu0`` the column means. Poisson: shape 1 and rate ``1 / mean``.
    Multinomial: unit concentration.

    Raises:
        InvalidInputError: If fewer than two rows are given for the Gaussian model.
    """
    matrix = as_matrix(features)
    variant = ModelVariant(variant)
    if variant is ModelVariant.GAUSSIAN:
        if matrix.shape[0] < 2:  # noqa: PLR2004
            raise InvalidInputError("At least two observations are needed to estimate variances")
        beta = 0.1 * matrix.var(axis=0, ddof=1)
        floored = beta < VARIANCE_FLOOR
        if floored.any():
            columns = np.flatnonzero(floored).tolist()
            logger.warning("Zero-variance column(s) %s: beta floored at %g", columns, VARIANCE_FLOOR)
        beta = np.maximum(beta, VARIANCE_FLOOR)
        return GaussianSpec(mu0=tuple(matrix.mean(axis=0)), tau=0.01, kappa=1.0, beta=tuple(beta))
    if variant is ModelVariant.POISSON:
        means = matrix.mean(axis=0)
        if np.any(means < VARIANCE_FLOOR):
            logger.warning("All-zero count column(s): mean floored at %g", VARIANCE_FLOOR)
        means = np.maximum(means, VARIANCE_FLOOR)
        return PoissonSpec(shape=(1.0,) * matrix.shape[1], rate=tuple(1.0 / means))
    return MultinomialSpec(concentration=(1.0,) * matrix.shape[1])
