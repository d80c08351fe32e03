import logging
import re
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, JsonValue, PositiveFloat, field_validator, model_validator

from regionclust.errors import InvalidInputError
from regionclust.graphs import Adjacency, ContiguityGraph, grid_graph
from regionclust.models import GaussianSpec, ModelSpec, ModelVariant, default_hyperparams
from regionclust.utilities.helpers.io import read_edge_list

logger = logging.getLogger(__name__)

AUTO = "auto"
GRID_PATTERN = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


class HyperparameterOverrideError(ValueError):
    """
    An exception raised when hyperparameters are overridden for a model that does not take them.

    Parameters:
        model (ModelVariant): The selected observation model.
        names (list[str]): The overridden hyperparameters.
    """

    def __init__(self, model: ModelVariant, names: list[str]) -> None:
        super().__init__(f"Hyperparameters {names} only apply to the gaussian-diag model, not {model.value}")


def _parse_vector(value: Any) -> Any:  # noqa: ANN401
    if value is None or (isinstance(value, str) and value.strip().lower() == AUTO):
        return None
    if isinstance(value, str):
        return tuple(float(item) for item in value.split(",") if item.strip())
    if isinstance(value, int | float):
        return (float(value),)
    return value


class RunConfig(BaseModel):
    """
    A model representing one clustering run, validated from command-line flags.

    Parameters:
        model (ModelVariant): Observation model.
        tau (float | None): Prior precision scale of the Gaussian means, ``None`` for auto.
        kappa (float | None): Gamma shape of the Gaussian precisions, ``None`` for auto.
        beta (tuple[float, ...] | None): Gamma rate per dimension, or one value for all; ``None`` for auto.
        mu (tuple[float, ...] | None): Prior mean per dimension, or one value for all; ``None`` for auto.
        alpha (float): Cluster-count prior parameter in ``(0, 1]``.

        features (Path): Feature table, one row per node.
        graph (Path | None): Edge-list file; exclusive with ``grid``.
        grid (tuple[int, int] | None): ``(rows, cols)`` of a lattice graph over row-major nodes.
        adjacency (Adjacency): Lattice neighbourhood for ``grid``.
        alr_ref (str | None): Reference column for additive log-ratio preprocessing.
        alr_epsilon (float): Floor applied to shares before the log-ratio.

        out (Path): Result document path.
        cut_at (tuple[int, ...]): Extra cluster counts to emit assignments for.
        seed (int | None): Random seed, echoed for reproducibility.
    """

    model_config = ConfigDict(frozen=True)

    model: ModelVariant = ModelVariant.GAUSSIAN
    tau: PositiveFloat | None = None
    kappa: PositiveFloat | None = None
    beta: tuple[PositiveFloat, ...] | None = None
    mu: tuple[float, ...] | None = None
    alpha: float = Field(default=1.0, gt=0.0, le=1.0)

    features: Path
    graph: Path | None = None
    grid: tuple[int, int] | None = None
    adjacency: Adjacency = Adjacency.ROOK
    alr_ref: str | None = None
    alr_epsilon: PositiveFloat = 1e-6

    out: Path = Path("result.json")
    cut_at: tuple[int, ...] = ()
    seed: int | None = None

    @field_validator("tau", "kappa", mode="before")
    @classmethod
    def parse_scalar(cls, value: Any) -> Any:  # noqa: ANN401
        if isinstance(value, str) and value.strip().lower() == AUTO:
            return None
        return value

    @field_validator("beta", "mu", mode="before")
    @classmethod
    def parse_vector(cls, value: Any) -> Any:  # noqa: ANN401
        return _parse_vector(value)

    @field_validator("grid", mode="before")
    @classmethod
    def parse_grid(cls, value: Any) -> Any:  # noqa: ANN401
        if isinstance(value, str):
            match = GRID_PATTERN.match(value)
            if not match:
                msg = f"Grid must look like ROWSxCOLS, got {value!r}"
                raise ValueError(msg)
            return int(match.group(1)), int(match.group(2))
        return value

    @field_validator("grid")
    @classmethod
    def positive_grid(cls, value: tuple[int, int] | None) -> tuple[int, int] | None:
        if value is not None and min(value) < 1:
            msg = f"Grid dimensions must be positive, got {value[0]}x{value[1]}"
            raise ValueError(msg)
        return value

    @field_validator("cut_at", mode="before")
    @classmethod
    def none_to_empty(cls, value: Any) -> Any:  # noqa: ANN401
        return () if value is None else value

    @model_validator(mode="after")
    def check_sources(self) -> "RunConfig":
        if (self.graph is None) == (self.grid is None):
            msg = "Exactly one of --graph and --grid is required"
            raise ValueError(msg)
        overridden = [name for name in ("tau", "kappa", "beta", "mu") if getattr(self, name) is not None]
        if overridden and self.model is not ModelVariant.GAUSSIAN:
            raise HyperparameterOverrideError(self.model, overridden)
        if any(k < 1 for k in self.cut_at):
            msg = f"--cut-at values must be positive, got {list(self.cut_at)}"
            raise ValueError(msg)
        return self

    def resolve_spec(self, features: np.ndarray) -> tuple[ModelSpec, dict[str, JsonValue]]:
        """
        Resolve "auto" hyperparameters against the data.

        Parameters:
            features (np.ndarray): Preprocessed ``N x dims`` feature matrix.

        Returns:
            tuple[ModelSpec, dict[str, JsonValue]]: The model and the echo written into the result metadata.

        Raises:
            pydantic.ValidationError: If an override has the wrong number of dimensions.
        """
        spec = default_hyperparams(features, self.model)
        auto = [name for name in ("tau", "kappa", "beta", "mu") if getattr(self, name) is None]
        if isinstance(spec, GaussianSpec):
            dims = spec.dims
            values = spec.model_dump()
            if self.tau is not None:
                values["tau"] = self.tau
            if self.kappa is not None:
                values["kappa"] = self.kappa
            if self.beta is not None:
                values["beta"] = self.beta * dims if len(self.beta) == 1 else self.beta
            if self.mu is not None:
                values["mu0"] = self.mu * dims if len(self.mu) == 1 else self.mu
            spec = GaussianSpec.model_validate(values)
            logger.debug("Resolved gaussian-diag hyperparameters; auto: %s", auto)
        return spec, self.echo(spec, auto)

    def echo(self, spec: ModelSpec, auto: list[str]) -> dict[str, JsonValue]:
        echoed: dict[str, JsonValue] = self.model_dump(mode="json")
        echoed["auto_hyperparameters"] = list(auto) if isinstance(spec, GaussianSpec) else []
        return echoed

    def load_graph(self, n: int) -> ContiguityGraph:
        """
        Build the contiguity graph over ``n`` nodes.

        Raises:
            InvalidInputError: If the grid does not hold ``n`` cells.
            InputFileError: If the edge list cannot be read.
        """
        if self.grid is not None:
            rows, cols = self.grid
            if rows * cols != n:
                raise InvalidInputError(f"A {rows}x{cols} grid has {rows * cols} cells for {n} feature rows")
            return grid_graph(rows, cols, self.adjacency)
        if self.graph is None:
            raise InvalidInputError("No graph source given")
        return read_edge_list(self.graph, n)
