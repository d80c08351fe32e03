"""Property checks of the fast routines against the brute-force references."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from regionclust.errors import NumericalError
from regionclust.graphs import (
    ContiguityGraph,
    Partition,
    contract_edge,
    is_connected,
    log_compatible_tree_count,
    log_tree_count,
    quotient_multigraph,
)
from regionclust.inference.prior import log_factorial, log_partition_prior
from regionclust.oracle import (
    EnumerationBudget,
    count_compatible_trees,
    count_spanning_trees,
    enumerate_compatible_partitions,
    enumerate_spanning_trees,
)

logger = logging.getLogger(__name__)

LOG_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class VerificationReport:
    n: int
    edges: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)


def _matrix_tree(g: ContiguityGraph, budget: EnumerationBudget, _: np.random.Generator) -> CheckResult:
    exact = count_spanning_trees(g, budget)
    listed = len(enumerate_spanning_trees(g, budget))
    log_count = log_tree_count(g)
    passed = exact == listed and abs(log_count - math.log(exact)) <= LOG_TOLERANCE
    detail = f"enumerated {listed}, recurrence {exact}, exp(log det) {math.exp(log_count):.6f}"
    return CheckResult("matrix-tree", passed, detail)


def _deletion_contraction(g: ContiguityGraph, budget: EnumerationBudget, _: np.random.Generator) -> CheckResult:
    mg = quotient_multigraph(g, Partition.singletons(g.n))
    total = count_spanning_trees(mg, budget)
    failures = [
        (u, v)
        for (u, v), multiplicity in mg.edges.items()
        if total
        != multiplicity * count_spanning_trees(contract_edge(mg, u, v), budget)
        + count_spanning_trees(mg.without_edge(u, v), budget)
    ]
    return CheckResult("deletion-contraction", not failures, f"{len(mg.edges)} edges, failing {failures}")


def _sample_partitions(
    g: ContiguityGraph,
    budget: EnumerationBudget,
    rng: np.random.Generator,
    samples: int,
) -> list[Partition]:
    chosen: list[Partition] = []
    for k in range(1, g.n + 1):
        partitions = enumerate_compatible_partitions(g, k, budget, ordered=False)
        picks = rng.choice(len(partitions), size=min(samples, len(partitions)), replace=False)
        chosen.extend(partitions[int(index)] for index in sorted(picks))
    return chosen


def _compatible_trees(g: ContiguityGraph, budget: EnumerationBudget, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    checked = 0
    for partition in _sample_partitions(g, budget, rng, 3):
        exact = count_compatible_trees(g, partition, budget)
        worst = max(worst, abs(log_compatible_tree_count(g, partition) - math.log(exact)))
        checked += 1
    return CheckResult("compatible-trees", worst <= LOG_TOLERANCE, f"{checked} partitions, max log error {worst:.2e}")


def _prior_normalization(g: ContiguityGraph, budget: EnumerationBudget, _: np.random.Generator) -> CheckResult:
    worst = 0.0
    for k in range(1, g.n + 1):
        # every ordering of the same clusters has the same prior mass
        mass = sum(
            math.exp(float(log_partition_prior(g, partition)) + log_factorial(k))
            for partition in enumerate_compatible_partitions(g, k, budget, ordered=False)
        )
        worst = max(worst, abs(mass - 1.0))
    return CheckResult("prior-normalization", worst <= LOG_TOLERANCE, f"max |mass - 1| {worst:.2e} over K=1..{g.n}")


def _bound_soundness(g: ContiguityGraph, budget: EnumerationBudget, rng: np.random.Generator) -> CheckResult:
    checked, violations = 0, 0
    for partition in _sample_partitions(g, budget, rng, 3):
        quotient = quotient_multigraph(g, partition)
        trees = count_spanning_trees(quotient, budget)
        for (a, b), cut in quotient.edges.items():
            contracted = count_spanning_trees(contract_edge(quotient, a, b), budget)
            # deletion-contraction leaves the quotient ratio at or below 1 / cut
            violations += contracted * cut > trees
            checked += 1
    return CheckResult("bound-soundness", violations == 0, f"{checked} adjacent pairs, {violations} violations")


CHECKS: dict[str, Callable[[ContiguityGraph, EnumerationBudget, np.random.Generator], CheckResult]] = {
    "matrix-tree": _matrix_tree,
    "deletion-contraction": _deletion_contraction,
    "compatible-trees": _compatible_trees,
    "prior-normalization": _prior_normalization,
    "bound-soundness": _bound_soundness,
}


def verify_graph(g: ContiguityGraph, budget: EnumerationBudget | None = None, seed: int = 0) -> VerificationReport:
    """
    Run every property check on ``g``.

    A disconnected graph yields a single failed ``connectivity`` check. Budget
    overflows propagate as errors.
    """
    budget = budget or EnumerationBudget()
    budget.check_nodes(g.n)
    report = VerificationReport(n=g.n, edges=g.edge_count)
    if not is_connected(g):
        report.checks.append(CheckResult("connectivity", passed=False, detail="graph is disconnected"))
        return report
    report.checks.append(CheckResult("connectivity", passed=True, detail="graph is connected"))
    rng = np.random.default_rng(seed)
    for name, check in CHECKS.items():
        try:
            result = check(g, budget, rng)
        except NumericalError as exc:
            result = CheckResult(name, passed=False, detail=str(exc))
        logger.debug("%s: %s (%s)", result.name, "pass" if result.passed else "fail", result.detail)
        report.checks.append(result)
    return report
