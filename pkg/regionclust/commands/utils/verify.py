import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path

import numpy as np
from rich.console import Console
from rich.table import Table

from regionclust.config import config
from regionclust.errors import InvalidInputError
from regionclust.oracle import EnumerationBudget, random_connected_graph
from regionclust.utilities.cmdtools import CommandRegistry
from regionclust.utilities.helpers.io import read_edge_list
from regionclust.verification import verify_graph

logger = logging.getLogger(__name__)


def configure(parser: ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", type=Path, help="edge list of 0-based node pairs")
    source.add_argument("--random", type=int, metavar="N", help="random connected graph with N nodes")
    parser.add_argument("--nodes", type=int, help="node count of --graph (default: largest index + 1)")
    parser.add_argument("--edge-probability", type=float, default=0.3, help="extra-edge probability for --random")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-nodes", type=int, default=config.ORACLE_MAX_NODES)
    parser.add_argument("--max-trees", type=int, default=config.ORACLE_MAX_TREES)
    parser.add_argument("--max-partitions", type=int, default=config.ORACLE_MAX_PARTITIONS)


def verify(args: Namespace) -> int:
    """Cross-check the fast routines against brute-force enumeration on a small graph.

    Exit code 0 when every check passes, 3 for a disconnected graph, 1 otherwise.

    Usage:
        regionclust verify --graph edges.txt
        regionclust verify --random 6 --seed 1
    """
    if args.graph is not None:
        g = read_edge_list(args.graph, args.nodes)
    else:
        g = random_connected_graph(args.random, args.edge_probability, np.random.default_rng(args.seed))
    budget = EnumerationBudget(max_nodes=args.max_nodes, max_trees=args.max_trees, max_partitions=args.max_partitions)
    report = verify_graph(g, budget, seed=args.seed)

    table = Table(title=f"Verification on {report.n} nodes, {report.edges} edges")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for check in report.checks:
        table.add_row(check.name, "[green]pass[/green]" if check.passed else "[red]FAIL[/red]", check.detail)
    Console().print(table)

    if report.passed:
        return 0
    if not report.checks[0].passed:
        logger.error("Graph is disconnected")
        return InvalidInputError.exit_code
    logger.error("%d check(s) failed", sum(not check.passed for check in report.checks))
    return 1


CommandRegistry.register(
    name="verify",
    description=verify.__doc__,
    configure=configure,
    handler=verify,
)
