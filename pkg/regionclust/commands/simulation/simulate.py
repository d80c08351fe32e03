import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path

from regionclust.graphs import Adjacency
from regionclust.simulation import simulate_blocks
from regionclust.utilities.cmdtools import CommandRegistry
from regionclust.utilities.helpers.io import write_assignments, write_edge_list, write_features

logger = logging.getLogger(__name__)


def configure(parser: ArgumentParser) -> None:
    parser.add_argument("--rows", type=int, default=30)
    parser.add_argument("--cols", type=int, default=30)
    parser.add_argument("--sigma", type=float, default=0.5, help="noise standard deviation")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--adjacency", choices=[a.value for a in Adjacency], default=Adjacency.ROOK.value)
    parser.add_argument("--out", type=Path, default=Path(), help="output directory")


def simulate(args: Namespace) -> int:
    """Draw a noisy 3x3 block image with its true labels and lattice graph.

    Writes features.csv, labels.csv and edges.txt into --out.

    Usage:
        regionclust simulate --rows 30 --cols 30 --sigma 0.5 --seed 1 --out data/
    """
    image = simulate_blocks(args.rows, args.cols, args.sigma, args.seed, args.adjacency)
    write_features(args.out / "features.csv", image.features, ["value"])
    write_assignments(args.out / "labels.csv", image.labels.tolist())
    write_edge_list(args.out / "edges.txt", image.graph)
    logger.info("Simulated %dx%d image (sigma %g) into %s", args.rows, args.cols, args.sigma, args.out)
    return 0


CommandRegistry.register(
    name="simulate",
    description=simulate.__doc__,
    configure=configure,
    handler=simulate,
)
