from argparse import ArgumentParser, Namespace
from pathlib import Path

from rich.console import Console

from regionclust.utilities.cmdtools import CommandRegistry
from regionclust.utilities.helpers import normalized_mutual_information
from regionclust.utilities.helpers.io import read_labels


def configure(parser: ArgumentParser) -> None:
    parser.add_argument("labels_a", type=Path, help="labels in the last column, header row first")
    parser.add_argument("labels_b", type=Path)


def eval_nmi(args: Namespace) -> int:
    """Normalized mutual information between two labelings (arithmetic-mean normalization).

    Usage:
        regionclust eval-nmi truth.csv result_assignments.csv
    """
    value = normalized_mutual_information(read_labels(args.labels_a), read_labels(args.labels_b))
    Console().print(f"{value:.6f}")
    return 0


CommandRegistry.register(
    name="eval-nmi",
    description=eval_nmi.__doc__,
    configure=configure,
    handler=eval_nmi,
)
