import logging
import time
from argparse import ArgumentParser, Namespace
from pathlib import Path

from regionclust.graphs import Adjacency
from regionclust.inference import build_dendrogram, cut_at_k, fit, render_dendrogram
from regionclust.models import ModelVariant
from regionclust.options import RunConfig
from regionclust.results import build_document
from regionclust.utilities.cmdtools import CommandRegistry
from regionclust.utilities.helpers import DocumentEncoder
from regionclust.utilities.helpers.io import read_features, write_assignments

logger = logging.getLogger(__name__)


def configure(parser: ArgumentParser) -> None:
    parser.add_argument("--features", type=Path, required=True, help="feature table with a header row")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", type=Path, help="edge list of 0-based node pairs")
    source.add_argument("--grid", help="lattice graph ROWSxCOLS over row-major nodes")
    parser.add_argument("--adjacency", choices=[a.value for a in Adjacency], default=Adjacency.ROOK.value)
    parser.add_argument("--model", choices=[v.value for v in ModelVariant], default=ModelVariant.GAUSSIAN.value)
    for name in ("tau", "kappa", "beta", "mu"):
        parser.add_argument(f"--{name}", default="auto", help='number, comma-separated list or "auto"')
    parser.add_argument("--alpha", type=float, default=1.0, help="cluster-count prior parameter in (0, 1]")
    parser.add_argument("--alr-ref", help="reference column for additive log-ratio preprocessing")
    parser.add_argument("--alr-epsilon", type=float, default=1e-6, help="floor applied to shares before the ratio")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", type=Path, default=Path("result.json"), help="result document path")
    parser.add_argument("--cut-at", type=int, action="append", help="extra cluster count to emit (repeatable)")
    parser.add_argument("--assignments", type=Path, help="MAP assignment table (default: next to --out)")
    parser.add_argument("--dendrogram", type=Path, help="also render the dendrogram to this image")


def run_config_from(args: Namespace) -> RunConfig:
    return RunConfig(
        model=args.model,
        tau=args.tau,
        kappa=args.kappa,
        beta=args.beta,
        mu=args.mu,
        alpha=args.alpha,
        features=args.features,
        graph=args.graph,
        grid=args.grid,
        adjacency=args.adjacency,
        alr_ref=args.alr_ref,
        alr_epsilon=args.alr_epsilon,
        out=args.out,
        cut_at=args.cut_at,
        seed=args.seed,
    )


def cluster(args: Namespace) -> int:
    """Cluster features on a contiguity graph and write the result document.

    Usage:
        regionclust cluster --features FILE (--graph FILE | --grid RxC) [--alpha A] [--out FILE]
    """
    started = time.perf_counter()
    run = run_config_from(args)
    features, columns = read_features(run.features, run.alr_ref, run.alr_epsilon)
    g = run.load_graph(features.shape[0])
    spec, echo = run.resolve_spec(features)
    echo["columns"] = list(columns)

    h = fit(features, g, spec, run.alpha)
    tree = build_dendrogram(h)
    document = build_document(
        h,
        g,
        spec,
        tree,
        cut_at=run.cut_at,
        options=echo,
        runtime_seconds=time.perf_counter() - started,
    )
    DocumentEncoder.write(document, run.out)

    assignments = args.assignments or run.out.with_name(f"{run.out.stem}_assignments.csv")
    write_assignments(assignments, cut_at_k(h, document.map_k))
    if args.dendrogram:
        render_dendrogram(tree, args.dendrogram)
    logger.info("Result written to %s, MAP K = %d", run.out, document.map_k)
    return 0


CommandRegistry.register(
    name="cluster",
    description=cluster.__doc__,
    configure=configure,
    handler=cluster,
)
