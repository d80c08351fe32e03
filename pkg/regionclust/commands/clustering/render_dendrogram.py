from argparse import ArgumentParser, Namespace
from pathlib import Path

from regionclust.inference import render_dendrogram
from regionclust.results import ResultDocument, dendrogram_from_document
from regionclust.utilities.cmdtools import CommandRegistry
from regionclust.utilities.helpers import DocumentEncoder


def configure(parser: ArgumentParser) -> None:
    parser.add_argument("document", type=Path, help="result document written by cluster")
    parser.add_argument("--out", type=Path, default=Path("dendrogram.svg"), help="image path (.svg, .pdf, .png)")
    parser.add_argument("--title")


def render(args: Namespace) -> int:
    """Draw the dendrogram stored in a result document.

    Heights are -log(alpha) at the tipping points.

    Usage:
        regionclust render-dendrogram result.json --out dendrogram.svg
    """
    document = DocumentEncoder.read(args.document, ResultDocument)
    render_dendrogram(dendrogram_from_document(document), args.out, title=args.title)
    return 0


CommandRegistry.register(
    name="render-dendrogram",
    description=render.__doc__,
    configure=configure,
    handler=render,
)
