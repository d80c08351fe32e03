import importlib
import logging
import pkgutil
import sys
from collections.abc import Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.traceback import install

from regionclust import commands
from regionclust.config import config
from regionclust.errors import InvalidInputError, RegionclustError
from regionclust.utilities.cmdtools import CommandRegistry

logger = logging.getLogger(__name__)


def setup_logging() -> None:
    if config.RICH_TRACEBACKS:
        install(show_locals=True)

    logging.basicConfig(
        level=config.LOG_LEVEL,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=config.RICH_TRACEBACKS)],
    )


def load_commands() -> list[str]:
    """Import every module under the commands package so each registers itself."""
    for module in pkgutil.walk_packages(commands.__path__, prefix=f"{commands.__name__}."):
        importlib.import_module(module.name)
    return CommandRegistry.get_cmds()


def main(argv: Sequence[str] | None = None) -> int:
    load_commands()
    parser = CommandRegistry.build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValidationError as exc:
        logger.error("Invalid options: %s", exc)  # noqa: TRY400
        return InvalidInputError.exit_code
    except RegionclustError as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return exc.exit_code


def run() -> None:
    setup_logging()
    sys.exit(main())


if __name__ == "__main__":
    run()
