from argparse import ArgumentParser, Namespace, RawDescriptionHelpFormatter
from collections.abc import Callable
from dataclasses import dataclass
from inspect import cleandoc
from typing import ClassVar

Configure = Callable[[ArgumentParser], None]
Handler = Callable[[Namespace], int]


@dataclass(frozen=True)
class Command:
    name: str
    description: str
    configure: Configure
    handler: Handler

    @property
    def summary(self) -> str:
        return self.description.splitlines()[0] if self.description else ""


class CommandRegistry:
    """
    A class to manage subcommands.

    Should only be used inside command modules which are imported on startup.
    """

    _commands: ClassVar[dict[str, Command]] = {}

    @classmethod
    def register(
        cls,
        name: str,
        description: str | None,
        configure: Configure,
        handler: Handler,
    ) -> None:
        """Register a subcommand.

        Parameters:
            name (str):
                The name of the subcommand.

            description (str | None):
                Help text; its first line is the summary shown in the command list.

            configure (Configure):
                Adds the subcommand's arguments to its parser.

            handler (Handler):
                Runs the subcommand and returns the process exit code.
        """
        cls._commands[name] = Command(
            name=name,
            description=cleandoc(description or ""),
            configure=configure,
            handler=handler,
        )

    @classmethod
    def get_command(cls, name: str) -> Command | None:
        """Get a registered subcommand.

        Parameters:
            name (str): The name of the subcommand.

        Returns:
            Command | None: The command, or None when unknown.
        """
        return cls._commands.get(name)

    @classmethod
    def get_cmds(cls) -> list[str]:
        """Get a sorted list of all subcommand names."""
        return sorted(cls._commands)

    @classmethod
    def build_parser(cls, prog: str = "regionclust") -> ArgumentParser:
        parser = ArgumentParser(prog=prog, description="Bayesian contiguity-constrained hierarchical clustering.")
        subparsers = parser.add_subparsers(dest="command", required=True)
        for name in cls.get_cmds():
            command = cls._commands[name]
            subparser = subparsers.add_parser(
                name,
                help=command.summary,
                description=command.description,
                formatter_class=RawDescriptionHelpFormatter,
            )
            command.configure(subparser)
            subparser.set_defaults(handler=command.handler)
        return parser
