from .command_registry import Command, CommandRegistry

__all__ = ["Command", "CommandRegistry"]
