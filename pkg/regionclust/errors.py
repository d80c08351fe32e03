"""Exception hierarchy.

Each failure class carries the exit code the command line reports for it.
"""

from typing import ClassVar


class RegionclustError(Exception):
    """Base class for every error raised by the package."""

    exit_code: ClassVar[int] = 1


class InputFileError(RegionclustError):
    """An input file is missing, unreadable or malformed."""

    exit_code: ClassVar[int] = 2


class InvalidInputError(RegionclustError):
    """Inputs are readable but violate a precondition."""

    exit_code: ClassVar[int] = 3


class NumericalError(RegionclustError):
    """A numerical routine broke down."""

    exit_code: ClassVar[int] = 4
