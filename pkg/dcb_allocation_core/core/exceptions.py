# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
from typing import Optional


class DcbError(Exception):
    """Base class for every error raised by the package."""

    exit_code: int = 1


class ScenarioError(DcbError, ValueError):
    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class InvalidBlockError(DcbError, ValueError):
    exit_code = 2


class PrimaryBusyError(DcbError, ValueError):
    pass


class InfeasibleSchemeError(DcbError, ValueError):
    exit_code = 3


class UnknownWidthError(DcbError, KeyError):

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown width"


class NonPositiveWidthError(DcbError, ValueError):
    pass


class DegenerateFitError(DcbError, ValueError):
    pass


class StateSpaceTooLargeError(DcbError):
    exit_code = 4


class EmptySetError(DcbError, ValueError):
    pass


class AllZeroError(DcbError, ValueError):
    pass


class DivideByZeroError(DcbError, ZeroDivisionError):
    pass


class EmptyBoxError(DcbError, ValueError):
    exit_code = 3


class InfeasibleBoxesError(DcbError, ValueError):
    exit_code = 3


class NoBlockFitsError(DcbError, ValueError):
    exit_code = 3


class SearchSpaceTooLargeError(DcbError):
    exit_code = 4


class SimulationError(DcbError, RuntimeError):
    pass


class AssertionFailedError(DcbError):
    exit_code = 5
