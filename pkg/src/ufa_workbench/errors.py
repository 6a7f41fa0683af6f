"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for workbench errors."""


class ParseError(WorkbenchError):
    """A text input could not be parsed.

    `location` is a human-readable position hint (line number or token).
    """

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class ResourceLimitError(WorkbenchError):
    """An exact computation would exceed its configured size bound."""


class PreconditionError(WorkbenchError, ValueError):
    """A documented operation precondition does not hold for the inputs."""
