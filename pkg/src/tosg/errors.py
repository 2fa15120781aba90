"""Exception types shared across the toolkit."""


class TosgError(Exception):
    """Base class for toolkit errors."""


class InputError(TosgError, ValueError):
    """Invalid argument, malformed document, or dimension mismatch."""


class ResourceLimitError(TosgError):
    """A guard on problem size was exceeded."""


class SolverError(TosgError):
    """A numerical solve failed."""


class DegenerateProblemError(SolverError):
    """The KKT system is singular at the current iterate."""


class ConvergenceError(SolverError):
    """Iteration budget exhausted before reaching tolerance."""

    def __init__(self, message: str, **residuals: float):
        super().__init__(message)
        self.residuals = residuals


class StageError(TosgError):
    """A pipeline stage failed; carries the stage tag and partial results."""

    def __init__(self, stage: str, partial: dict, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.partial = partial
