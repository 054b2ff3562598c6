"""Exception hierarchy used across the package."""


class DebondError(Exception):
    """Base class for all errors raised by :mod:`debond`."""


class DomainError(DebondError, ValueError):
    """A point or front violates the admissible geometry (e.g. speed >= 1)."""


class RangeError(DebondError, ValueError):
    """An evaluation was requested outside the stored/sampled range."""


class DataError(DebondError, ValueError):
    """Problem data failed validation.

    ``diagnostics`` holds one message per failed check.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class ConvergenceError(DebondError, RuntimeError):
    """Fixed-point iteration hit ``max_iter`` without meeting the tolerance."""

    def __init__(self, message, history=()):
        self.history = list(history)
        super().__init__(message)


class ResolutionError(DebondError, RuntimeError):
    """A window shrank below one grid step."""
