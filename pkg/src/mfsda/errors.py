"""Exception hierarchy shared across the package.

Every error carries an ``exit_code`` so the command-line front end can map
failures to stable process exit statuses, and an optional ``stage`` tag set
by the selection pipeline to say where the failure happened.
"""

from __future__ import annotations


class MfsdaError(Exception):
    """Base class for all package errors."""

    exit_code = 4

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.stage = stage

    def __str__(self) -> str:
        base = super().__str__()
        if self.stage:
            return f"[stage: {self.stage}] {base}"
        return base


class DegenerateInput(MfsdaError):
    """Input too small or constant for the requested operation."""


class SingularGram(MfsdaError):
    """Gram matrix is not positive definite at the pivot tolerance."""


class InsufficientSamples(MfsdaError):
    """Not enough observations for the requested fit or split."""


class InsufficientDistinctResponses(MfsdaError):
    """Too few distinct response values to form the requested slices."""


class DegenerateSlicing(MfsdaError):
    """Slice boundaries collapse (ties leave an empty slice)."""


class InvalidLevel(MfsdaError):
    """Target FDR level outside (0, 1)."""

    exit_code = 2


class InvalidScenario(MfsdaError):
    """Malformed simulation scenario configuration."""

    exit_code = 2


class InternalContractViolation(MfsdaError):
    """Two pipeline stages disagree about shared state; indicates a bug."""

    exit_code = 1


class DatasetError(MfsdaError):
    """Problems ingesting or validating user-supplied data."""

    exit_code = 3


class MissingInputFile(DatasetError):
    pass


class MissingValue(DatasetError):
    pass


class ColumnNotFound(DatasetError):
    pass


class DuplicateHeader(DatasetError):
    pass
