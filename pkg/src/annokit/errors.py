"""Error and warning types shared by every annokit module.

Each error class carries a stable ``exit_code`` so the CLI can map module
failures 1:1 to process exit codes and the HTTP service can map them to
error payloads.
"""

from __future__ import annotations


class AnnokitError(Exception):
    """Base class for all annokit failures."""

    exit_code = 1

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    @property
    def name(self) -> str:
        return type(self).__name__.removesuffix("Error")


# core model
class EmptyAnnotationsError(AnnokitError):
    exit_code = 10


class MixedTypesError(AnnokitError):
    exit_code = 11


class InvalidMappingError(AnnokitError):
    exit_code = 12


# distribution
class UnderdeterminedError(AnnokitError):
    exit_code = 20


class OverdeterminedError(AnnokitError):
    exit_code = 21


class NonPositiveSolutionError(AnnokitError):
    exit_code = 22


class InsufficientSamplesError(AnnokitError):
    exit_code = 23


class InfeasibleRedistributionError(AnnokitError):
    """Raised when some samples cannot be reassigned; carries the full list."""

    exit_code = 24

    def __init__(self, message: str, stuck_samples=(), **details):
        super().__init__(message, **details)
        self.stuck_samples = list(stuck_samples)


# label generation
class UnmappedValueError(AnnokitError):
    exit_code = 30


class NoAnnotationsError(AnnokitError):
    exit_code = 31


class AllZeroWeightsError(AnnokitError):
    exit_code = 32


# agreement
class InsufficientOverlapError(AnnokitError):
    exit_code = 40


# reliability
class NoSignalError(AnnokitError):
    exit_code = 50


class UnknownAnnotatorError(AnnokitError):
    exit_code = 51


# compilation
class TripleAnnotationError(AnnokitError):
    exit_code = 60


class MissingSampleIdError(AnnokitError):
    exit_code = 61


class AnnotatorCollisionError(AnnokitError):
    exit_code = 62


class ConflictingCellError(AnnokitError):
    exit_code = 63


class CorruptArchiveError(AnnokitError):
    exit_code = 64


class EmptyArchiveError(AnnokitError):
    exit_code = 65


class UnsupportedFormatError(AnnokitError):
    exit_code = 66


class AnnokitWarning(UserWarning):
    """Base class for non-fatal conditions."""


class DegenerateRingWarning(AnnokitWarning):
    """n=2 collapses both ring neighbour pairs into a single pair."""


class DegenerateMetricWarning(AnnokitWarning):
    """Chance-corrected metric hit a zero-variance (constant label) case."""


class DisconnectedAnnotatorWarning(AnnokitWarning):
    """An annotator ended up with no agreement edges."""


class IgnoredEntryWarning(AnnokitWarning):
    """A non-CSV archive member was skipped."""


class UnassignedAnnotationWarning(AnnokitWarning):
    """An annotator submitted a sample that was not assigned to them."""
