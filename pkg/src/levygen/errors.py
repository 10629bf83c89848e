"""Exception hierarchy.

Every error raised by this package derives from :class:`LevygenError`, so
callers (notably the CLI job runner) can distinguish domain failures from
genuine bugs with a single except clause.
"""

from __future__ import annotations


class LevygenError(Exception):
    """Base class for all package errors."""


class InvalidMeasureError(LevygenError):
    """A jump measure violates an integrability or positivity requirement."""


class ParameterError(LevygenError):
    """A parameter is outside its admissible range; message names field and bound."""


class DomainError(LevygenError):
    """A function was evaluated outside the half-axis it is defined on."""


class SupportError(LevygenError):
    """A test function does not fit inside the grid with the required padding."""


class GridError(LevygenError):
    """A grid is malformed (size, spacing, or node-count mismatch)."""


class ResolutionError(LevygenError):
    """A sampled function is under-resolved for the requested transform."""


class NumericalFailureError(LevygenError):
    """Quadrature did not converge; message reports the achieved tolerance."""


class KernelIntegrabilityError(LevygenError):
    """A kernel cell integral is non-finite (local integrability violated)."""


class IntegrabilityViolationError(LevygenError):
    """A moment or kernel integral required to be finite diverged."""


class NotSimulableError(LevygenError):
    """The preset has no exact sampler."""


class ConfigError(LevygenError):
    """A run configuration is malformed; message names section and field."""

    def __init__(self, message: str, *, section: str | None = None, field: str | None = None):
        self.section = section
        self.field = field
        where = ""
        if section is not None:
            where = f"[{section}] "
            if field is not None:
                where = f"[{section}] {field}: "
        super().__init__(where + message)
