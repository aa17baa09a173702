"""Exception types shared across the toolkit."""

from __future__ import annotations


class OrigripError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(OrigripError, ValueError):
    """Invalid parameters or configuration.

    Carries the complete list of violated constraints, not just the first.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class MaterialLookupError(OrigripError, KeyError):
    """Friction coefficient requested for a pair not in the catalogue."""


class SurfaceModeError(OrigripError, ValueError):
    """Friction mode requested that a surface does not expose."""


class CalibrationError(OrigripError, ValueError):
    """Stiffness calibration impossible (degenerate fold geometry)."""


class SequencingError(OrigripError, RuntimeError):
    """Mode switch or motion requested in an illegal order."""


class KinematicError(OrigripError, ValueError):
    """Finger angle outside limits or step cap exceeded."""


class PlanError(OrigripError, ValueError):
    """Malformed manipulation plan."""


class DegenerateConfigurationError(OrigripError, RuntimeError):
    """Contact problem too ill-conditioned to resolve at all."""


class JamError(OrigripError, RuntimeError):
    """No consistent contact-mode hypothesis: the object is stuck.

    Carries enough context to locate and inspect the jam.
    """

    def __init__(self, message, *, step=None, phase=None, details=None):
        super().__init__(message)
        self.step = step
        self.phase = phase
        self.details = details or {}

    def annotated(self, *, step=None, phase=None):
        self.step = self.step if step is None else step
        self.phase = self.phase if phase is None else phase
        return self
