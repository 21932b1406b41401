"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` so the command line front end can map
failures to process status without inspecting types one by one.
"""

from __future__ import annotations


class ResonanceLabError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def record(self) -> dict:
        """Machine readable description of the failure."""
        out = {"kind": self.kind, "message": str(self)}
        for key, value in self.details.items():
            if isinstance(value, complex):
                value = [value.real, value.imag]
            out[key] = value
        return out


class ValidationError(ResonanceLabError, ValueError):
    """Malformed input: bad potential spec, region, tolerance or rule."""

    exit_code = 2
    kind = "validation"


class NumericalError(ResonanceLabError, ArithmeticError):
    """A computation ran but could not meet its accuracy contract."""

    exit_code = 3
    kind = "numerical"


class TruncationError(NumericalError):
    """Tail of an integral cannot be bounded on the available support."""

    kind = "truncation"


class RegionError(NumericalError):
    """Decay of V is too slow for the requested region of the k plane."""

    kind = "region"


class PoleProximityError(ValidationError):
    """k lies inside the excluded disk around the pole at k = 0."""

    kind = "pole_proximity"


class DivisionError(NumericalError):
    """Denominator of a ratio is numerically zero."""

    kind = "division"


class ContinuationDepthError(NumericalError):
    """A fixed point iteration failed to contract."""

    kind = "continuation_depth"


class BoundaryZeroError(NumericalError):
    """A zero of the target function sits on (or extremely near) a contour."""

    kind = "boundary_zero"


class FitError(NumericalError):
    """A growth fit could not be carried out on the sampled data."""

    kind = "fit"


class SingularityError(NumericalError):
    """Adaptive quadrature failed near a non-integrable looking point."""

    kind = "singularity"
