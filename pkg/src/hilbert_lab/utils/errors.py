"""Error handling utilities for the Hilbert geometry laboratory."""

import functools
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional


class ErrorCode(Enum):
    """Error codes for the laboratory."""

    # General errors
    UNKNOWN = "UNKNOWN"
    CONFIG_ERROR = "CONFIG_ERROR"
    INVALID_SPEC = "INVALID_SPEC"
    INVALID_PARAMETER = "INVALID_PARAMETER"

    # Projective errors
    NOT_COLLINEAR = "NOT_COLLINEAR"
    DEGENERATE_CONFIGURATION = "DEGENERATE_CONFIGURATION"
    ZERO_IMAGE = "ZERO_IMAGE"
    TANGENT_UNAVAILABLE = "TANGENT_UNAVAILABLE"
    CHART_FAILURE = "CHART_FAILURE"

    # Domain and metric errors
    NOT_INTERIOR = "NOT_INTERIOR"
    NO_CONVERGENCE = "NO_CONVERGENCE"
    NOT_ON_BOUNDARY = "NOT_ON_BOUNDARY"
    NON_SMOOTH_POINT = "NON_SMOOTH_POINT"
    UNSUPPORTED_DIMENSION = "UNSUPPORTED_DIMENSION"

    # Dynamics errors
    DEGENERATE_DIRECTION = "DEGENERATE_DIRECTION"
    INSUFFICIENT_SAMPLES = "INSUFFICIENT_SAMPLES"
    PRECISION_LOSS = "PRECISION_LOSS"

    # Group errors
    NEAR_DEFECTIVE = "NEAR_DEFECTIVE"
    NOT_BIPROXIMAL = "NOT_BIPROXIMAL"
    INVALID_DETERMINANT = "INVALID_DETERMINANT"
    NOT_HYPERBOLIC_TYPE = "NOT_HYPERBOLIC_TYPE"
    EXPLOSION_GUARD = "EXPLOSION_GUARD"
    NOT_PROPERLY_CONVEX = "NOT_PROPERLY_CONVEX"

    # Estimation errors
    MONTE_CARLO_VARIANCE = "MONTE_CARLO_VARIANCE"
    SPECTRUM_TOO_SMALL = "SPECTRUM_TOO_SMALL"
    SCALE_UNDERFLOW = "SCALE_UNDERFLOW"
    INVALID_BETA = "INVALID_BETA"

    @classmethod
    def to_exit_code(cls, code: "ErrorCode") -> int:
        """Convert an error code to a process exit code.

        Configuration and input errors map to 2, every numeric
        failure maps to 3.
        """
        config_codes = {
            cls.CONFIG_ERROR,
            cls.INVALID_SPEC,
            cls.INVALID_PARAMETER,
            cls.NOT_HYPERBOLIC_TYPE,
            cls.INVALID_DETERMINANT,
            cls.UNSUPPORTED_DIMENSION,
        }
        return 2 if code in config_codes else 3


@dataclass
class LabError(Exception):
    """Base exception class for laboratory errors."""

    code: ErrorCode
    message: str
    details: Optional[Dict[str, Any]] = None

    def __str__(self) -> str:
        """String representation of the error."""
        if self.details:
            return f"{self.code.value}: {self.message} - {self.details}"
        return f"{self.code.value}: {self.message}"

    @property
    def exit_code(self) -> int:
        return ErrorCode.to_exit_code(self.code)


class ConfigError(LabError):
    """Configuration file or flag error."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.CONFIG_ERROR, message, details)


class InvalidSpecError(LabError):
    """Domain or group description error."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.INVALID_SPEC, message, details)


class InvalidParameterError(LabError):
    """Out-of-range numeric parameter."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.INVALID_PARAMETER, message, details)


class NotCollinearError(LabError):
    """Cross-ratio arguments do not lie on a common line."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NOT_COLLINEAR, message, details)


class DegenerateConfigurationError(LabError):
    """Coincident points zero a denominator."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.DEGENERATE_CONFIGURATION, message, details)


class ZeroImageError(LabError):
    """A homography sent a point to the zero vector."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.ZERO_IMAGE, message, details)


class TangentUnavailableError(LabError):
    """Boundary tangent estimation failed."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.TANGENT_UNAVAILABLE, message, details)


class ChartFailureError(LabError):
    """An adapted affine chart could not be built."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.CHART_FAILURE, message, details)


class NotInteriorError(LabError):
    """A point expected inside the domain is not interior."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NOT_INTERIOR, message, details)


class NoConvergenceError(LabError):
    """Bracketing or bisection exceeded its iteration cap."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NO_CONVERGENCE, message, details)


class NotOnBoundaryError(LabError):
    """A point expected on the boundary is not on it."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NOT_ON_BOUNDARY, message, details)


class NonSmoothPointError(LabError):
    """No unique supporting hyperplane (polytope vertex or edge)."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NON_SMOOTH_POINT, message, details)


class UnsupportedDimensionError(LabError):
    """Operation not available in this dimension."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.UNSUPPORTED_DIMENSION, message, details)


class DegenerateDirectionError(LabError):
    """Transversal vector is parallel to the chord."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.DEGENERATE_DIRECTION, message, details)


class InsufficientSamplesError(LabError):
    """Record too short for a regression."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.INSUFFICIENT_SAMPLES, message, details)


class PrecisionLossError(LabError):
    """Transport norms are no longer representable along the orbit."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.PRECISION_LOSS, message, details)


class NearDefectiveError(LabError):
    """Extreme eigenvalue moduli are not separated."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NEAR_DEFECTIVE, message, details)


class NotBiproximalError(LabError):
    """Element is not biproximal."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NOT_BIPROXIMAL, message, details)


class InvalidDeterminantError(LabError):
    """Matrix does not have unit determinant."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.INVALID_DETERMINANT, message, details)


class NotHyperbolicTypeError(LabError):
    """Triangle type is not hyperbolic."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NOT_HYPERBOLIC_TYPE, message, details)


class ExplosionGuardError(LabError):
    """Word enumeration would exceed the combinatorial guard."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.EXPLOSION_GUARD, message, details)


class NotProperlyConvexError(LabError):
    """Hull is degenerate or unbounded in every sampled chart."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.NOT_PROPERLY_CONVEX, message, details)


class MonteCarloVarianceError(LabError):
    """Monte-Carlo relative error above threshold."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.MONTE_CARLO_VARIANCE, message, details)


class SpectrumTooSmallError(LabError):
    """Too few closed orbits for a counting fit."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.SPECTRUM_TOO_SMALL, message, details)


class ScaleUnderflowError(LabError):
    """Boundary sampling scale below the representable threshold."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.SCALE_UNDERFLOW, message, details)


class InvalidBetaError(LabError):
    """Convexity exponent below 2."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(ErrorCode.INVALID_BETA, message, details)


def handle_lab_error(func: Callable[..., int]) -> Callable[..., int]:
    """Decorator turning laboratory errors into exit codes.

    The wrapped command returns 0 on success; a ``LabError`` returns its
    exit code after writing the diagnostic to standard error. Unexpected
    exceptions count as numeric failures.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except LabError as e:
            print(str(e), file=sys.stderr)
            return e.exit_code
        except (ArithmeticError, ValueError, FloatingPointError) as e:
            error = LabError(ErrorCode.UNKNOWN, str(e))
            print(str(error), file=sys.stderr)
            return error.exit_code

    return wrapper
