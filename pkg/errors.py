"""
Error hierarchy for heatsym.

Every failure raised by the library derives from HeatSymError. The CLI maps
ConfigError to exit code 2 and NumericalFailure to exit code 3; symbolic
errors are also ValueErrors so callers can catch them generically.
"""

from typing import Optional


class HeatSymError(Exception):
    """Base class for all heatsym errors."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

class ConfigError(HeatSymError, ValueError):
    """Invalid run configuration, optionally pinned to a line of the file."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


# ---------------------------------------------------------------------------
# Symbolic engine
# ---------------------------------------------------------------------------

class ExprSyntaxError(HeatSymError, ValueError):
    """Malformed expression text."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(HeatSymError, ValueError):
    """Name that is neither a jet coordinate nor a declared constant."""

    def __init__(self, name: str, position: Optional[int] = None):
        self.name = name
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"unknown identifier '{name}'{where}")


class InvalidExponent(HeatSymError, ValueError):
    """Negative or non-integer exponent."""


class JetOverflow(HeatSymError, ValueError):
    """A total derivative would leave the truncated jet space."""

    def __init__(self, coordinate: str, direction: str):
        self.coordinate = coordinate
        self.direction = direction
        super().__init__(
            f"D_{direction} of {coordinate} leaves the jet space; "
            "the caller must not depend on that term"
        )


class UncoveredJetCoordinate(HeatSymError, ValueError):
    """Expression depends on a jet coordinate the prolongation does not cover."""


class UnsupportedCondition(HeatSymError, ValueError):
    """Boundary-condition kind/location combination outside the supported set."""


class NotScaling(HeatSymError, ValueError):
    """Operator is not of the scaling form a(2t d/dt + x d/dx) + m T d/dT."""


class UnsupportedExponent(HeatSymError, ValueError):
    """Closed-form library has no kernel for this similarity exponent."""


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------

class NumericalFailure(HeatSymError):
    """Base class for numerical failures (CLI exit code 3)."""


class ReductionFailure(NumericalFailure):
    """PDE residual does not factor through the similarity variable."""


class FitFailure(NumericalFailure):
    """Integration constants cannot satisfy the imposed conditions."""


class NonphysicalParams(NumericalFailure, ValueError):
    """Physical parameter outside its admissible range."""


class DomainError(NumericalFailure, ValueError):
    """Evaluation point outside the domain of a formula or stencil."""


class StabilityViolation(NumericalFailure):
    """Explicit-leaning theta scheme with a mesh ratio above the stability limit."""


class ZeroPivotError(NumericalFailure):
    """Tridiagonal elimination hit a zero pivot."""
