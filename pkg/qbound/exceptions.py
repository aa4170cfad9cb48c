"""Custom exception classes for qbound.

All exceptions inherit from QBoundError so callers (and the CLI) can catch
every library failure in one place.

Exception Hierarchy:
    QBoundError (base)
    ├── StateError (malformed quantum objects)
    │   ├── DimensionMismatchError
    │   ├── NotHermitianError
    │   ├── NotPositiveError
    │   ├── NotUnitaryError
    │   └── BlochRadiusError
    ├── DomainError (parameter outside an operation's range)
    ├── GeometryError (degenerate or unequal-radius state pairs)
    ├── ConfigError (unreadable or malformed config file)
    └── SweepSpecError (invalid sweep definition)
"""

from typing import Any


class QBoundError(Exception):
    """Base exception for all qbound errors.

    Attributes:
        message: Human-readable error description.
        detail: Technical details for debugging (optional).
    """

    def __init__(self, message: str, detail: str | None = None) -> None:
        self.message = message
        self.detail = detail
        super().__init__(message)

    def to_dict(self) -> dict[str, Any]:
        """Convert exception to a dictionary for JSON output."""
        result: dict[str, Any] = {
            "error": self.__class__.__name__,
            "message": self.message,
        }
        if self.detail:
            result["detail"] = self.detail
        return result


class StateError(QBoundError):
    """Base exception for malformed state vectors and operators."""


class DimensionMismatchError(StateError):
    """Raised when operand dimensions do not agree."""

    def __init__(self, message: str, expected: Any = None, actual: Any = None) -> None:
        detail_parts = []
        if expected is not None:
            detail_parts.append(f"expected: {expected}")
        if actual is not None:
            detail_parts.append(f"actual: {actual}")
        detail = "; ".join(detail_parts) if detail_parts else None
        super().__init__(message, detail)
        self.expected = expected
        self.actual = actual


class NotHermitianError(StateError):
    """Raised when an operator differs from its adjoint beyond tolerance."""

    def __init__(self, message: str = "Operator is not Hermitian", deviation: float | None = None):
        detail = f"max |H - H^dagger|: {deviation:.3e}" if deviation is not None else None
        super().__init__(message, detail)
        self.deviation = deviation


class NotPositiveError(StateError):
    """Raised when an operator has a negative eigenvalue beyond tolerance."""

    def __init__(self, message: str = "Operator is not positive", min_eigenvalue: float | None = None):
        detail = f"min eigenvalue: {min_eigenvalue:.3e}" if min_eigenvalue is not None else None
        super().__init__(message, detail)
        self.min_eigenvalue = min_eigenvalue


class NotUnitaryError(StateError):
    """Raised when U^dagger U differs from the identity beyond tolerance."""

    def __init__(self, message: str = "Matrix is not unitary", deviation: float | None = None):
        detail = f"max |U^dagger U - I|: {deviation:.3e}" if deviation is not None else None
        super().__init__(message, detail)
        self.deviation = deviation


class BlochRadiusError(StateError):
    """Raised when a Bloch vector lies outside the unit ball."""

    def __init__(self, radius: float) -> None:
        super().__init__("Bloch vector outside the unit ball", f"radius: {radius!r}")
        self.radius = radius


class DomainError(QBoundError):
    """Raised when a parameter lies outside an operation's precondition."""

    def __init__(self, parameter: str, value: Any, message: str | None = None) -> None:
        msg = message or f"Parameter out of range: {parameter}={value!r}"
        super().__init__(msg, f"{parameter}: {value!r}")
        self.parameter = parameter
        self.value = value


class GeometryError(QBoundError):
    """Raised for state pairs the Bloch decompositions cannot handle."""


class ConfigError(QBoundError):
    """Raised when a config file cannot be read or parsed."""

    def __init__(self, message: str, path: str | None = None, detail: str | None = None) -> None:
        if path and not detail:
            detail = f"file: {path}"
        super().__init__(message, detail)
        self.path = path


class SweepSpecError(QBoundError):
    """Raised when a sweep definition is invalid."""

    def __init__(self, message: str, field: str | None = None) -> None:
        detail = f"field: {field}" if field else None
        super().__init__(message, detail)
        self.field = field
