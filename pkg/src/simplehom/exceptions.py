"""Exception utilities for simplehom."""

import traceback
from enum import Enum
from types import TracebackType
from typing import Any, Optional, Type


class ErrorSeverity(Enum):
    """Error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class SimplehomError(Exception):
    """Base exception for all simplehom errors."""

    def __init__(
        self,
        message: str,
        cause: Optional[Exception] = None,
        context: Optional[dict] = None,
        severity: ErrorSeverity = ErrorSeverity.MEDIUM,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.cause = cause
        self.context = context or {}
        self.severity = severity
        self.traceback_str = traceback.format_exc() if cause else None


class ConfigurationError(SimplehomError):
    """Raised when configuration is invalid or missing."""
    pass


class InvalidParameterError(SimplehomError):
    """Raised when a prime, embedding index, level or operand is out of range."""
    pass


class WordSyntaxError(InvalidParameterError):
    """Raised when a group word string cannot be parsed."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(message, context={"position": position, "text": text})
        self.position = position
        self.text = text


class NonDivisibleError(SimplehomError):
    """Raised when an exact division by a power of h is impossible."""
    pass


class SingularMatrixError(SimplehomError):
    """Raised when a matrix over a quotient ring has a non-unit determinant."""
    pass


class InvariantViolation(SimplehomError):
    """Raised when an internal invariant fails; always a bug."""

    def __init__(self, message: str, context: Optional[dict] = None):
        super().__init__(message, context=context, severity=ErrorSeverity.CRITICAL)


class ConventionError(SimplehomError):
    """Raised when no ordering of the boundary images multiplies to a scalar."""
    pass


class NoCertificateError(SimplehomError):
    """Raised when the bounded ping-pong search finds no Schottky certificate."""
    pass


class PreconditionError(SimplehomError):
    """Raised when an operation's mathematical precondition does not hold."""
    pass


class BudgetExceededError(SimplehomError):
    """Raised when an enumeration exceeds its element budget."""

    def __init__(self, message: str, partial_count: int, context: Optional[dict] = None):
        ctx = dict(context or {})
        ctx["partial_count"] = partial_count
        super().__init__(message, context=ctx, severity=ErrorSeverity.LOW)
        self.partial_count = partial_count


class NotAMemberError(SimplehomError):
    """Raised when a word does not lie in the subgroup of a coset table."""
    pass


class LawViolationError(SimplehomError):
    """Raised when a computed depth contradicts the power law for psi."""

    def __init__(self, message: str, context: Optional[dict] = None):
        super().__init__(message, context=context, severity=ErrorSeverity.CRITICAL)


class VerificationFailure(SimplehomError):
    """Raised when a verification suite or report assertion fails."""

    def __init__(self, message: str, context: Optional[dict] = None):
        super().__init__(message, context=context, severity=ErrorSeverity.HIGH)


class ErrorContext:
    """Context manager for adding context to exceptions."""

    def __init__(self, **context: Any) -> None:
        self.context = context

    def __enter__(self) -> "ErrorContext":
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[TracebackType],
    ) -> bool:
        if isinstance(exc_val, SimplehomError):
            exc_val.context.update(self.context)
        return False


def format_exception_chain(exception: Exception) -> str:
    """
    Format an exception chain for logging or display.

    Args:
        exception: The exception to format

    Returns:
        Formatted exception chain as a string
    """
    lines = []
    current: Optional[BaseException] = exception

    while current:
        if isinstance(current, SimplehomError):
            lines.append(f"{type(current).__name__}: {current.message}")
            if current.context:
                lines.append(f"  Context: {current.context}")
            if current.cause:
                lines.append("  Caused by:")
                current = current.cause
            else:
                break
        else:
            lines.append(f"{type(current).__name__}: {str(current)}")
            break

    return "\n".join(lines)
