from typing import Any, Dict, List, Optional, Tuple


class SetMapError(Exception):
    """Base class for every error raised by the library"""

    error_code = "SETMAP_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ParseError(SetMapError, ValueError):
    """Syntax error in an expression, set literal, metric selector or map file"""

    error_code = "PARSE_ERROR"

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})",
                         {'line': line, 'column': column})


class DomainError(SetMapError, ValueError):
    """A point lies outside a map's domain, on a puncture, or domains disagree"""

    error_code = "DOMAIN_ERROR"


class PreconditionError(SetMapError):
    """An operation was called on a map outside the class it is defined for"""

    error_code = "PRECONDITION_ERROR"

    def __init__(self, message: str, witnesses: Optional[List[Tuple[float, str]]] = None):
        self.witnesses = list(witnesses or [])
        super().__init__(message, {'witnesses': [
            {'breakpoint': x, 'reason': reason} for x, reason in self.witnesses
        ]})

    def __str__(self):
        if not self.witnesses:
            return self.message
        listed = "; ".join(f"x={x!r}: {reason}" for x, reason in self.witnesses)
        return f"{self.message} [{listed}]"


class InvariantViolationError(SetMapError):
    """An internal cross-check failed; signals a representation bug"""

    error_code = "INVARIANT_VIOLATION"


class SamplingBudgetError(SetMapError):
    """Adaptive sampling would exceed the configured point budget"""

    error_code = "SAMPLING_BUDGET_EXCEEDED"


class UnknownExampleError(SetMapError, ValueError):
    """A corpus name or family parameter is not recognised"""

    error_code = "UNKNOWN_EXAMPLE"
