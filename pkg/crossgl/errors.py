"""Error catalog and exception hierarchy.

Every failure the pipeline can raise carries a stable ErrorCode so the CLI,
the conformance report and the translation service render it the same way.
Analysis passes (validate, typecheck) never raise: they return Diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .ir import SourceLocation


@dataclass(frozen=True, slots=True)
class ErrorCode:
    """Represents a stable error code used in reports and service envelopes."""

    code: str
    default_message: str

    def as_error(self, *, message: str | None = None, details: Any | None = None) -> dict[str, Any]:
        return {
            "code": self.code,
            "message": message if message is not None else self.default_message,
            "details": details,
        }


LEX_ERROR = ErrorCode("LEX_ERROR", "Unrecognised input.")
PARSE_ERROR = ErrorCode("PARSE_ERROR", "Syntax error.")
TYPE_ERROR = ErrorCode("TYPE_ERROR", "Type error.")
UNSUPPORTED_TYPE = ErrorCode("UNSUPPORTED_TYPE", "Type has no mapping in the target language.")
UNSUPPORTED_CONSTRUCT = ErrorCode("UNSUPPORTED_CONSTRUCT", "Construct is outside the supported subset.")
DUPLICATE_BACKEND = ErrorCode("DUPLICATE_BACKEND", "A backend is already registered for this target.")
UNKNOWN_TARGET = ErrorCode("UNKNOWN_TARGET", "No backend is registered for this target.")
UNKNOWN_EXTENSION = ErrorCode("UNKNOWN_EXTENSION", "File extension does not map to a known language.")
RUNTIME_ERROR = ErrorCode("RUNTIME_ERROR", "Evaluation failed.")
VALIDATION_FAILED = ErrorCode("VALIDATION_FAILED", "Program has diagnostics.")


class CrossGLError(Exception):
    code: ErrorCode = VALIDATION_FAILED

    def __init__(self, message: str, *, location: SourceLocation | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location is not None:
            return f"{self.location}: {self.message}"
        return self.message

    def as_error(self) -> dict[str, Any]:
        details = {"location": str(self.location)} if self.location is not None else None
        return self.code.as_error(message=self.message, details=details)


class LexError(CrossGLError):
    code = LEX_ERROR


class ParseError(CrossGLError):
    code = PARSE_ERROR

    def __init__(self, location: SourceLocation, expected: str, found: str) -> None:
        super().__init__(f"expected {expected}, found {found}", location=location)
        self.expected = expected
        self.found = found


class ShaderTypeError(CrossGLError):
    code = TYPE_ERROR


class UnsupportedType(CrossGLError):
    code = UNSUPPORTED_TYPE

    def __init__(self, type_: object, target: str) -> None:
        super().__init__(f"type {type_} is not supported by {target}")
        self.type = type_
        self.target = target


class UnsupportedConstruct(CrossGLError):
    code = UNSUPPORTED_CONSTRUCT

    def __init__(
        self,
        construct: str,
        target: str,
        reason: str = "",
        *,
        location: SourceLocation | None = None,
    ) -> None:
        text = f"{construct} is not supported by {target}"
        super().__init__(f"{text}: {reason}" if reason else text, location=location)
        self.construct = construct
        self.target = target
        self.reason = reason


class DuplicateBackend(CrossGLError):
    code = DUPLICATE_BACKEND

    def __init__(self, target: str) -> None:
        super().__init__(f"backend for {target} is already registered")
        self.target = target


class UnknownTarget(CrossGLError):
    code = UNKNOWN_TARGET

    def __init__(self, target: str, available: list[str]) -> None:
        super().__init__(f"unknown target {target!r} (available: {', '.join(available)})")
        self.target = target


class UnknownExtension(CrossGLError):
    code = UNKNOWN_EXTENSION

    def __init__(self, filename: str) -> None:
        super().__init__(f"cannot infer language from file name {filename!r}")
        self.filename = filename


class EvalError(CrossGLError):
    """Interpreter failure. `kind` is one of the RuntimeError variants."""

    code = RUNTIME_ERROR

    DIVISION_BY_ZERO = "DivisionByZero"
    INDEX_OUT_OF_BOUNDS = "IndexOutOfBounds"
    CALL_DEPTH_EXCEEDED = "CallDepthExceeded"
    STEP_BUDGET_EXCEEDED = "StepBudgetExceeded"
    UNBOUND = "Unbound"
    COMPUTE_ENTRY = "ComputeEntry"

    def __init__(self, kind: str, message: str, *, location: SourceLocation | None = None) -> None:
        super().__init__(f"{kind}: {message}", location=location)
        self.kind = kind


class DiagnosticsError(CrossGLError):
    """Raised by convenience wrappers when validation or typechecking reported errors."""

    def __init__(self, diagnostics: list) -> None:
        first = diagnostics[0] if diagnostics else None
        super().__init__(
            first.message if first is not None else "program has diagnostics",
            location=first.location if first is not None else None,
        )
        self.diagnostics = diagnostics


def error_from_exception(exc: Exception, *, debug: bool = False) -> dict[str, Any]:
    """Best-effort conversion of exceptions into a stable error shape."""

    if isinstance(exc, CrossGLError):
        return exc.as_error()
    details = {"type": type(exc).__name__, "message": str(exc)} if debug else None
    return {
        "code": "UNEXPECTED_ERROR",
        "message": "Unexpected error in translator.",
        "details": details,
    }
