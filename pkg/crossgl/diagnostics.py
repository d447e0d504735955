"""User-facing compile diagnostics (distinct from log records)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .ir import NO_LOCATION, SourceLocation


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    severity: Severity
    message: str
    location: SourceLocation = NO_LOCATION
    code: str = "VALIDATION_FAILED"

    def format(self) -> str:
        loc = self.location
        return f"{loc.file}:{loc.line}:{loc.column}: {self.severity.value}: {self.message}"

    def as_warning(self) -> dict[str, Any]:
        return {
            "code": self.code,
            "message": self.message,
            "details": {"severity": self.severity.value, "location": str(self.location)},
        }


def error(message: str, location: SourceLocation = NO_LOCATION, code: str = "VALIDATION_FAILED") -> Diagnostic:
    return Diagnostic(Severity.ERROR, message, location, code)


def warning(message: str, location: SourceLocation = NO_LOCATION, code: str = "WARNING") -> Diagnostic:
    return Diagnostic(Severity.WARNING, message, location, code)


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    """Stable order by (file, line, column); ties keep discovery order."""

    return sorted(diags, key=lambda d: (d.location.file, d.location.line, d.location.column))


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity == Severity.ERROR for d in diags)
