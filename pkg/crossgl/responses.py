"""Response envelope helpers for the translation service.

Every response is an object with:
  - error (or null)
  - warnings (list of {code, message, details})
plus an endpoint payload merged into the top level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .diagnostics import Diagnostic

JsonObject = dict[str, Any]


@dataclass(slots=True)
class Envelope:
    error: JsonObject | None = None
    warnings: list[JsonObject] | None = None

    def to_dict(self, payload: Mapping[str, Any] | None = None) -> JsonObject:
        out: JsonObject = {
            "error": self.error,
            "warnings": self.warnings if self.warnings is not None else [],
        }
        if payload:
            out.update(dict(payload))
        return out


def _warnings(value: Iterable[JsonObject | Diagnostic] | None) -> list[JsonObject]:
    if value is None:
        return []
    return [w.as_warning() if isinstance(w, Diagnostic) else dict(w) for w in value]


def ok(
    payload: Mapping[str, Any] | None = None,
    *,
    warnings: Iterable[JsonObject | Diagnostic] | None = None,
) -> JsonObject:
    return Envelope(error=None, warnings=_warnings(warnings)).to_dict(payload=payload)


def fail(
    error: Mapping[str, Any],
    payload: Mapping[str, Any] | None = None,
    *,
    warnings: Iterable[JsonObject | Diagnostic] | None = None,
) -> JsonObject:
    return Envelope(error=dict(error), warnings=_warnings(warnings)).to_dict(payload=payload)
