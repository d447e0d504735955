"""`translate` command: files in, generated files out.

The outcome carries the exit status and the diagnostic lines; printing them
is left to the caller.
"""

from __future__ import annotations

import logging
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from .backends import BackendRegistry, OutputUnit, get_registry
from .diagnostics import Severity
from .errors import CrossGLError, DiagnosticsError, UnknownExtension, UnknownTarget
from .frontends import SourceLanguage
from .pipeline import load_files

log = logging.getLogger("crossgl.translate")

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2


class EmitMode(str, Enum):
    COMBINED = "combined"
    SEPARATE = "separate"


class TranslateRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    inputs: list[Path] = Field(min_length=1)
    target: str
    output_dir: Path = Path(".")
    source_language: SourceLanguage | None = None
    emit_mode: EmitMode = EmitMode.COMBINED
    strict: bool = False


class TranslateOutcome(BaseModel):
    exit_code: int
    written: list[Path] = Field(default_factory=list)
    messages: list[str] = Field(default_factory=list)


def error_line(exc: CrossGLError) -> str:
    loc = exc.location
    if loc is None:
        return f"error: {exc.message}"
    return f"{loc.file}:{loc.line}:{loc.column}: {Severity.ERROR.value}: {exc.message}"


def combine_units(units: list[OutputUnit], stem: str) -> list[OutputUnit]:
    """Fold multi-unit output into one file, each part under a filename banner."""

    if len(units) <= 1:
        return units
    parts = [f"// ---- {u.suggested_filename} ----\n{u.text.rstrip()}\n" for u in units]
    suffixes = {Path(u.suggested_filename).suffix for u in units}
    suffix = suffixes.pop() if len(suffixes) == 1 else ".glsl"
    return [OutputUnit(suggested_filename=f"{stem}{suffix}", target=units[0].target, text="\n".join(parts))]


def run_translate(request: TranslateRequest, *, registry: BackendRegistry | None = None) -> TranslateOutcome:
    """detect/import -> validate -> typecheck -> generate -> write."""

    registry = registry if registry is not None else get_registry()
    try:
        backend = registry.get(request.target)
    except UnknownTarget as exc:
        return TranslateOutcome(exit_code=EXIT_USAGE, messages=[f"error: {exc.message}"])
    missing = [p for p in request.inputs if not p.is_file()]
    if missing:
        return TranslateOutcome(exit_code=EXIT_USAGE, messages=[f"error: cannot read {p}" for p in missing])

    try:
        program = load_files(request.inputs, request.source_language)
    except UnknownExtension as exc:
        return TranslateOutcome(exit_code=EXIT_USAGE, messages=[f"error: {exc.message}"])
    except ValueError as exc:
        return TranslateOutcome(exit_code=EXIT_USAGE, messages=[f"error: {exc}"])
    except DiagnosticsError as exc:
        return TranslateOutcome(exit_code=EXIT_DIAGNOSTICS, messages=[d.format() for d in exc.diagnostics])
    except CrossGLError as exc:
        return TranslateOutcome(exit_code=EXIT_DIAGNOSTICS, messages=[error_line(exc)])

    messages = [d.format() for d in program.warnings]
    if request.strict and program.warnings:
        return TranslateOutcome(exit_code=EXIT_DIAGNOSTICS, messages=messages)

    stem = request.inputs[0].stem
    try:
        units = backend.generate(program.module, stem=stem)
    except CrossGLError as exc:
        return TranslateOutcome(exit_code=EXIT_DIAGNOSTICS, messages=[*messages, error_line(exc)])
    if request.emit_mode == EmitMode.COMBINED:
        units = combine_units(units, stem)

    request.output_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for unit in units:
        path = request.output_dir / unit.suggested_filename
        path.write_text(unit.text, encoding="utf-8", newline="\n")
        written.append(path)
    log.info("wrote %d file(s) for %s", len(written), backend.name)
    return TranslateOutcome(exit_code=EXIT_OK, written=written, messages=messages)

