"""Front half of the pipeline: sources in, validated and typechecked module out.

    detect/import -> validate -> typecheck -> optimize

Code generation is `backends.generate`; callers combine the two.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .diagnostics import Diagnostic, Severity, sort_diagnostics
from .errors import DiagnosticsError, UnsupportedConstruct
from .frontends import SourceLanguage, detect_language, glsl_stage, import_cuda, import_glsl
from .ir import ShaderModule, Stage, optimize
from .parser import parse_source
from .semantics import analyze

log = logging.getLogger("crossgl.pipeline")


@dataclass(slots=True)
class Program:
    """A checked module plus the non-fatal diagnostics collected on the way."""

    module: ShaderModule
    warnings: list[Diagnostic] = field(default_factory=list)


def check(module: ShaderModule, warnings: list[Diagnostic] | None = None) -> Program:
    """Validate and typecheck in place; raise DiagnosticsError when any error is reported."""

    diags = analyze(module)
    errors = [d for d in diags if d.severity == Severity.ERROR]
    if errors:
        raise DiagnosticsError(sort_diagnostics(errors))
    collected = sort_diagnostics([*(warnings or []), *diags])
    log.debug("checked %s: %d warning(s)", module.name, len(collected))
    return Program(optimize(module), collected)


def load_crossgl(source: str, file: str = "<memory>") -> Program:
    return check(parse_source(source, file))


def load_glsl(units: Sequence[tuple[Stage | None, str, str]], *, name: str | None = None) -> Program:
    warnings: list[Diagnostic] = []
    module = import_glsl(units, warnings, name=name)
    return check(module, warnings)


def load_cuda(source: str, file: str = "<cuda>", *, name: str | None = None) -> Program:
    warnings: list[Diagnostic] = []
    module = import_cuda(source, warnings, file=file, name=name)
    return check(module, warnings)


def source_language(filename: str) -> SourceLanguage:
    """Input language implied by a file name; output-only extensions are rejected."""

    lang = detect_language(filename)
    if not isinstance(lang, SourceLanguage):
        raise UnsupportedConstruct(f"{lang.value} input", "the importers", f"{filename} cannot be read back")
    return lang


def load_source(source: str, *, file: str, language: SourceLanguage | None = None) -> Program:
    lang = language or source_language(file)
    if lang == SourceLanguage.GLSL:
        return load_glsl([(glsl_stage(file), source, file)])
    if lang == SourceLanguage.CUDA:
        return load_cuda(source, file)
    return load_crossgl(source, file)


def load_files(paths: Sequence[Path], language: SourceLanguage | None = None) -> Program:
    """Read one CrossGL/CUDA file, or any number of GLSL stage files forming one program."""

    if not paths:
        raise ValueError("no input files")
    langs = {language or source_language(p.name) for p in paths}
    if len(langs) != 1:
        raise ValueError("inputs mix source languages")
    lang = langs.pop()
    if lang == SourceLanguage.GLSL:
        units = [(glsl_stage(p.name), p.read_text(encoding="utf-8"), str(p)) for p in paths]
        return load_glsl(units)
    if len(paths) > 1:
        raise ValueError(f"only GLSL programs may span several files, got {len(paths)} {lang.value} inputs")
    return load_source(paths[0].read_text(encoding="utf-8"), file=str(paths[0]), language=lang)
