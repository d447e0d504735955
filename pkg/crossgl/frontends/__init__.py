"""Importers from external source languages into the CrossGL IR."""

from __future__ import annotations

from enum import Enum
from pathlib import PurePath

from ..backends import TargetLanguage
from ..errors import UnknownExtension
from ..ir import Stage
from .cuda import import_cuda
from .glsl import import_glsl


class SourceLanguage(str, Enum):
    CROSSGL = "crossgl"
    GLSL = "glsl"
    CUDA = "cuda"


INPUT_EXTENSIONS: dict[str, SourceLanguage] = {
    ".cgl": SourceLanguage.CROSSGL,
    ".glsl": SourceLanguage.GLSL,
    ".vert": SourceLanguage.GLSL,
    ".frag": SourceLanguage.GLSL,
    ".comp": SourceLanguage.GLSL,
    ".cu": SourceLanguage.CUDA,
}

OUTPUT_EXTENSIONS: dict[str, TargetLanguage] = {
    ".hlsl": TargetLanguage.HLSL,
    ".metal": TargetLanguage.METAL,
    ".rs": TargetLanguage.RUST,
}

GLSL_STAGE_EXTENSIONS: dict[str, Stage] = {".vert": Stage.VERTEX, ".frag": Stage.FRAGMENT, ".comp": Stage.COMPUTE}


def detect_language(filename: str) -> SourceLanguage | TargetLanguage:
    suffix = PurePath(filename).suffix.lower()
    if suffix in INPUT_EXTENSIONS:
        return INPUT_EXTENSIONS[suffix]
    if suffix in OUTPUT_EXTENSIONS:
        return OUTPUT_EXTENSIONS[suffix]
    raise UnknownExtension(filename)


def glsl_stage(filename: str) -> Stage | None:
    """Stage implied by a GLSL file name; None for `.glsl`."""

    return GLSL_STAGE_EXTENSIONS.get(PurePath(filename).suffix.lower())


__all__ = ["SourceLanguage", "detect_language", "glsl_stage", "import_cuda", "import_glsl"]
