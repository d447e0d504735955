from __future__ import annotations

from pathlib import Path

import pytest

from crossgl.corpus import BUNDLED_CORPUS
from crossgl.ir import ShaderModule
from crossgl.pipeline import load_crossgl

CORPUS_PROGRAMS = (
    "array_test",
    "complex_pbr",
    "control_flow",
    "matrix_compute",
    "particle_step",
    "simple_shader",
)


@pytest.fixture
def corpus_dir() -> Path:
    return BUNDLED_CORPUS


@pytest.fixture
def corpus_module():
    """Load a bundled program by stem, validated and typechecked."""

    def load(name: str) -> ShaderModule:
        path = BUNDLED_CORPUS / f"{name}.cgl"
        return load_crossgl(path.read_text(encoding="utf-8"), str(path)).module

    return load


@pytest.fixture
def compile_source():
    def compile(source: str, file: str = "test.cgl") -> ShaderModule:
        return load_crossgl(source, file).module

    return compile
