from __future__ import annotations

import pytest

from crossgl.backends import TargetLanguage
from crossgl.errors import DiagnosticsError, UnknownExtension, UnsupportedConstruct
from crossgl.frontends import SourceLanguage, detect_language, glsl_stage
from crossgl.ir import Stage
from crossgl.pipeline import load_crossgl, load_files, load_source, source_language


@pytest.mark.parametrize(
    ("filename", "language"),
    [
        ("shader.cgl", SourceLanguage.CROSSGL),
        ("a/b/lib.glsl", SourceLanguage.GLSL),
        ("main.VERT", SourceLanguage.GLSL),
        ("main.frag", SourceLanguage.GLSL),
        ("k.comp", SourceLanguage.GLSL),
        ("kernels.cu", SourceLanguage.CUDA),
        ("out.hlsl", TargetLanguage.HLSL),
        ("out.metal", TargetLanguage.METAL),
        ("out.rs", TargetLanguage.RUST),
    ],
)
def test_detect_language(filename, language):
    assert detect_language(filename) == language


def test_unknown_extension():
    with pytest.raises(UnknownExtension):
        detect_language("notes.txt")
    with pytest.raises(UnknownExtension):
        detect_language("Makefile")


def test_output_only_languages_cannot_be_read():
    with pytest.raises(UnsupportedConstruct):
        source_language("shader.metal")


def test_glsl_stage():
    assert glsl_stage("a.vert") == Stage.VERTEX
    assert glsl_stage("a.frag") == Stage.FRAGMENT
    assert glsl_stage("a.comp") == Stage.COMPUTE
    assert glsl_stage("a.glsl") is None


def test_load_crossgl_raises_sorted_diagnostics():
    source = "shader S {\n float f() { return y; }\n int g() { return 1.5; }\n}"
    with pytest.raises(DiagnosticsError) as info:
        load_crossgl(source, "s.cgl")
    lines = [d.location.line for d in info.value.diagnostics]
    assert lines == sorted(lines)
    assert len(lines) >= 2


def test_load_source_dispatches_on_extension():
    glsl = load_source("float twice(float x) { return 2.0 * x; }", file="lib.glsl")
    assert glsl.module.function("twice") is not None
    cuda = load_source("__device__ float twice(float x) { return 2.0f * x; }", file="lib.cu")
    assert cuda.module.function("twice") is not None


def test_load_files_single_crossgl(corpus_dir):
    program = load_files([corpus_dir / "control_flow.cgl"])
    assert program.module.name == "ControlFlow"


def test_load_files_glsl_stages(tmp_path):
    vert = tmp_path / "p.vert"
    vert.write_text("layout(location = 0) in vec3 position;\nvoid main() { gl_Position = vec4(position, 1.0); }\n")
    frag = tmp_path / "p.frag"
    frag.write_text("out vec4 color;\nvoid main() { color = vec4(1.0); }\n")
    m = load_files([vert, frag]).module
    assert [f.key for f in m.entries()] == ["vertex_main", "fragment_main"]


def test_load_files_rejects_mixed_inputs(tmp_path, corpus_dir):
    cu = tmp_path / "k.cu"
    cu.write_text("__device__ float f(float x) { return x; }\n")
    with pytest.raises(ValueError):
        load_files([corpus_dir / "control_flow.cgl", cu])
    with pytest.raises(ValueError):
        load_files([corpus_dir / "control_flow.cgl", corpus_dir / "array_test.cgl"])
    with pytest.raises(ValueError):
        load_files([])
