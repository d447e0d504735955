from __future__ import annotations

from pathlib import Path

import pytest
from pydantic import ValidationError

from crossgl.backends import OutputUnit, default_registry
from crossgl.translate import (
    EXIT_DIAGNOSTICS,
    EXIT_OK,
    EXIT_USAGE,
    EmitMode,
    TranslateRequest,
    combine_units,
    run_translate,
)

TEXTURED = """
shader Textured {
    uniform sampler2D albedoMap;
    fragment {
        vec4 main(vec2 uv) { return texture(albedoMap, uv); }
    }
}
"""


def translate(inputs: list[Path], target: str, out: Path, **kwargs):
    request = TranslateRequest(inputs=inputs, target=target, output_dir=out, **kwargs)
    return run_translate(request, registry=default_registry())


def test_metal_output_file(corpus_dir, tmp_path):
    outcome = translate([corpus_dir / "complex_pbr.cgl"], "metal", tmp_path)
    assert outcome.exit_code == EXIT_OK
    assert outcome.written == [tmp_path / "complex_pbr.metal"]
    text = (tmp_path / "complex_pbr.metal").read_text()
    assert "#include <metal_stdlib>" in text
    assert "distributionGGX" in text


def test_output_directory_is_created(corpus_dir, tmp_path):
    out = tmp_path / "nested" / "dir"
    outcome = translate([corpus_dir / "matrix_compute.cgl"], "cuda", out)
    assert outcome.exit_code == EXIT_OK
    assert (out / "matrix_compute.cu").is_file()


def test_glsl_separate_units(corpus_dir, tmp_path):
    outcome = translate([corpus_dir / "complex_pbr.cgl"], "glsl", tmp_path, emit_mode=EmitMode.SEPARATE)
    assert outcome.exit_code == EXIT_OK
    assert sorted(p.name for p in outcome.written) == ["complex_pbr.frag", "complex_pbr.vert"]


def test_glsl_combined_by_default(corpus_dir, tmp_path):
    outcome = translate([corpus_dir / "complex_pbr.cgl"], "glsl", tmp_path)
    assert outcome.written == [tmp_path / "complex_pbr.glsl"]
    text = outcome.written[0].read_text()
    assert text.index("// ---- complex_pbr.vert ----") < text.index("// ---- complex_pbr.frag ----")


def test_unknown_target(corpus_dir, tmp_path):
    outcome = translate([corpus_dir / "simple_shader.cgl"], "vulkan", tmp_path)
    assert outcome.exit_code == EXIT_USAGE
    assert outcome.messages[0].startswith("error: unknown target 'vulkan'")
    assert list(tmp_path.iterdir()) == []


def test_missing_input(tmp_path):
    outcome = translate([tmp_path / "absent.cgl"], "glsl", tmp_path)
    assert outcome.exit_code == EXIT_USAGE
    assert outcome.messages == [f"error: cannot read {tmp_path / 'absent.cgl'}"]


def test_unknown_extension(tmp_path):
    notes = tmp_path / "notes.txt"
    notes.write_text("shader S { }")
    assert translate([notes], "glsl", tmp_path).exit_code == EXIT_USAGE


def test_source_language_overrides_extension(tmp_path):
    src = tmp_path / "shader.txt"
    src.write_text("shader S { float f(float x) { return x; } }")
    outcome = translate([src], "hlsl", tmp_path, source_language="crossgl")
    assert outcome.exit_code == EXIT_OK
    assert outcome.written == [tmp_path / "shader.hlsl"]


def test_diagnostics_exit_code(tmp_path):
    bad = tmp_path / "bad.cgl"
    bad.write_text("shader Bad {\n    int f() { return missing; }\n}\n")
    outcome = translate([bad], "glsl", tmp_path)
    assert outcome.exit_code == EXIT_DIAGNOSTICS
    assert outcome.messages[0].startswith(f"{bad}:2:")
    assert "error" in outcome.messages[0]


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cgl"
    bad.write_text("shader Bad { float f( }")
    outcome = translate([bad], "glsl", tmp_path)
    assert outcome.exit_code == EXIT_DIAGNOSTICS
    assert "expected" in outcome.messages[0]


def test_unsupported_texture_on_rust(tmp_path):
    src = tmp_path / "textured.cgl"
    src.write_text(TEXTURED)
    outcome = translate([src], "rust", tmp_path)
    assert outcome.exit_code == EXIT_DIAGNOSTICS
    assert "texture sampling is not supported by rust" in outcome.messages[-1]
    assert not (tmp_path / "textured.rs").exists()


def test_strict_mode_fails_on_warnings(tmp_path):
    lib = tmp_path / "lib.glsl"
    lib.write_text("precision highp float;\nfloat twice(float x) { return 2.0 * x; }\n")
    relaxed = translate([lib], "hlsl", tmp_path)
    assert relaxed.exit_code == EXIT_OK
    assert any("precision statement ignored" in m for m in relaxed.messages)
    strict = translate([lib], "hlsl", tmp_path / "strict", strict=True)
    assert strict.exit_code == EXIT_DIAGNOSTICS
    assert not (tmp_path / "strict").exists()


def test_request_needs_inputs(tmp_path):
    with pytest.raises(ValidationError):
        TranslateRequest(inputs=[], target="glsl", output_dir=tmp_path)


def test_combine_units():
    single = [OutputUnit(suggested_filename="a.comp", target="glsl", text="x\n")]
    assert combine_units(single, "a") == single
    units = [
        OutputUnit(suggested_filename="a_k1.comp", target="glsl", text="one\n"),
        OutputUnit(suggested_filename="a_k2.comp", target="glsl", text="two\n"),
    ]
    (combined,) = combine_units(units, "a")
    assert combined.suggested_filename == "a.comp"
    assert combined.text == "// ---- a_k1.comp ----\none\n\n// ---- a_k2.comp ----\ntwo\n"
