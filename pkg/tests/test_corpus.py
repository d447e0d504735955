from __future__ import annotations

import pytest

from crossgl.corpus import corpus_files, load_corpus, load_program, program_features, pure_functions

from conftest import CORPUS_PROGRAMS


def test_bundled_corpus_lists_every_program(corpus_dir):
    assert [p.stem for p in corpus_files(corpus_dir)] == list(CORPUS_PROGRAMS)
    assert [p.name for p in load_corpus(corpus_dir)] == list(CORPUS_PROGRAMS)


@pytest.mark.parametrize(
    ("program", "features"),
    [
        ("simple_shader", {"basic_syntax", "structures", "functions", "shaders"}),
        ("complex_pbr", {"basic_syntax", "structures", "functions", "shaders", "control_flow", "arrays"}),
        ("control_flow", {"basic_syntax", "functions", "shaders", "control_flow"}),
        ("matrix_compute", {"basic_syntax", "functions", "compute_kernels", "control_flow", "arrays"}),
        ("array_test", {"basic_syntax", "functions", "compute_kernels", "control_flow", "arrays"}),
        ("particle_step", {"basic_syntax", "functions", "compute_kernels", "control_flow", "arrays"}),
    ],
)
def test_program_features(corpus_module, program, features):
    assert program_features(corpus_module(program)) == frozenset(features)


def test_corpus_covers_every_in_scope_feature(corpus_dir):
    from crossgl.conformance import IN_SCOPE_FEATURES

    covered = set().union(*(p.features for p in load_corpus(corpus_dir)))
    assert set(IN_SCOPE_FEATURES) <= covered


def test_pure_functions(corpus_module):
    assert pure_functions(corpus_module("simple_shader")) == ("flipY", "luminance")
    assert pure_functions(corpus_module("matrix_compute")) == ("rotation", "rotate")
    assert pure_functions(corpus_module("control_flow")) == (
        "factorial",
        "fibonacci",
        "gcd",
        "collatzSteps",
        "nestedSum",
        "classify",
    )


def test_functions_reading_uniforms_are_not_pure(compile_source):
    m = compile_source(
        "shader S { uniform float k; float a(float x) { return x * k; } float b(float x) { return a(x); } "
        "float c(float x) { return x; } }"
    )
    assert pure_functions(m) == ("c",)


def test_load_program_metadata(corpus_dir):
    program, checked = load_program(corpus_dir / "matrix_compute.cgl")
    assert program.name == "matrix_compute"
    assert program.compute_only
    assert checked.module.name == "MatrixCompute"
    graphics, _ = load_program(corpus_dir / "simple_shader.cgl")
    assert not graphics.compute_only


def test_unloadable_programs_are_skipped(tmp_path, caplog):
    (tmp_path / "good.cgl").write_text("shader Good { float f(float x) { return x; } }\n")
    (tmp_path / "bad.cgl").write_text("shader Bad { float f( }\n")
    assert [p.name for p in load_corpus(tmp_path)] == ["good"]
    assert "bad.cgl" in caplog.text
