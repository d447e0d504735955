from __future__ import annotations

import json
import shutil

import numpy as np
import pytest

from crossgl.backends import Backend, OutputUnit, default_registry
from crossgl.conformance import (
    CellStatus,
    CheckFailed,
    FeatureStatus,
    balanced,
    compare_functions,
    format_report,
    relative_delta,
    run_conformance,
    smoke_check,
    write_jsonl,
)

from conftest import CORPUS_PROGRAMS

TARGETS = ["crossgl", "glsl", "hlsl", "metal", "cuda", "rust"]

TEXTURED = """
shader Textured {
    uniform sampler2D albedoMap;

    fragment {
        vec4 main(vec2 uv) {
            return texture(albedoMap, uv);
        }
    }
}
"""


class EchoBackend(Backend):
    name = "echo"
    extensions = (".echo",)

    def map_type(self, t):
        return str(t)

    def generate(self, module, *, stem=None):
        names = " ".join(f.name for f in module.functions)
        return [OutputUnit(suggested_filename=f"{stem}.echo", target=self.name, text=f"{{ {names} }}")]


@pytest.fixture(scope="module")
def bundled_report():
    from crossgl.corpus import BUNDLED_CORPUS

    return run_conformance(BUNDLED_CORPUS, registry=default_registry())


def test_bundled_corpus_passes_every_cell(bundled_report):
    assert bundled_report.programs == list(CORPUS_PROGRAMS)
    assert bundled_report.targets == TARGETS
    assert len(bundled_report.cells) == 36
    failures = [(c.program, c.target, c.error) for c in bundled_report.cells if c.status != CellStatus.PASS]
    assert failures == []
    assert bundled_report.ok


def test_cells_record_their_checks(bundled_report):
    crossgl = bundled_report.cell("complex_pbr", "crossgl")
    assert crossgl.checks == ["generate", "reparse", "ast_equal", "oracle"]
    assert crossgl.oracle_functions == 4
    assert crossgl.oracle_max_delta is not None and crossgl.oracle_max_delta <= 1e-6
    glsl = bundled_report.cell("complex_pbr", "glsl")
    assert glsl.checks == ["generate", "reimport", "typecheck", "oracle"]
    assert glsl.units == 2
    assert bundled_report.cell("matrix_compute", "cuda").checks == ["generate", "smoke", "reimport", "kernels"]
    assert bundled_report.cell("simple_shader", "cuda").checks == ["generate", "smoke"]
    assert bundled_report.cell("array_test", "metal").checks == ["generate", "smoke"]


def test_oracle_covers_every_pure_helper(bundled_report):
    total = sum(c.oracle_functions for c in bundled_report.cells if c.target == "crossgl")
    assert total == 24


def test_feature_matrix(bundled_report):
    assert bundled_report.feature("textures", "rust").status == FeatureStatus.UNSUPPORTED
    assert bundled_report.feature("textures", "glsl").status == FeatureStatus.NOT_EXERCISED
    assert bundled_report.feature("shaders", "cuda").status == FeatureStatus.DEGRADED
    assert bundled_report.feature("shaders", "rust").status == FeatureStatus.DEGRADED
    kernels = bundled_report.feature("compute_kernels", "glsl")
    assert kernels.status == FeatureStatus.SUPPORTED
    assert kernels.exercised_by == ["array_test", "matrix_compute", "particle_step"]
    assert len(bundled_report.features) == 8 * 6


def test_texture_program_fails_only_on_rust(tmp_path, corpus_dir):
    for path in corpus_dir.glob("*.cgl"):
        shutil.copy(path, tmp_path / path.name)
    (tmp_path / "textured.cgl").write_text(TEXTURED)
    report = run_conformance(tmp_path, registry=default_registry())
    failing = [(c.program, c.target) for c in report.cells if c.status == CellStatus.FAIL]
    assert failing == [("textured", "rust")]
    cell = report.cell("textured", "rust")
    assert cell.error_type == "UnsupportedConstruct"
    assert cell.error["code"] == "UNSUPPORTED_CONSTRUCT"
    assert report.feature("textures", "glsl").status == FeatureStatus.SUPPORTED
    assert report.feature("textures", "glsl").exercised_by == ["textured"]
    assert report.feature("textures", "rust").status == FeatureStatus.UNSUPPORTED
    assert not report.ok


def test_registered_backend_gets_a_column(tmp_path, corpus_dir):
    shutil.copy(corpus_dir / "control_flow.cgl", tmp_path)
    registry = default_registry()
    registry.register("echo", EchoBackend())
    report = run_conformance(tmp_path, registry=registry, workers=3)
    assert report.targets == [*TARGETS, "echo"]
    assert [c.target for c in report.cells] == [*TARGETS, "echo"]
    assert report.cell("control_flow", "echo").status == CellStatus.PASS
    assert report.feature("functions", "echo").status == FeatureStatus.SUPPORTED


def test_broken_backend_fails_its_cells(tmp_path, corpus_dir):
    class Broken(EchoBackend):
        name = "broken"

        def generate(self, module, *, stem=None):
            return [OutputUnit(suggested_filename="x.broken", target=self.name, text="{ unbalanced")]

    shutil.copy(corpus_dir / "simple_shader.cgl", tmp_path)
    registry = default_registry()
    registry.register("broken", Broken())
    report = run_conformance(tmp_path, registry=registry)
    cell = report.cell("simple_shader", "broken")
    assert cell.status == CellStatus.FAIL
    assert cell.error_type == "CheckFailed"
    assert "unbalanced" in cell.error["message"]
    assert report.feature("shaders", "broken").status == FeatureStatus.NOT_EXERCISED


def test_unloadable_program_fails_every_cell(tmp_path):
    (tmp_path / "bad.cgl").write_text("shader Bad { int f() { return 1.5; } }\n")
    report = run_conformance(tmp_path, registry=default_registry())
    assert [c.status for c in report.cells] == [CellStatus.FAIL] * 6
    assert {c.error_type for c in report.cells} == {"DiagnosticsError"}


def test_empty_corpus(tmp_path):
    report = run_conformance(tmp_path, registry=default_registry())
    assert report.cells == []
    assert format_report(report) == "no corpus programs found\n"


def test_format_report(bundled_report):
    text = format_report(bundled_report, color=False)
    lines = text.splitlines()
    assert lines[0].split() == ["program", *TARGETS]
    assert lines[1].split() == ["array_test"] + ["PASS"] * 6
    assert "textures" in text
    assert lines[-1].startswith("36/36 cells passed in ")
    assert "\x1b[" not in text
    assert "\x1b[32m" in format_report(bundled_report, color=True)


def test_write_jsonl(bundled_report, tmp_path):
    path = tmp_path / "out" / "report.jsonl"
    write_jsonl(bundled_report, path)
    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert len(records) == 36 + 48
    assert records[0]["kind"] == "cell"
    assert records[0]["program"] == "array_test"
    assert records[-1]["kind"] == "feature"


def test_balanced():
    assert balanced("f(a[0]) { }")
    assert not balanced("f(a[0] { }")
    assert not balanced(") (")


def test_smoke_check_requires_function_names(corpus_module):
    m = corpus_module("control_flow")
    unit = OutputUnit(suggested_filename="x", target="x", text="{ factorial }")
    with pytest.raises(CheckFailed, match="fibonacci"):
        smoke_check(m, [unit])
    with pytest.raises(CheckFailed, match="empty"):
        smoke_check(m, [])


def test_relative_delta():
    assert relative_delta(1.0, 1.0) == 0.0
    assert relative_delta(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0
    assert relative_delta(2.0, 1.0) > 0.0


def test_compare_functions_detects_differences(compile_source):
    a = compile_source("shader S { float f(float x) { return x * 2.0; } }")
    b = compile_source("shader S { float f(float x) { return x * 2.0 + 0.001; } }")
    assert compare_functions(a, a, ["f"])[0] == 1
    with pytest.raises(CheckFailed, match="oracle: f differs"):
        compare_functions(a, b, ["f"])


def test_compare_functions_matches_runtime_errors(compile_source):
    a = compile_source("shader S { int f(int x) { return 8 / x; } }")
    count, _ = compare_functions(a, a, ["f"])
    assert count == 1
