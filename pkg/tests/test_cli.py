from __future__ import annotations

import json

import pytest

from crossgl.__main__ import main
from crossgl.backends import Backend, OutputUnit, default_registry


class EchoBackend(Backend):
    name = "echo"
    extensions = (".echo", ".ech")

    def map_type(self, t):
        return str(t)

    def generate(self, module, *, stem=None):
        return [OutputUnit(suggested_filename=f"{stem}.echo", target=self.name, text="{}")]


@pytest.fixture(autouse=True)
def quiet_env(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    monkeypatch.delenv("CROSSGL_WORKERS", raising=False)


def run(capsys, *argv, registry=None):
    code = main(list(argv), registry=registry or default_registry())
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv", [["list-targets"], ["--list-targets"]])
def test_list_targets(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    lines = out.splitlines()
    assert [line.split("\t")[0] for line in lines] == ["crossgl", "glsl", "hlsl", "metal", "cuda", "rust"]
    assert lines[1] == "glsl\t.vert .frag .comp .glsl"


def test_list_targets_includes_registered_backends(capsys):
    registry = default_registry()
    registry.register("echo", EchoBackend())
    code, out, _ = run(capsys, "list-targets", registry=registry)
    assert code == 0
    assert out.splitlines()[-1] == "echo\t.echo .ech"


def test_translate(capsys, corpus_dir, tmp_path):
    code, out, _ = run(capsys, "translate", str(corpus_dir / "simple_shader.cgl"), "-t", "hlsl", "-o", str(tmp_path))
    assert code == 0
    assert out.strip() == str(tmp_path / "simple_shader.hlsl")
    assert "VSMain" in (tmp_path / "simple_shader.hlsl").read_text()


def test_translate_separate_glsl(capsys, corpus_dir, tmp_path):
    code, _, _ = run(
        capsys,
        "translate",
        str(corpus_dir / "simple_shader.cgl"),
        "--target",
        "glsl",
        "--output-dir",
        str(tmp_path),
        "--emit-mode",
        "separate",
    )
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["simple_shader.frag", "simple_shader.vert"]


def test_translate_unknown_target(capsys, corpus_dir, tmp_path):
    code, _, err = run(capsys, "translate", str(corpus_dir / "simple_shader.cgl"), "-t", "vulkan", "-o", str(tmp_path))
    assert code == 2
    assert "unknown target" in err


def test_translate_reports_diagnostics_on_stderr(capsys, tmp_path):
    bad = tmp_path / "bad.cgl"
    bad.write_text("shader Bad { int f() { return 1.5; } }")
    code, out, err = run(capsys, "translate", str(bad), "-t", "glsl", "-o", str(tmp_path))
    assert code == 1
    assert out == ""
    assert f"{bad}:1:" in err


def test_translate_requires_target(capsys, corpus_dir):
    with pytest.raises(SystemExit) as info:
        main(["translate", str(corpus_dir / "simple_shader.cgl")])
    assert info.value.code == 2


def test_eval(capsys, corpus_dir):
    code, out, _ = run(
        capsys, "eval", str(corpus_dir / "complex_pbr.cgl"), "distributionGGX", "vec3(0, 0, 1)", "vec3(0, 0, 1)", "0.5"
    )
    assert code == 0
    assert float(out) == pytest.approx(5.09296, abs=1e-4)


def test_eval_vector_result(capsys, corpus_dir):
    code, out, _ = run(capsys, "eval", str(corpus_dir / "simple_shader.cgl"), "flipY", "vec2(0.25, 0.25)")
    assert code == 0
    assert out.strip() == "vec2(0.25, 0.75)"


def test_eval_with_uniform(capsys, tmp_path):
    src = tmp_path / "u.cgl"
    src.write_text("shader U { uniform float k; float f(float x) { return x * k; } }")
    code, out, _ = run(capsys, "eval", str(src), "f", "2.0", "--uniform", "k=1.5")
    assert code == 0
    assert out.strip() == "3.0"
    code, _, err = run(capsys, "eval", str(src), "f", "2.0")
    assert code == 1
    assert "Unbound" in err


def test_eval_bad_uniform_syntax(capsys, tmp_path):
    src = tmp_path / "u.cgl"
    src.write_text("shader U { float f(float x) { return x; } }")
    code, _, err = run(capsys, "eval", str(src), "f", "1.0", "--uniform", "k")
    assert code == 2
    assert "NAME=VALUE" in err


def test_eval_runtime_error(capsys, tmp_path):
    src = tmp_path / "div.cgl"
    src.write_text("shader D { int f(int x) { return 8 / x; } }")
    code, _, err = run(capsys, "eval", str(src), "f", "0")
    assert code == 1
    assert "DivisionByZero" in err


def test_eval_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "eval", str(tmp_path / "nope.cgl"), "f")
    assert code == 2
    assert "cannot read" in err


def test_conformance(capsys, corpus_dir, tmp_path):
    (tmp_path / "corpus").mkdir()
    (tmp_path / "corpus" / "control_flow.cgl").write_text((corpus_dir / "control_flow.cgl").read_text())
    report = tmp_path / "report.jsonl"
    code, out, _ = run(capsys, "conformance", str(tmp_path / "corpus"), "--report", str(report))
    assert code == 0
    assert "6/6 cells passed" in out
    assert "\x1b[" not in out
    kinds = [json.loads(line)["kind"] for line in report.read_text().splitlines()]
    assert kinds.count("cell") == 6


def test_conformance_failure_exit_code(capsys, tmp_path):
    (tmp_path / "bad.cgl").write_text("shader Bad { int f() { return 1.5; } }")
    code, out, _ = run(capsys, "conformance", str(tmp_path))
    assert code == 1
    assert "0/6 cells passed" in out


def test_conformance_missing_directory(capsys, tmp_path):
    code, _, err = run(capsys, "conformance", str(tmp_path / "missing"))
    assert code == 2
    assert "not a directory" in err


def test_no_command_prints_usage(capsys):
    code, _, err = run(capsys)
    assert code == 2
    assert "usage:" in err
