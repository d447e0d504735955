from __future__ import annotations

import numpy as np
import pytest

from crossgl.backends import generate
from crossgl.conformance import compare_functions
from crossgl.corpus import pure_functions
from crossgl.errors import UnsupportedConstruct
from crossgl.frontends import glsl_stage
from crossgl.ir import Stage
from crossgl.interpreter import eval_function
from crossgl.pipeline import load_glsl

HAND_WRITTEN_FRAGMENT = """
#version 450
precision highp float;

in vec2 uv;
out vec4 color;
uniform float brightness;

float luma(vec3 c) {
    return dot(c, vec3(0.299, 0.587, 0.114));
}

void main() {
    float l = luma(vec3(uv, 0.5)) * brightness;
    color = vec4(l, l, l, 1.0);
}
"""

HAND_WRITTEN_COMPUTE = """
#version 450
layout(local_size_x = 16) in;

layout(std430, binding = 0) buffer Values { float values[]; };
layout(std430, binding = 1) buffer Count { int count; };

void main() {
    int i = int(gl_GlobalInvocationID.x);
    if (i < count) {
        values[i] = values[i] * 2.0;
    }
}
"""


def round_trip(module, stem):
    units = generate(module, "glsl", stem=stem)
    return load_glsl([(glsl_stage(u.suggested_filename), u.text, u.suggested_filename) for u in units])


def test_hand_written_fragment_is_repacked():
    program = load_glsl([(Stage.FRAGMENT, HAND_WRITTEN_FRAGMENT, "shade.frag")], name="Shade")
    m = program.module
    assert m.name == "Shade"
    entry = m.function("fragment_main")
    assert entry is not None
    assert entry.stage == Stage.FRAGMENT
    assert [s.name for s in m.structs] == ["FragmentInput"]
    assert "precision statement ignored" in [w.message for w in program.warnings]

    assert eval_function(m, "luma", [np.ones(3)]) == pytest.approx(1.0)
    result = eval_function(m, "fragment_main", [{"uv": np.zeros(2)}], uniforms={"brightness": 2.0})
    assert np.allclose(result, [0.114, 0.114, 0.114, 1.0])


def test_hand_written_compute_takes_buffers_as_parameters():
    m = load_glsl([(Stage.COMPUTE, HAND_WRITTEN_COMPUTE, "double.comp")], name="Double").module
    (kernel,) = m.entries(Stage.COMPUTE)
    assert [p.name for p in kernel.params] == ["values", "count"]
    assert kernel.attributes[0].name == "workgroup_size"
    assert tuple(kernel.attributes[0].args) == (16, 1, 1)


def test_stages_merge_into_one_module():
    vert = """
    #version 450
    layout(location = 0) in vec3 position;
    out vec2 uv;
    void main() {
        uv = position.xy;
        gl_Position = vec4(position, 1.0);
    }
    """
    frag = """
    #version 450
    in vec2 uv;
    out vec4 color;
    void main() { color = vec4(uv, 0.0, 1.0); }
    """
    m = load_glsl([(Stage.FRAGMENT, frag, "a.frag"), (Stage.VERTEX, vert, "a.vert")], name="Pair").module
    assert [f.key for f in m.entries()] == ["vertex_main", "fragment_main"]
    assert [s.name for s in m.structs] == ["VertexInput", "VertexOutput"]
    # the fragment input pairs with the vertex output record
    assert str(m.function("fragment_main").params[0].type) == "VertexOutput"


def test_fragment_inputs_never_pair_with_the_vertex_input_record():
    vert = """
    layout(location = 0) in vec4 position;
    layout(location = 1) in vec2 uv;
    out vec2 texCoord;
    void main() {
        texCoord = uv;
        gl_Position = position;
    }
    """
    shared = "in vec4 position;\nout vec4 color;\nvoid main() { color = position; }\n"
    m = load_glsl([(Stage.VERTEX, vert, "a.vert"), (Stage.FRAGMENT, shared, "a.frag")]).module
    assert str(m.function("fragment_main").params[0].type) == "VertexOutput"

    own = "in vec2 uv;\nout vec4 color;\nvoid main() { color = vec4(uv, 0.0, 1.0); }\n"
    m = load_glsl([(Stage.VERTEX, vert, "b.vert"), (Stage.FRAGMENT, own, "b.frag")]).module
    assert str(m.function("fragment_main").params[0].type) == "FragmentInput"


@pytest.mark.parametrize(
    "source",
    [
        "layout(triangles) in;\nvoid f() { }",
        "void f() { EmitVertex(); }",
        "uniform Block { float x; };",
        "float f(out float x) { x = 1.0; return x; }",
        "uint f() { return 1; }",
        "shared float cache[64];",
        "void f(vec3 n) { if (n.x < 0.0) { discard; } }",
    ],
)
def test_unsupported_constructs(source):
    with pytest.raises(UnsupportedConstruct):
        load_glsl([(None, source, "bad.glsl")])


def test_unsupported_construct_names_the_importer():
    with pytest.raises(UnsupportedConstruct) as info:
        load_glsl([(Stage.VERTEX, "void main() { EmitVertex(); }", "g.vert")])
    assert "GLSL importer" in info.value.message
    assert info.value.location.file == "g.vert"


@pytest.mark.parametrize("program", ["simple_shader", "complex_pbr", "control_flow", "array_test"])
def test_generated_glsl_round_trips(corpus_module, program):
    original = corpus_module(program)
    imported = round_trip(original, program).module
    assert imported.name == original.name
    assert {f.key for f in imported.functions} == {f.key for f in original.functions}
    count, worst = compare_functions(original, imported, pure_functions(original))
    assert count == len(pure_functions(original))
    assert worst <= 1e-6


def test_generated_compute_round_trips(corpus_module):
    original = corpus_module("matrix_compute")
    imported = round_trip(original, "mc").module
    kernels = {f.name: [p.name for p in f.params] for f in imported.entries(Stage.COMPUTE)}
    assert kernels == {
        "matmul": ["a", "b", "c", "n"],
        "add": ["a", "b", "c", "n"],
        "rotatePoints": ["xs", "ys", "angle", "n"],
    }
    matmul = imported.function("matmul")
    assert tuple(matmul.attributes[0].args) == (8, 8, 1)
