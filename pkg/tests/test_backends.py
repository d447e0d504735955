from __future__ import annotations

import re

import pytest

from crossgl.backends import (
    Backend,
    BackendRegistry,
    OutputUnit,
    TargetLanguage,
    default_registry,
    generate,
    get_registry,
    map_type,
    register_backend,
)
from crossgl.backends.base import FEATURES, Support, format_float, recursive_functions
from crossgl.errors import DuplicateBackend, UnknownTarget, UnsupportedConstruct, UnsupportedType
from crossgl.ir import BOOL, FLOAT, INT, MAT2, MAT4, SAMPLER2D, VEC2, VEC3, VEC4, VOID, ArrayType

from conftest import CORPUS_PROGRAMS

BUILTIN_TARGETS = ["crossgl", "glsl", "hlsl", "metal", "cuda", "rust"]


class EchoBackend(Backend):
    name = "echo"
    extensions = (".echo",)

    def map_type(self, t):
        return f"echo_{t}"

    def generate(self, module, *, stem=None):
        return [OutputUnit(suggested_filename=f"{stem or module.name}.echo", target=self.name, text=module.name)]


@pytest.fixture
def registry():
    return default_registry()


def test_registration_order(registry):
    assert registry.targets() == BUILTIN_TARGETS
    assert [b.name for b in registry] == BUILTIN_TARGETS
    assert len(registry) == 6


def test_register_backend_adds_a_seventh_target(registry, corpus_module):
    register_backend("echo", EchoBackend(), registry)
    assert registry.targets() == [*BUILTIN_TARGETS, "echo"]
    units = generate(corpus_module("simple_shader"), "echo", registry, stem="simple")
    assert units == [OutputUnit(suggested_filename="simple.echo", target="echo", text="SimpleShader")]
    assert map_type(VEC3, "echo", registry) == "echo_vec3"


def test_duplicate_backend(registry):
    with pytest.raises(DuplicateBackend):
        register_backend(TargetLanguage.GLSL, EchoBackend(), registry)


def test_frozen_registry_rejects_registration(registry):
    registry.freeze()
    with pytest.raises(RuntimeError):
        registry.register("echo", EchoBackend())


def test_empty_registry_is_used_as_given(corpus_module):
    local = BackendRegistry()
    assert register_backend("echo", EchoBackend(), local) is local
    assert local.targets() == ["echo"]
    assert "echo" not in get_registry()
    units = generate(corpus_module("simple_shader"), "echo", local, stem="s")
    assert units[0].suggested_filename == "s.echo"
    assert map_type(VEC3, "echo", local) == "echo_vec3"
    with pytest.raises(UnknownTarget):
        generate(corpus_module("simple_shader"), "glsl", BackendRegistry())


def test_process_registry_is_frozen():
    registry = get_registry()
    assert registry.frozen
    assert registry is get_registry()
    assert registry.targets() == BUILTIN_TARGETS
    with pytest.raises(RuntimeError):
        register_backend("echo", EchoBackend())


def test_unknown_target(registry, corpus_module):
    with pytest.raises(UnknownTarget) as info:
        generate(corpus_module("simple_shader"), "vulkan", registry)
    assert "glsl" in info.value.message


def test_target_names_are_case_insensitive(registry):
    assert "GLSL" in registry
    assert registry.get("Metal").name == "metal"


@pytest.mark.parametrize(
    ("t", "expected"),
    [
        (FLOAT, ["float", "float", "float", "float", "float", "f32"]),
        (INT, ["int", "int", "int", "int", "int", "i32"]),
        (BOOL, ["bool", "bool", "bool", "bool", "bool", "bool"]),
        (VOID, ["void", "void", "void", "void", "void", "()"]),
        (VEC2, ["vec2", "vec2", "float2", "float2", "float2", "Vec2"]),
        (VEC4, ["vec4", "vec4", "float4", "float4", "float4", "Vec4"]),
        (MAT2, ["mat2", "mat2", "float2x2", "float2x2", "cgl_mat2", "Mat2"]),
        (MAT4, ["mat4", "mat4", "float4x4", "float4x4", "cgl_mat4", "Mat4"]),
        (ArrayType(FLOAT, 4), ["float[4]", "float[4]", "float[4]", "float[4]", "float[4]", "[f32; 4]"]),
    ],
)
def test_map_type(registry, t, expected):
    assert [map_type(t, target, registry) for target in BUILTIN_TARGETS] == expected


def test_map_type_samplers(registry):
    assert map_type(SAMPLER2D, "glsl", registry) == "sampler2D"
    assert map_type(SAMPLER2D, "metal", registry) == "texture2d<float>"
    assert map_type(SAMPLER2D, "cuda", registry) == "cudaTextureObject_t"
    with pytest.raises(UnsupportedType):
        map_type(SAMPLER2D, "rust", registry)


def test_rust_unsized_array(registry):
    assert map_type(ArrayType(VEC3), "rust", registry) == "Vec<Vec3>"


def test_feature_metadata(registry):
    assert registry.get("rust").feature("textures").status == Support.UNSUPPORTED
    assert registry.get("rust").feature("shaders").status == Support.DEGRADED
    assert registry.get("cuda").feature("shaders").status == Support.DEGRADED
    for feature in FEATURES:
        assert registry.get("glsl").feature(feature).status == Support.SUPPORTED


@pytest.mark.parametrize("program", CORPUS_PROGRAMS)
@pytest.mark.parametrize("target", BUILTIN_TARGETS)
def test_every_backend_translates_the_corpus(registry, corpus_module, program, target):
    units = generate(corpus_module(program), target, registry, stem=program)
    assert units
    for unit in units:
        assert unit.target == target
        assert unit.suggested_filename.startswith(program)
        assert unit.text.strip()


def test_glsl_units_per_stage(registry, corpus_module):
    units = generate(corpus_module("complex_pbr"), "glsl", registry, stem="complex_pbr")
    assert [u.suggested_filename for u in units] == ["complex_pbr.vert", "complex_pbr.frag"]
    vert = units[0].text
    assert "#version 450" in vert
    assert "void main()" in vert
    assert "vertex_main(stage_in)" in vert
    assert "gl_Position = stage_out.clipPosition;" in vert


def test_glsl_one_unit_per_kernel(registry, corpus_module):
    units = generate(corpus_module("matrix_compute"), "glsl", registry, stem="mc")
    assert [u.suggested_filename for u in units] == ["mc_matmul.comp", "mc_add.comp", "mc_rotatePoints.comp"]
    assert "layout(local_size_x = 8, local_size_y = 8, local_size_z = 1) in;" in units[0].text
    assert "gl_WorkGroupID" in units[1].text


def test_glsl_library_unit(registry, compile_source):
    m = compile_source("shader Lib { float twice(float x) { return x * 2.0; } }")
    units = generate(m, "glsl", registry)
    assert [u.suggested_filename for u in units] == ["Lib.glsl"]
    assert "float twice(float x)" in units[0].text


def test_cuda_kernels_and_device_helpers(registry, corpus_module):
    (unit,) = generate(corpus_module("matrix_compute"), "cuda", registry, stem="matrix_compute")
    text = unit.text
    assert unit.suggested_filename == "matrix_compute.cu"
    for kernel in ("matmul", "add", "rotatePoints"):
        assert len(re.findall(rf"__global__ void {kernel}\(", text)) == 1
    assert "__global__ void add(float* a, float* b, float* c, int n)" in text
    assert "__device__ cgl_mat2 rotation(float angle)" in text
    assert "__device__ float2 rotate(float2 v, float angle)" in text
    assert "((int)threadIdx.x)" in text


def test_cuda_graphics_entries_become_device_functions(registry, corpus_module):
    (unit,) = generate(corpus_module("simple_shader"), "cuda", registry)
    assert "__global__" not in unit.text.split("using namespace cgl;")[1]
    assert "__device__ VertexOutput vertex_main(VertexInput input)" in unit.text


def test_hlsl_entry_names(registry, corpus_module):
    (pbr,) = generate(corpus_module("complex_pbr"), "hlsl", registry)
    assert "VSMain(" in pbr.text
    assert "PSMain(" in pbr.text
    (kernels,) = generate(corpus_module("matrix_compute"), "hlsl", registry)
    assert "[numthreads(8, 8, 1)]" in kernels.text
    assert "void CSMain_add(" in kernels.text
    (single,) = generate(corpus_module("particle_step"), "hlsl", registry)
    assert "void CSMain(" in single.text
    assert "[numthreads(128, 1, 1)]" in single.text


def test_metal_kernel(registry, corpus_module):
    (unit,) = generate(corpus_module("matrix_compute"), "metal", registry, stem="mc")
    assert unit.suggested_filename == "mc.metal"
    assert "#include <metal_stdlib>" in unit.text
    assert "kernel void add(" in unit.text


def test_rust_functions(registry, corpus_module):
    (unit,) = generate(corpus_module("array_test"), "rust", registry)
    assert unit.suggested_filename == "ArrayTest.rs"
    assert "pub fn sumArray(" in unit.text
    assert "[f32; 4]" in unit.text


def test_crossgl_output_keeps_stage_blocks(registry, corpus_module):
    (unit,) = generate(corpus_module("simple_shader"), "crossgl", registry)
    assert unit.text.lstrip().startswith("//")
    assert "shader SimpleShader {" in unit.text
    assert "vertex {" in unit.text
    assert "fragment {" in unit.text


def test_generation_is_deterministic(registry, corpus_module):
    m = corpus_module("complex_pbr")
    for target in BUILTIN_TARGETS:
        assert generate(m, target, registry) == generate(m, target, registry)


@pytest.mark.parametrize(
    ("value", "text"),
    [(1.0, "1.0"), (0.5, "0.5"), (1e-05, "1.0e-05"), (-2.0, "-2.0"), (3.14159265, "3.14159265")],
)
def test_format_float(value, text):
    assert format_float(value) == text
    assert float(text) == value


RECURSIVE = """
shader R {
    int fact(int n) {
        if (n <= 1) {
            return 1;
        }
        return n * fact(n - 1);
    }

    int isEven(int n) {
        if (n == 0) {
            return 1;
        }
        return isOdd(n - 1);
    }

    int isOdd(int n) {
        if (n == 0) {
            return 0;
        }
        return isEven(n - 1);
    }

    int twice(int n) {
        return fact(1) * 2 * n;
    }
}
"""


def test_recursive_functions(compile_source, corpus_module):
    assert recursive_functions(compile_source(RECURSIVE)) == ["fact", "isEven", "isOdd"]
    for program in CORPUS_PROGRAMS:
        assert recursive_functions(corpus_module(program)) == []


@pytest.mark.parametrize("target", ["glsl", "hlsl", "metal"])
def test_targets_without_a_call_stack_reject_recursion(registry, compile_source, target):
    with pytest.raises(UnsupportedConstruct) as info:
        generate(compile_source(RECURSIVE), target, registry)
    assert info.value.message.startswith(f"recursive function fact is not supported by {target}")
    assert info.value.location.line == 3


@pytest.mark.parametrize("target", ["crossgl", "cuda", "rust"])
def test_recursion_is_emitted_where_the_target_allows_it(registry, compile_source, target):
    (unit,) = generate(compile_source(RECURSIVE), target, registry)
    assert "isOdd" in unit.text


def test_rust_integer_arithmetic_wraps(registry, compile_source):
    m = compile_source(
        "shader W { int mix3(int a, int b) { int c = a * b + 7; c -= -a; c += 1; return c % 5 / 2; } "
        "int dbl(int n) { return 2 * n; } float f(float x) { return x * 2.0; } }"
    )
    (unit,) = generate(m, "rust", registry)
    assert "a.wrapping_mul(b).wrapping_add(7)" in unit.text
    assert "c = c.wrapping_sub(a.wrapping_neg())" in unit.text
    assert "c = c.wrapping_add(1)" in unit.text
    assert "c.wrapping_rem(5).wrapping_div(2)" in unit.text
    assert "2_i32.wrapping_mul(n)" in unit.text
    assert "x * 2.0_f32" in unit.text
