from __future__ import annotations

import pytest

from crossgl.errors import LexError, ParseError
from crossgl.ir import (
    FLOAT,
    VEC3,
    ArrayType,
    Assign,
    BinaryOp,
    ConstructorCall,
    For,
    IntLit,
    MemberOrSwizzle,
    NamedType,
    Qualifier,
    Stage,
    TernaryConditional,
)
from crossgl.parser import parse_expression, parse_source
from crossgl.validate import ast_equal

SHADER = """
shader Demo {
    struct Light {
        vec3 position;
        float intensity;
    };
    uniform Light lights[4];
    const float PI = 3.14159;

    float twice(float x) {
        return x * 2.0;
    }

    vertex {
        uniform mat4 mvp;
        VertexOut main(VertexIn v) {
            VertexOut o;
            o.position = mvp * vec4(v.position, 1.0);
            return o;
        }
    }

    compute {
        @workgroup_size(8, 8)
        void k(float data[], int n) {
            for (int i = 0; i < n; i++) {
                data[i] = twice(data[i]);
            }
        }
    }
}
"""


def test_module_structure():
    m = parse_source(SHADER, "demo.cgl")
    assert m.name == "Demo"
    assert [s.name for s in m.structs] == ["Light"]
    assert [(g.name, g.qualifier) for g in m.globals] == [
        ("lights", Qualifier.UNIFORM),
        ("PI", Qualifier.CONST),
        ("mvp", Qualifier.UNIFORM),
    ]
    assert m.global_decl("lights").type == ArrayType(NamedType("Light"), 4)
    assert [(f.name, f.stage) for f in m.functions] == [
        ("twice", None),
        ("main", Stage.VERTEX),
        ("k", Stage.COMPUTE),
    ]


def test_stage_entries_are_keyed_by_stage():
    m = parse_source(SHADER, "demo.cgl")
    assert [f.key for f in m.functions] == ["twice", "vertex_main", "k"]
    assert m.function("vertex_main") is m.function("main")


def test_attributes_and_unsized_array_params():
    k = parse_source(SHADER, "demo.cgl").function("k")
    assert k.attributes[0].name == "workgroup_size"
    assert k.attributes[0].args == (8, 8)
    assert k.params[0].type == ArrayType(FLOAT, None)


def test_increment_desugars_to_compound_assignment():
    k = parse_source(SHADER, "demo.cgl").function("k")
    loop = k.body.stmts[0]
    assert isinstance(loop, For)
    assert isinstance(loop.step, Assign)
    assert loop.step.op == "+="
    assert isinstance(loop.step.value, IntLit) and loop.step.value.value == 1


def test_precedence_and_associativity():
    e = parse_expression("a + b * c - d")
    assert isinstance(e, BinaryOp) and e.op == "-"
    assert isinstance(e.left, BinaryOp) and e.left.op == "+"
    assert isinstance(e.left.right, BinaryOp) and e.left.right.op == "*"


def test_ternary_binds_loosest():
    e = parse_expression("x > 0.0 ? x : -x")
    assert isinstance(e, TernaryConditional)
    assert isinstance(e.cond, BinaryOp) and e.cond.op == ">"


def test_constructor_and_member_postfix():
    e = parse_expression("vec3(1.0, 2.0, 3.0).xy")
    assert isinstance(e, MemberOrSwizzle) and e.name == "xy"
    assert isinstance(e.base, ConstructorCall) and e.base.type == VEC3


def test_missing_semicolon_reports_expected_and_found():
    src = "shader S { float f() { return 1.0 } }"
    with pytest.raises(ParseError) as info:
        parse_source(src, "s.cgl")
    err = info.value
    assert err.expected == "';'"
    assert err.location.line == 1
    assert "'}'" in err.found


def test_unclosed_shader_block():
    with pytest.raises(ParseError, match="expected"):
        parse_source("shader S { struct A { float x; };", "s.cgl")


def test_trailing_tokens_rejected():
    with pytest.raises(ParseError):
        parse_source("shader S { } extra", "s.cgl")


def test_lex_errors_surface_through_parse():
    with pytest.raises(LexError):
        parse_source("shader S { float f() { return 1.0 $ 2.0; } }", "s.cgl")


def test_identical_uniforms_in_stage_blocks_merge():
    src = """
    shader S {
        struct VIn { vec3 p; };
        struct VOut { vec4 position; };
        vertex {
            uniform float scale;
            VOut main(VIn v) { VOut o; o.position = vec4(v.p * scale, 1.0); return o; }
        }
        fragment {
            uniform float scale;
            vec4 main() { return vec4(scale); }
        }
    }
    """
    m = parse_source(src, "s.cgl")
    assert [g.name for g in m.globals] == ["scale"]


def test_ast_equal_ignores_locations():
    a = parse_source(SHADER, "a.cgl")
    b = parse_source("\n\n" + SHADER.replace("    ", "  "), "b.cgl")
    assert ast_equal(a, b)
    c = parse_source(SHADER.replace("x * 2.0", "x * 3.0"), "c.cgl")
    assert not ast_equal(a, c)


MEMBER_READ = "shader S {{ struct P {{ float a; float w; float bar; float zwx; }}; float f(P p) {{ return p.{}; }} }}"


@pytest.mark.parametrize(("left", "right"), [("a", "w"), ("bar", "zwx"), ("a", "bar")])
def test_ast_equal_keeps_member_names_apart(compile_source, left, right):
    a = MEMBER_READ.format(left)
    b = MEMBER_READ.format(right)
    assert not ast_equal(compile_source(a), compile_source(b))
    assert not ast_equal(parse_source(a, "a.cgl"), parse_source(b, "b.cgl"))


@pytest.mark.parametrize(
    ("ret", "left", "right"),
    [("vec3", "rgb", "xyz"), ("float", "a", "w"), ("vec4", "bgra", "zyxw")],
)
def test_ast_equal_treats_colour_swizzles_as_positions(compile_source, ret, left, right):
    src = "shader S {{ {} f(vec4 c) {{ return c.{}; }} }}"
    assert ast_equal(compile_source(src.format(ret, left)), compile_source(src.format(ret, right)))


def test_ast_equal_unwraps_single_statement_blocks(compile_source):
    braced = "shader S { float f(float x) { if (x > 0.0) { return x; } return 0.0; } }"
    bare = "shader S { float f(float x) { if (x > 0.0) return x; return 0.0; } }"
    assert ast_equal(compile_source(braced), compile_source(bare))
    two = "shader S { float f(float x) { if (x > 0.0) { float y = x; return y; } return 0.0; } }"
    assert not ast_equal(compile_source(braced), compile_source(two))


EQUIVALENT_LAYOUTS = [
    SHADER,
    "\n" + SHADER.replace("    ", "\t"),
    SHADER.replace("\n", "\n\n"),
]


def test_ast_equal_is_an_equivalence_relation():
    modules = [parse_source(src, f"m{i}.cgl") for i, src in enumerate(EQUIVALENT_LAYOUTS)]
    other = parse_source(SHADER.replace("x * 2.0", "x * 3.0"), "other.cgl")
    for a in modules:
        assert ast_equal(a, a)
        for b in modules:
            assert ast_equal(a, b) == ast_equal(b, a)
            for c in modules:
                if ast_equal(a, b) and ast_equal(b, c):
                    assert ast_equal(a, c)
        assert not ast_equal(a, other)
        assert not ast_equal(other, a)
