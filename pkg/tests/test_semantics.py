from __future__ import annotations

import pytest

from crossgl.errors import DiagnosticsError, ShaderTypeError
from crossgl.ir import BOOL, FLOAT, INT, MAT3, VEC2, VEC3, VEC4, MemberAccess, Swizzle
from crossgl.parser import parse_source
from crossgl.semantics import analyze, canonical_swizzle, resolve_swizzle, unify_types


def errors(source: str) -> list[str]:
    return [d.message for d in analyze(parse_source(source, "t.cgl"))]


def helper(body: str, sig: str = "float f(float x)") -> str:
    return f"shader S {{ {sig} {{ {body} }} }}"


@pytest.mark.parametrize(
    ("left", "right", "op", "result"),
    [
        (INT, INT, "+", INT),
        (INT, FLOAT, "*", FLOAT),
        (VEC3, FLOAT, "*", VEC3),
        (FLOAT, VEC3, "-", VEC3),
        (VEC3, VEC3, "+", VEC3),
        (MAT3, VEC3, "*", VEC3),
        (VEC3, MAT3, "*", VEC3),
        (MAT3, MAT3, "*", MAT3),
        (INT, FLOAT, "<", BOOL),
        (BOOL, BOOL, "&&", BOOL),
        (INT, INT, "%", INT),
    ],
)
def test_unify_types(left, right, op, result):
    assert unify_types(left, right, op) == result


@pytest.mark.parametrize(
    ("left", "right", "op"),
    [(VEC2, VEC3, "+"), (VEC3, VEC3, "=="), (FLOAT, FLOAT, "%"), (INT, BOOL, "&&"), (MAT3, MAT3, "/")],
)
def test_unify_types_rejects(left, right, op):
    with pytest.raises(ShaderTypeError):
        unify_types(left, right, op)


def test_swizzles():
    assert resolve_swizzle(VEC4, "xyz") == VEC3
    assert resolve_swizzle(VEC4, "rgba") == VEC4
    assert resolve_swizzle(VEC3, "z") == FLOAT
    assert canonical_swizzle("bgr") == "zyx"
    with pytest.raises(ShaderTypeError):
        resolve_swizzle(VEC2, "xyz")
    with pytest.raises(ShaderTypeError):
        resolve_swizzle(VEC4, "xg")
    with pytest.raises(ShaderTypeError):
        resolve_swizzle(VEC3, "xx", write=True)


def test_member_or_swizzle_is_resolved(compile_source):
    m = compile_source(
        """
        shader S {
            struct P { vec3 pos; };
            float f(P p) { return p.pos.y; }
        }
        """
    )
    ret = m.function("f").body.stmts[0].value
    assert isinstance(ret, Swizzle) and ret.components == "y"
    assert isinstance(ret.base, MemberAccess) and ret.base.member == "pos"
    assert ret.ty == FLOAT


def test_implicit_int_to_float():
    assert errors(helper("float y = 1; return y + 2;")) == []
    assert errors(helper("int n = 1.5; return 0.0;")) == ["cannot assign float to int"]


def test_undeclared_identifier_and_call():
    assert errors(helper("return y;")) == ["undeclared identifier y"]
    assert errors(helper("return g(x);")) == ["call to undeclared function g"]


def test_intrinsic_overloads():
    assert errors(helper("return max(x, 1.0) + float(max(1, 2));")) == []
    assert errors(helper("return cross(x, x);")) == ["no overload of cross takes (float, float)"]


def test_missing_return_on_some_path():
    msgs = errors(helper("if (x > 0.0) { return 1.0; }"))
    assert msgs == ["function f does not return a value on every path"]
    assert errors(helper("if (x > 0.0) { return 1.0; } else { return 2.0; }")) == []


def test_conditions_must_be_bool():
    assert errors(helper("if (x) { return 1.0; } return 0.0;")) == ["if condition must be bool, got float"]


def test_break_outside_loop():
    assert errors(helper("break; return x;")) == ["break outside of a loop"]


def test_assignments():
    assert errors(helper("x = 2; return x;")) == []
    assert "cannot assign to const k" in errors(
        "shader S { const float k = 1.0; float f() { k = 2.0; return k; } }"
    )
    assert "cannot assign to uniform u" in errors(
        "shader S { uniform float u; float f() { u = 2.0; return u; } }"
    )
    assert errors(helper("int n = 1; n *= 2.5; return x;")) == ["*= would change the type of int to float"]


def test_mutable_globals_are_rejected():
    assert errors("shader S { float counter; }") == [
        "mutable global counter is not supported; declare it const or uniform"
    ]


def test_local_arrays_need_a_size():
    assert errors(helper("float xs[]; return x;")) == ["local array xs needs a size"]


def test_compute_builtins_only_in_compute_entries():
    assert errors(helper("return float(thread_id_x);")) == [
        "thread_id_x is only available in compute entry points"
    ]
    ok = "shader S { compute { void k(float xs[]) { xs[thread_id_x] = 1.0; } } }"
    assert errors(ok) == []


def test_entry_signatures():
    msgs = errors(
        """
        shader S {
            struct VIn { vec3 p; int id; };
            struct VOut { vec4 position; };
            vertex { VOut main(VIn v) { VOut o; o.position = vec4(v.p, 1.0); return o; } }
            fragment { float main(vec2 uv) { return uv.x; } }
            compute { float k(float xs[]) { return xs[0]; } }
        }
        """
    )
    assert "input member VIn.id of vertex entry main must be float or a vector" in msgs
    assert "fragment entry main must return vec4 or a struct" in msgs
    assert "compute entry k must return void" in msgs


def test_entries_cannot_be_called():
    msgs = errors(
        """
        shader S {
            fragment { vec4 main() { return vec4(1.0); } }
            vec4 g() { return main(); }
        }
        """
    )
    assert msgs == ["entry point main cannot be called"]


def test_constant_initializers():
    assert errors("shader S { const float a = 2.0; const float b = a * sqrt(4.0); }") == []
    assert errors("shader S { uniform float u; const float b = u; }") == ["u is not a constant"]


def test_load_raises_diagnostics_error(compile_source):
    with pytest.raises(DiagnosticsError) as info:
        compile_source(helper("return y;"))
    assert info.value.diagnostics[0].format().startswith("test.cgl:1:")


def test_corpus_typechecks(corpus_module):
    from conftest import CORPUS_PROGRAMS

    for name in CORPUS_PROGRAMS:
        assert corpus_module(name).functions
