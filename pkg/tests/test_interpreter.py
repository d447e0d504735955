from __future__ import annotations

import math

import numpy as np
import pytest

from crossgl.errors import DiagnosticsError, EvalError
from crossgl.interpreter import (
    SAMPLE_SIZE,
    Interpreter,
    copy_value,
    eval_function,
    eval_kernel,
    format_value,
    parse_value,
    standard_sample,
    value_to_json,
    values_close,
)
from crossgl.ir import FLOAT, INT, VEC3


def vec(*xs: float) -> np.ndarray:
    return np.array(xs, dtype=float)


def test_distribution_ggx_at_normal_incidence(corpus_module):
    m = corpus_module("complex_pbr")
    n = vec(0.0, 0.0, 1.0)
    result = eval_function(m, "distributionGGX", [n, n, 0.5], check_types=True)
    assert result == pytest.approx(16.0 / math.pi, abs=1e-4)


def test_geometry_smith_is_one_when_aligned(corpus_module):
    m = corpus_module("complex_pbr")
    n = vec(0.0, 0.0, 1.0)
    assert eval_function(m, "geometrySmith", [n, n, n, 0.5]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize(
    ("function", "args", "expected"),
    [
        ("factorial", [5], 120),
        ("factorial", [0], 1),
        ("fibonacci", [8], 21),
        ("gcd", [12, 18], 6),
        ("collatzSteps", [6], 8),
        ("collatzSteps", [1], 0),
    ],
)
def test_integer_control_flow(corpus_module, function, args, expected):
    assert eval_function(corpus_module("control_flow"), function, args, check_types=True) == expected


def test_continue_and_break_in_nested_loops(corpus_module):
    assert eval_function(corpus_module("control_flow"), "nestedSum", [4, 4]) == pytest.approx(9.5)


@pytest.mark.parametrize(("x", "expected"), [(-3.0, -1.0), (3.0, 1.0), (0.5, 0.25), (-0.5, -0.25)])
def test_else_if_chain_and_ternary(corpus_module, x, expected):
    assert eval_function(corpus_module("control_flow"), "classify", [x]) == pytest.approx(expected)


def test_int_argument_promotes_to_float(corpus_module):
    result = eval_function(corpus_module("control_flow"), "classify", [2])
    assert isinstance(result, float)
    assert result == 1.0


def test_arrays(corpus_module):
    m = corpus_module("array_test")
    assert eval_function(m, "sumArray", [[1.0, 2.0, 3.0, 4.0]]) == pytest.approx(10.0)
    assert eval_function(m, "maxElement", [[1.0, 7.0, 3.0, -4.0]]) == pytest.approx(7.0)
    assert eval_function(m, "weightedSum", [[1.0, 2.0, 3.0, 4.0], [0.5, 0.5, 0.0, 1.0]]) == pytest.approx(5.5)
    assert eval_function(m, "identityTrace", [2.0], check_types=True) == pytest.approx(6.0)
    assert eval_function(m, "componentSum", [vec(1.0, 2.0, 3.0, 4.0)]) == pytest.approx(10.0)


def test_clamped_index_picks_last_element(corpus_module):
    colors = [vec(1, 0, 0, 1), vec(0, 1, 0, 1), vec(0, 0, 1, 1)]
    result = eval_function(corpus_module("array_test"), "pick", [colors, 7])
    assert np.array_equal(result, vec(0, 0, 1, 1))


def test_arguments_are_copied(corpus_module):
    values = [1.0, 2.0, 3.0, 4.0]
    eval_function(corpus_module("array_test"), "sumArray", [values])
    assert values == [1.0, 2.0, 3.0, 4.0]


def test_matrix_times_vector_rotates(corpus_module):
    result = eval_function(corpus_module("matrix_compute"), "rotate", [vec(1.0, 0.0), math.pi / 2])
    assert values_close(result, vec(0.0, 1.0), abs_tol=1e-12)


def test_compute_entry_is_refused(corpus_module):
    with pytest.raises(EvalError) as info:
        eval_function(corpus_module("matrix_compute"), "add", [[1.0], [2.0], [0.0], 1])
    assert info.value.kind == EvalError.COMPUTE_ENTRY


def test_eval_kernel_runs_one_thread(corpus_module):
    a = [1.0, 2.0, 3.0, 4.0]
    b = [10.0, 20.0, 30.0, 40.0]
    c = [0.0] * 4
    builtins = {"block_id_x": 0, "block_dim_x": 4, "thread_id_x": 2}
    final = eval_kernel(corpus_module("matrix_compute"), "add", [a, b, c, 4], builtins)
    assert final[2] == [0.0, 0.0, 33.0, 0.0]
    assert c == [0.0] * 4


def test_eval_kernel_out_of_range_thread_is_a_no_op(corpus_module):
    builtins = {"block_id_x": 1, "block_dim_x": 4, "thread_id_x": 0}
    final = eval_kernel(corpus_module("matrix_compute"), "add", [[1.0], [2.0], [0.0], 1], builtins)
    assert final[2] == [0.0]


def test_single_threaded_prefix_sum(corpus_module):
    final = eval_kernel(corpus_module("array_test"), "prefixSum", [[1.0, 2.0, 3.0], [0.0] * 3, 3], {})
    assert final[1] == [1.0, 3.0, 6.0]


def test_eval_kernel_checks_argument_count(corpus_module):
    builtins = {"block_id_x": 0, "block_dim_x": 4, "thread_id_x": 0}
    with pytest.raises(EvalError) as info:
        eval_kernel(corpus_module("matrix_compute"), "add", [[1.0], [2.0], [0.0]], builtins)
    assert info.value.kind == EvalError.UNBOUND
    assert "expects 4 arguments, got 3" in info.value.message


def test_integer_division_by_zero(compile_source):
    m = compile_source("shader S { int div(int a, int b) { return a / b; } }")
    with pytest.raises(EvalError) as info:
        eval_function(m, "div", [1, 0])
    assert info.value.kind == EvalError.DIVISION_BY_ZERO


def test_integer_remainder_by_zero(compile_source):
    m = compile_source("shader S { int rem(int a, int b) { return a % b; } }")
    with pytest.raises(EvalError) as info:
        eval_function(m, "rem", [7, 0])
    assert info.value.kind == EvalError.DIVISION_BY_ZERO


def test_float_division_by_zero_is_infinite(compile_source):
    m = compile_source("shader S { float div(float a, float b) { return a / b; } }")
    assert math.isinf(eval_function(m, "div", [1.0, 0.0]))


def test_integer_division_truncates_toward_zero(compile_source):
    m = compile_source("shader S { int div(int a, int b) { return a / b; } }")
    assert eval_function(m, "div", [-7, 2]) == -3


def test_index_out_of_bounds(compile_source):
    m = compile_source("shader S { float at(float xs[4], int i) { return xs[i]; } }")
    with pytest.raises(EvalError) as info:
        eval_function(m, "at", [[0.0, 1.0, 2.0, 3.0], 7])
    assert info.value.kind == EvalError.INDEX_OUT_OF_BOUNDS


def test_call_depth_limit(compile_source):
    m = compile_source("shader S { int down(int n) { return down(n + 1); } }")
    with pytest.raises(EvalError) as info:
        Interpreter(m, max_depth=50).call("down", [0])
    assert info.value.kind == EvalError.CALL_DEPTH_EXCEEDED


def test_step_budget(compile_source):
    m = compile_source("shader S { float spin() { while (true) { } return 0.0; } }")
    with pytest.raises(EvalError) as info:
        Interpreter(m, step_budget=1000).call("spin", [])
    assert info.value.kind == EvalError.STEP_BUDGET_EXCEEDED


def test_unbound_uniform(compile_source):
    m = compile_source("shader S { uniform float scale; float f(float x) { return x * scale; } }")
    with pytest.raises(EvalError) as info:
        eval_function(m, "f", [2.0])
    assert info.value.kind == EvalError.UNBOUND
    assert eval_function(m, "f", [2.0], uniforms={"scale": 3.0}) == pytest.approx(6.0)


def test_constant_globals_are_initialized(compile_source):
    m = compile_source("shader S { const float K = 2.5; float f(float x) { return x * K; } }")
    assert eval_function(m, "f", [2.0]) == pytest.approx(5.0)


def test_parse_value():
    value, ty = parse_value("vec3(0, 0, 1)")
    assert ty == VEC3
    assert np.array_equal(value, vec(0.0, 0.0, 1.0))
    assert parse_value("3") == (3, INT)
    assert parse_value("-1.5") == (-1.5, FLOAT)


def test_parse_value_swizzle():
    value, _ = parse_value("vec4(1.0, 2.0, 3.0, 4.0).wzy")
    assert np.array_equal(value, vec(4.0, 3.0, 2.0))


def test_parse_value_rejects_open_expressions():
    with pytest.raises(DiagnosticsError):
        parse_value("x + 1")


def test_parse_value_division_by_zero():
    with pytest.raises(EvalError) as info:
        parse_value("1 / 0")
    assert info.value.kind == EvalError.DIVISION_BY_ZERO


def test_format_value():
    assert format_value(1.0) == "1.0"
    assert format_value(3) == "3"
    assert format_value(True) == "true"
    assert format_value(vec(0.0, 0.5, 1.0)) == "vec3(0.0, 0.5, 1.0)"
    assert format_value([1.0, 2.0]) == "[1.0, 2.0]"
    assert format_value({"a": 1}) == "{a: 1}"


def test_value_to_json():
    assert value_to_json(vec(1.0, 2.0)) == [1.0, 2.0]
    assert value_to_json(float("inf")) == "inf"
    assert value_to_json({"xs": [1, 2]}) == {"xs": [1, 2]}
    assert value_to_json(np.eye(2)) == [[1.0, 0.0], [0.0, 1.0]]


def test_values_close():
    assert values_close(1.0, 1.0 + 1e-9)
    assert not values_close(1.0, 1.001)
    assert values_close(vec(1.0, 2.0), vec(1.0, 2.0 + 1e-10))
    assert not values_close(vec(1.0, 2.0), vec(1.0, 2.0, 3.0))
    assert values_close(float("nan"), float("nan"))
    assert not values_close(True, 1.0)
    assert values_close([1, {"a": 2.0}], [1, {"a": 2.0}])


def test_copy_value_is_deep():
    original = [vec(1.0, 2.0), {"xs": [1.0]}]
    clone = copy_value(original)
    clone[0][0] = 9.0
    clone[1]["xs"][0] = 9.0
    assert original[0][0] == 1.0
    assert original[1]["xs"] == [1.0]


def test_standard_sample_is_deterministic(corpus_module):
    m = corpus_module("complex_pbr")
    f = m.function("distributionGGX")
    first = standard_sample(f, m.struct_map())
    second = standard_sample(f, m.struct_map())
    assert len(first) == SAMPLE_SIZE
    assert all(values_close(a, b) for a, b in zip(first, second))
    for n, h, roughness in first:
        assert n.shape == (3,)
        assert -2.0 <= roughness <= 2.0


def test_standard_sample_int_range(corpus_module):
    m = corpus_module("control_flow")
    samples = standard_sample(m.function("gcd"), m.struct_map())
    assert all(0 <= a <= 8 and 0 <= b <= 8 for a, b in samples)
