from __future__ import annotations

from crossgl.diagnostics import error, sort_diagnostics, warning
from crossgl.errors import (
    DiagnosticsError,
    EvalError,
    ParseError,
    UnknownTarget,
    UnsupportedConstruct,
    error_from_exception,
)
from crossgl.ir import SourceLocation
from crossgl.responses import fail, ok


def test_parse_error_shape():
    exc = ParseError(SourceLocation("a.cgl", 3, 7), "';'", "identifier 'x'")
    assert str(exc) == "a.cgl:3:7: expected ';', found identifier 'x'"
    assert exc.as_error() == {
        "code": "PARSE_ERROR",
        "message": "expected ';', found identifier 'x'",
        "details": {"location": "a.cgl:3:7"},
    }


def test_unsupported_construct_message():
    exc = UnsupportedConstruct("texture sampling", "rust", "no sampler type")
    assert exc.message == "texture sampling is not supported by rust: no sampler type"
    assert exc.as_error()["code"] == "UNSUPPORTED_CONSTRUCT"
    assert exc.as_error()["details"] is None


def test_eval_error_kind():
    exc = EvalError(EvalError.DIVISION_BY_ZERO, "integer division by zero")
    assert exc.kind == "DivisionByZero"
    assert exc.message == "DivisionByZero: integer division by zero"
    assert exc.as_error()["code"] == "RUNTIME_ERROR"


def test_diagnostics_error_uses_first_diagnostic():
    diags = [error("first", SourceLocation("a.cgl", 1, 1)), error("second", SourceLocation("a.cgl", 2, 1))]
    exc = DiagnosticsError(diags)
    assert exc.message == "first"
    assert exc.diagnostics == diags
    assert DiagnosticsError([]).message == "program has diagnostics"


def test_error_from_exception():
    assert error_from_exception(UnknownTarget("vulkan", ["glsl"]))["code"] == "UNKNOWN_TARGET"
    hidden = error_from_exception(RuntimeError("boom"))
    assert hidden == {"code": "UNEXPECTED_ERROR", "message": "Unexpected error in translator.", "details": None}
    shown = error_from_exception(RuntimeError("boom"), debug=True)
    assert shown["details"] == {"type": "RuntimeError", "message": "boom"}


def test_diagnostic_format_and_sort():
    late = warning("late", SourceLocation("b.cgl", 9, 1))
    early = error("early", SourceLocation("b.cgl", 2, 5))
    assert early.format() == "b.cgl:2:5: error: early"
    assert sort_diagnostics([late, early]) == [early, late]
    assert late.as_warning() == {
        "code": "WARNING",
        "message": "late",
        "details": {"severity": "warning", "location": "b.cgl:9:1"},
    }


def test_envelopes():
    assert ok({"units": []}) == {"error": None, "warnings": [], "units": []}
    body = fail({"code": "X", "message": "m", "details": None}, warnings=[warning("w")])
    assert body["error"]["code"] == "X"
    assert body["warnings"][0]["message"] == "w"
