"""Shared machinery for code generators.

Backend is the interface the registry stores. CLikeEmitter prints the IR in C
syntax with precedence-aware parenthesisation; each target subclasses it and
overrides the hooks where its spelling differs.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Iterator

from pydantic import BaseModel, ConfigDict

from ..errors import UnsupportedConstruct
from ..intrinsics import resolve_intrinsic
from ..ir import (
    COMPUTE_BUILTINS,
    FLOAT,
    INT,
    VOID,
    Assign,
    Attribute,
    BinaryOp,
    Block,
    BoolLit,
    Break,
    Call,
    ConstructorCall,
    Continue,
    Expr,
    ExprStmt,
    FloatLit,
    For,
    FunctionDecl,
    If,
    IndexAccess,
    IntLit,
    MemberAccess,
    MemberOrSwizzle,
    NamedType,
    Qualifier,
    Return,
    ShaderModule,
    Stage,
    Stmt,
    StructDecl,
    Swizzle,
    TernaryConditional,
    TypeExpr,
    UnaryOp,
    VarDecl,
    VarRef,
    VectorType,
    While,
    array_parts,
    walk_all_exprs,
)

# --------------------------------------------------------------------------- literals


def format_float(x: float) -> str:
    """Shortest round-trip decimal with a forced decimal point: 1 -> 1.0, 1e-05 -> 1.0e-05."""

    if math.isnan(x):
        return "(0.0 / 0.0)"
    if math.isinf(x):
        return "(1.0 / 0.0)" if x > 0 else "(-1.0 / 0.0)"
    text = repr(float(x))
    mantissa, sep, exponent = text.partition("e")
    if "." not in mantissa:
        mantissa += ".0"
    return mantissa + (f"e{exponent}" if sep else "")


# --------------------------------------------------------------------------- output


class OutputUnit(BaseModel):
    model_config = ConfigDict(frozen=True)

    suggested_filename: str
    target: str
    text: str


class CodeWriter:
    """Line buffer with 4-space indentation."""

    def __init__(self) -> None:
        self.lines: list[str] = []
        self.level = 0

    def line(self, text: str = "") -> None:
        self.lines.append(("    " * self.level + text) if text else "")

    def blank(self) -> None:
        if self.lines and self.lines[-1] != "":
            self.lines.append("")

    @contextmanager
    def indented(self) -> Iterator[None]:
        self.level += 1
        try:
            yield
        finally:
            self.level -= 1

    @contextmanager
    def block(self, header: str, closer: str = "}") -> Iterator[None]:
        self.line(f"{header} {{".lstrip())
        with self.indented():
            yield
        self.line(closer)

    def text(self) -> str:
        while self.lines and self.lines[-1] == "":
            self.lines.pop()
        return "\n".join(self.lines) + "\n"


# --------------------------------------------------------------------------- capabilities

FEATURES: tuple[str, ...] = (
    "basic_syntax",
    "control_flow",
    "functions",
    "arrays",
    "structures",
    "shaders",
    "compute_kernels",
    "textures",
)


class Support(str, Enum):
    SUPPORTED = "supported"
    DEGRADED = "degraded"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True, slots=True)
class FeatureSupport:
    status: Support = Support.SUPPORTED
    note: str = ""


class Backend(ABC):
    """One code generator. Instances are stateless; generate() may run concurrently."""

    name: ClassVar[str]
    extensions: ClassVar[tuple[str, ...]]
    features: ClassVar[dict[str, FeatureSupport]] = {}

    def feature(self, tag: str) -> FeatureSupport:
        return self.features.get(tag, FeatureSupport())

    def describe(self) -> str:
        return f"{self.name}\t{' '.join(self.extensions)}"

    @abstractmethod
    def map_type(self, t: TypeExpr) -> str: ...

    @abstractmethod
    def generate(self, module: ShaderModule, *, stem: str | None = None) -> list[OutputUnit]: ...


# --------------------------------------------------------------------------- module analysis


def ordered_structs(module: ShaderModule) -> list[StructDecl]:
    """Structs with every member type declared before its user (stable otherwise)."""

    by_name = module.struct_map()
    done: set[str] = set()
    out: list[StructDecl] = []

    def visit(s: StructDecl, stack: set[str]) -> None:
        if s.name in done or s.name in stack:
            return
        stack.add(s.name)
        for m in s.members:
            base, _ = array_parts(m.type)
            if isinstance(base, NamedType) and base.name in by_name:
                visit(by_name[base.name], stack)
        done.add(s.name)
        out.append(s)

    for s in module.structs:
        visit(s, set())
    return out


def call_graph(module: ShaderModule) -> dict[str, list[str]]:
    names = {f.key for f in module.functions}
    graph: dict[str, list[str]] = {}
    for f in module.functions:
        callees: list[str] = []
        for e in walk_all_exprs(f.body):
            if isinstance(e, Call) and e.callee in names and e.callee not in callees:
                callees.append(e.callee)
        graph[f.key] = callees
    return graph


def recursive_functions(module: ShaderModule) -> list[str]:
    """Functions that can reach themselves through the call graph, in declaration order."""

    graph = call_graph(module)

    def reaches_itself(start: str) -> bool:
        seen: set[str] = set()
        pending = list(graph[start])
        while pending:
            name = pending.pop()
            if name == start:
                return True
            if name not in seen:
                seen.add(name)
                pending.extend(graph.get(name, ()))
        return False

    return [name for name in graph if reaches_itself(name)]


def reject_recursion(module: ShaderModule, target: str) -> None:
    """Raise for targets without a call stack (GLSL, HLSL, Metal)."""

    cycle = recursive_functions(module)
    if cycle:
        f = next(f for f in module.functions if f.key == cycle[0])
        raise UnsupportedConstruct(
            f"recursive function {f.name}", target, "the target has no call stack", location=f.location
        )


def uniform_uses(module: ShaderModule) -> dict[str, list[str]]:
    """Uniform globals each function reads, directly or through calls, in declaration order."""

    uniforms = [g.name for g in module.globals if g.qualifier == Qualifier.UNIFORM]
    direct: dict[str, set[str]] = {}
    for f in module.functions:
        local = {p.name for p in f.params}
        used: set[str] = set()
        for e in walk_all_exprs(f.body):
            if isinstance(e, VarRef) and e.name in uniforms and e.name not in local:
                used.add(e.name)
        direct[f.key] = used
    graph = call_graph(module)
    changed = True
    while changed:
        changed = False
        for name, callees in graph.items():
            for c in callees:
                extra = direct[c] - direct[name]
                if extra:
                    direct[name] |= extra
                    changed = True
    return {name: [u for u in uniforms if u in used] for name, used in direct.items()}


def uses_compute_builtins(f: FunctionDecl) -> bool:
    return any(isinstance(e, VarRef) and e.name in COMPUTE_BUILTINS for e in walk_all_exprs(f.body))


def workgroup_size(f: FunctionDecl, default: tuple[int, int, int] = (64, 1, 1)) -> tuple[int, int, int]:
    for a in f.attributes:
        if a.name == "workgroup_size":
            dims = [int(x) for x in a.args if isinstance(x, int)] + list(default[len(a.args):])
            return dims[0], dims[1], dims[2]
    return default


def clip_position_member(s: StructDecl) -> str | None:
    for name in ("position", "clipPosition"):
        m = s.member(name)
        if m is not None and m.type == VectorType(4):
            return name
    return None


def header_comment(module: ShaderModule, target: str, stage: Stage | None = None) -> str:
    what = f"{module.name} ({stage.value} stage)" if stage is not None else module.name
    return f"Generated by crossgl from {what} for {target}. Do not edit."


def attribute_text(a: Attribute) -> str:
    if not a.args:
        return f"@{a.name}"
    return f"@{a.name}({', '.join(str(x) for x in a.args)})"


# --------------------------------------------------------------------------- C-like printing

PREC_TERNARY = 1
BINARY_PREC: dict[str, int] = {
    "||": 2,
    "&&": 3,
    "==": 4,
    "!=": 4,
    "<": 5,
    "<=": 5,
    ">": 5,
    ">=": 5,
    "+": 6,
    "-": 6,
    "*": 7,
    "/": 7,
    "%": 7,
}
PREC_UNARY = 8
PREC_POSTFIX = 9
PREC_PRIMARY = 10


class CLikeEmitter:
    """Prints functions and statements in C syntax; one instance per generated unit."""

    target: ClassVar[str] = "c"
    reserved: ClassVar[frozenset[str]] = frozenset()
    intrinsic_names: ClassVar[dict[str, str]] = {}

    def __init__(self, module: ShaderModule, backend: Backend) -> None:
        self.module = module
        self.backend = backend
        self.structs = module.struct_map()
        self.functions = {f.key: f for f in module.functions}
        self.renames: dict[str, str] = {}
        self.w = CodeWriter()

    # ------------------------------------------------------------------ names and types

    def ident(self, name: str) -> str:
        return f"{name}_" if name in self.reserved else name

    def var_name(self, name: str) -> str:
        if name in self.renames:
            return self.renames[name]
        return self.ident(name)

    def function_name(self, key: str) -> str:
        """Target spelling of a function key; entries called `main` keep their stage prefix."""

        return self.ident(key)

    def type_name(self, t: TypeExpr) -> str:
        base, _ = array_parts(t)
        if isinstance(base, NamedType):
            return self.ident(base.name)
        return self.backend.map_type(base)

    def declarator(self, t: TypeExpr, name: str) -> str:
        _, dims = array_parts(t)
        return f"{self.type_name(t)} {name}" + "".join(f"[{'' if d is None else d}]" for d in dims)

    def unsupported(self, construct: str, reason: str = "", node: Expr | Stmt | None = None) -> UnsupportedConstruct:
        return UnsupportedConstruct(construct, self.target, reason, location=getattr(node, "location", None))

    # ------------------------------------------------------------------ expressions

    def expr(self, e: Expr, prec: int = 0) -> str:
        text, own = self.expr_prec(e)
        return f"({text})" if own < prec else text

    def expr_prec(self, e: Expr) -> tuple[str, int]:
        match e:
            case IntLit(value=v):
                text = self.int_lit(v)
                return text, PREC_PRIMARY if v >= 0 else PREC_UNARY
            case FloatLit(value=v):
                text = self.float_lit(v)
                return text, PREC_PRIMARY if not text.startswith(("-", "(")) else PREC_UNARY
            case BoolLit(value=v):
                return ("true" if v else "false"), PREC_PRIMARY
            case VarRef(name=n):
                return self.var_name(n), PREC_PRIMARY
            case BinaryOp():
                return self.binary(e)
            case UnaryOp(op=op, operand=o):
                inner = self.expr(o, PREC_UNARY)
                if isinstance(o, UnaryOp) and not inner.startswith("("):
                    inner = f"({inner})"
                return f"{op}{inner}", PREC_UNARY
            case Call():
                return self.call(e), PREC_POSTFIX
            case ConstructorCall():
                return self.constructor(e)
            case MemberAccess(base=b, member=m):
                return f"{self.expr(b, PREC_POSTFIX)}.{self.ident(m)}", PREC_POSTFIX
            case MemberOrSwizzle(base=b, name=n):
                return f"{self.expr(b, PREC_POSTFIX)}.{n}", PREC_POSTFIX
            case Swizzle():
                return self.swizzle(e)
            case IndexAccess():
                return self.index(e)
            case TernaryConditional():
                return self.ternary(e)
        raise self.unsupported(type(e).__name__, node=e)

    def int_lit(self, v: int) -> str:
        return str(v)

    def float_lit(self, v: float) -> str:
        return format_float(v)

    def binary(self, e: BinaryOp) -> tuple[str, int]:
        p = BINARY_PREC[e.op]
        return f"{self.expr(e.left, p)} {e.op} {self.expr(e.right, p + 1)}", p

    def args(self, args: list[Expr]) -> str:
        return ", ".join(self.expr(a) for a in args)

    def call(self, e: Call) -> str:
        if e.callee in self.functions:
            return f"{self.function_name(e.callee)}({self.call_args(e)})"
        return f"{self.intrinsic_names.get(e.callee, e.callee)}({self.args(e.args)})"

    def call_args(self, e: Call) -> str:
        return self.args(e.args)

    def intrinsic_args(self, e: Call, *, splat: bool = False) -> list[str]:
        """Builtin call arguments with int->float promotion (and scalar->vector splats) spelled out."""

        sig = resolve_intrinsic(e.callee, [a.ty for a in e.args])
        out: list[str] = []
        for i, a in enumerate(e.args):
            want = sig.params[i] if sig is not None else a.ty
            text = self.cast_float(a) if a.ty == INT and want == FLOAT else self.expr(a)
            if splat and want == FLOAT and isinstance(e.ty, VectorType):
                text = self.splat_text(e.ty, text)
            out.append(text)
        return out

    def cast_float(self, e: Expr) -> str:
        return f"float({self.expr(e)})"

    def splat_text(self, t: TypeExpr, text: str) -> str:
        return f"{self.type_name(t)}({text})"

    def constructor(self, e: ConstructorCall) -> tuple[str, int]:
        return f"{self.type_name(e.type)}({self.args(e.args)})", PREC_POSTFIX

    def swizzle(self, e: Swizzle) -> tuple[str, int]:
        return f"{self.expr(e.base, PREC_POSTFIX)}.{e.components}", PREC_POSTFIX

    def index(self, e: IndexAccess) -> tuple[str, int]:
        return f"{self.expr(e.base, PREC_POSTFIX)}[{self.expr(e.index)}]", PREC_POSTFIX

    def ternary(self, e: TernaryConditional) -> tuple[str, int]:
        return (
            f"{self.expr(e.cond, PREC_TERNARY + 1)} ? {self.expr(e.then)} : {self.expr(e.otherwise, PREC_TERNARY)}",
            PREC_TERNARY,
        )

    # ------------------------------------------------------------------ statements

    def body(self, s: Stmt) -> None:
        """Statements of a braced body (the braces themselves are the caller's)."""

        if isinstance(s, Block):
            for x in s.stmts:
                self.stmt(x)
        else:
            self.stmt(s)

    def stmt(self, s: Stmt) -> None:
        match s:
            case Block(stmts=ss):
                with self.w.block(""):
                    for x in ss:
                        self.stmt(x)
            case VarDecl():
                self.var_decl(s)
            case Assign():
                self.w.line(self.assign_text(s) + ";")
            case If():
                self.if_stmt(s)
            case While(cond=c, body=b):
                with self.w.block(f"while ({self.expr(c)})"):
                    self.body(b)
            case For():
                self.for_stmt(s)
            case Return(value=v):
                self.w.line("return;" if v is None else f"return {self.return_value(v)};")
            case Break():
                self.w.line("break;")
            case Continue():
                self.w.line("continue;")
            case ExprStmt(expr=e):
                self.w.line(f"{self.expr(e)};")
            case _:
                raise self.unsupported(type(s).__name__, node=s)

    def return_value(self, v: Expr) -> str:
        return self.expr(v)

    def var_decl_text(self, s: VarDecl) -> str:
        text = self.declarator(s.type, self.var_name(s.name))
        if s.init is not None:
            text += f" = {self.expr(s.init)}"
        return text

    def var_decl(self, s: VarDecl) -> None:
        self.w.line(self.var_decl_text(s) + ";")

    def assign_text(self, s: Assign) -> str:
        return f"{self.expr(s.target)} {s.op} {self.expr(s.value)}"

    def simple_text(self, s: Stmt) -> str:
        """For-loop header clauses."""

        match s:
            case VarDecl():
                return self.var_decl_text(s)
            case Assign():
                return self.assign_text(s)
            case ExprStmt(expr=e):
                return self.expr(e)
        raise self.unsupported(f"{type(s).__name__} in a for header", node=s)

    def for_stmt(self, s: For) -> None:
        init = self.simple_text(s.init) if s.init is not None else ""
        cond = self.expr(s.cond) if s.cond is not None else ""
        step = self.simple_text(s.step) if s.step is not None else ""
        with self.w.block(f"for ({init}; {cond}; {step})"):
            self.body(s.body)

    def if_stmt(self, s: If) -> None:
        self.w.line(f"if ({self.expr(s.cond)}) {{")
        while True:
            with self.w.indented():
                self.body(s.then)
            o = s.otherwise
            if o is None:
                self.w.line("}")
                return
            if isinstance(o, If):
                self.w.line(f"}} else if ({self.expr(o.cond)}) {{")
                s = o
                continue
            self.w.line("} else {")
            with self.w.indented():
                self.body(o)
            self.w.line("}")
            return

    # ------------------------------------------------------------------ functions

    def params_text(self, f: FunctionDecl) -> str:
        return ", ".join(self.declarator(p.type, self.var_name(p.name)) for p in f.params)

    def signature(self, f: FunctionDecl) -> str:
        ret = "void" if f.return_type == VOID else self.type_name(f.return_type)
        return f"{ret} {self.function_name(f.key)}({self.params_text(f)})"

    def function(self, f: FunctionDecl, signature: str | None = None) -> None:
        with self.w.block(signature or self.signature(f)):
            for s in f.body.stmts:
                self.stmt(s)


def needs_float(e: Expr, target: TypeExpr | None) -> bool:
    """True when `e` is an int flowing into a float slot (implicit conversion site)."""

    return target == FLOAT and e.ty == INT
