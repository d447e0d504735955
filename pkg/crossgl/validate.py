"""Structural validation, structural equality and a debug dump of the IR.

validate_program checks declaration-level invariants only (names, types,
struct recursion, entry-point counts). Expression typing lives in
crossgl.semantics.
"""

from __future__ import annotations

from dataclasses import fields, is_dataclass
from enum import Enum
from typing import Any

from .diagnostics import Diagnostic, error, sort_diagnostics
from .intrinsics import INTRINSICS
from .ir import (
    COMPUTE_BUILTINS,
    ArrayType,
    Assign,
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
    GlobalDecl,
    If,
    IndexAccess,
    IntLit,
    MatrixType,
    MemberAccess,
    MemberOrSwizzle,
    NamedType,
    Param,
    Qualifier,
    Return,
    ScalarKind,
    ScalarType,
    ShaderModule,
    SourceLocation,
    Stage,
    Stmt,
    StructDecl,
    StructMember,
    Swizzle,
    TernaryConditional,
    TypeExpr,
    UnaryOp,
    VarDecl,
    VarRef,
    VectorType,
    While,
    BinaryOp,
    walk_all_exprs,
    walk_expr,
    walk_stmts,
)

_COLOR_TO_POSITION = str.maketrans("rgba", "xyzw")


def _check_type(
    t: TypeExpr,
    structs: dict[str, StructDecl],
    loc: SourceLocation,
    out: list[Diagnostic],
    *,
    what: str,
) -> None:
    match t:
        case ScalarType(kind=ScalarKind.VOID):
            out.append(error(f"{what} cannot have type void", loc))
        case VectorType(dim=d, element=el):
            if d not in (2, 3, 4) or el != ScalarKind.FLOAT:
                out.append(error(f"invalid vector type (dimension {d}, element {el.value})", loc))
        case MatrixType(rows=r, cols=c):
            if r != c or r not in (2, 3, 4):
                out.append(error(f"invalid matrix type {r}x{c}; only mat2, mat3 and mat4 exist", loc))
        case ArrayType(element=el, size=size):
            if size is not None and size < 1:
                out.append(error(f"array size must be at least 1, got {size}", loc))
            _check_type(el, structs, loc, out, what=what)
        case NamedType(name=n):
            if n not in structs:
                out.append(error(f"unresolved type {n}", loc))


def _struct_refs(t: TypeExpr) -> list[str]:
    if isinstance(t, NamedType):
        return [t.name]
    if isinstance(t, ArrayType):
        return _struct_refs(t.element)
    return []


def _recursive_structs(module: ShaderModule, structs: dict[str, StructDecl]) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    reported: set[str] = set()

    def visit(name: str) -> None:
        state[name] = 1
        for m in structs[name].members:
            for ref in _struct_refs(m.type):
                if ref not in structs:
                    continue
                if state.get(ref) == 1:
                    if ref not in reported:
                        reported.add(ref)
                        out.append(error(f"recursive struct {ref}", structs[ref].location))
                elif state.get(ref) is None:
                    visit(ref)
        state[name] = 2

    for s in module.structs:
        if s.name in structs and state.get(s.name) is None:
            visit(s.name)
    return out


def validate_program(module: ShaderModule) -> list[Diagnostic]:
    """Return every declaration-level invariant violation, ordered by location."""

    out: list[Diagnostic] = []
    structs: dict[str, StructDecl] = {}
    seen: set[str] = set()

    def claim(name: str, loc: SourceLocation, kind: str) -> None:
        if name in seen:
            out.append(error(f"duplicate declaration of {name}", loc))
        elif name in COMPUTE_BUILTINS:
            out.append(error(f"{kind} {name} redefines a reserved compute builtin", loc))
        elif name in INTRINSICS:
            out.append(error(f"{kind} {name} redefines a builtin function", loc))
        seen.add(name)

    for s in module.structs:
        claim(s.name, s.location, "struct")
        structs.setdefault(s.name, s)
    for g in module.globals:
        claim(g.name, g.location, "global")
    for f in module.functions:
        claim(f.key, f.location, "function")

    for s in module.structs:
        names: set[str] = set()
        for m in s.members:
            if m.name in names:
                out.append(error(f"duplicate member {m.name} in struct {s.name}", m.location))
            names.add(m.name)
            _check_type(m.type, structs, m.location, out, what=f"member {s.name}.{m.name}")
    out.extend(_recursive_structs(module, structs))

    for g in module.globals:
        _check_type(g.type, structs, g.location, out, what=f"global {g.name}")
        if g.qualifier == Qualifier.CONST and g.init is None:
            out.append(error(f"const {g.name} needs an initializer", g.location))
        if g.qualifier == Qualifier.UNIFORM and g.init is not None:
            out.append(error(f"uniform {g.name} cannot have an initializer", g.location))
        if g.init is not None:
            _check_expr_types(g.init, structs, out)

    stage_counts: dict[Stage, list[FunctionDecl]] = {}
    for f in module.functions:
        pnames: set[str] = set()
        for p in f.params:
            if p.name in pnames:
                out.append(error(f"duplicate parameter {p.name} in function {f.name}", p.location))
            pnames.add(p.name)
            _check_type(p.type, structs, p.location, out, what=f"parameter {p.name}")
        if f.return_type != ScalarType(ScalarKind.VOID):
            _check_type(f.return_type, structs, f.location, out, what=f"function {f.name}")
        for st in walk_stmts(f.body):
            if isinstance(st, VarDecl):
                _check_type(st.type, structs, st.location, out, what=f"variable {st.name}")
        for e in walk_all_exprs(f.body):
            if isinstance(e, ConstructorCall):
                _check_type(e.type, structs, e.location, out, what="constructor")
        if f.stage is not None:
            stage_counts.setdefault(f.stage, []).append(f)

    for stage in (Stage.VERTEX, Stage.FRAGMENT):
        entries = stage_counts.get(stage, [])
        for extra in entries[1:]:
            out.append(error(f"more than one {stage.value} entry point ({extra.name})", extra.location))

    return sort_diagnostics(out)


def _check_expr_types(e: Expr, structs: dict[str, StructDecl], out: list[Diagnostic]) -> None:
    for sub in walk_expr(e):
        if isinstance(sub, ConstructorCall):
            _check_type(sub.type, structs, sub.location, out, what="constructor")


# --------------------------------------------------------------------------- equality


def node_key(node: Any) -> Any:
    """Hashable structural key ignoring locations, resolved types and no-op blocks."""

    match node:
        case None:
            return None
        case list() | tuple():
            return tuple(node_key(n) for n in node)
        case IntLit(value=v):
            return ("int", v)
        case FloatLit(value=v):
            return ("float", v)
        case BoolLit(value=v):
            return ("bool", v)
        case VarRef(name=n):
            return ("var", n)
        case BinaryOp(op=op, left=l, right=r):
            return ("bin", op, node_key(l), node_key(r))
        case UnaryOp(op=op, operand=o):
            return ("un", op, node_key(o))
        case Call(callee=c, args=a):
            return ("call", c, node_key(a))
        case ConstructorCall(type=t, args=a):
            return ("ctor", t, node_key(a))
        case MemberOrSwizzle(base=b, name=n):
            if isinstance(b.ty, VectorType):
                n = _swizzle_key(n)
            return ("field", node_key(b), n)
        case MemberAccess(base=b, member=n):
            return ("field", node_key(b), n)
        case Swizzle(base=b, components=n):
            return ("field", node_key(b), _swizzle_key(n))
        case IndexAccess(base=b, index=i):
            return ("index", node_key(b), node_key(i))
        case TernaryConditional(cond=c, then=t, otherwise=o):
            return ("select", node_key(c), node_key(t), node_key(o))
        case Block(stmts=ss):
            if len(ss) == 1:
                return node_key(ss[0])
            return ("block", node_key(ss))
        case VarDecl(name=n, type=t, init=i):
            return ("decl", n, t, node_key(i))
        case Assign(target=t, op=op, value=v):
            return ("assign", node_key(t), op, node_key(v))
        case If(cond=c, then=t, otherwise=o):
            return ("if", node_key(c), node_key(t), node_key(o))
        case For(init=i, cond=c, step=s, body=b):
            return ("for", node_key(i), node_key(c), node_key(s), node_key(b))
        case While(cond=c, body=b):
            return ("while", node_key(c), node_key(b))
        case Return(value=v):
            return ("return", node_key(v))
        case Break():
            return ("break",)
        case Continue():
            return ("continue",)
        case ExprStmt(expr=e):
            return ("expr", node_key(e))
        case StructMember(name=n, type=t, attributes=a):
            return ("member", n, t, tuple(a))
        case StructDecl(name=n, members=m, attributes=a):
            return ("struct", n, node_key(m), tuple(a))
        case Param(name=n, type=t, attributes=a):
            return ("param", n, t, tuple(a))
        case FunctionDecl(name=n, params=p, return_type=r, body=b, stage=s, attributes=a):
            return ("function", n, node_key(p), r, node_key(b), s, tuple(a))
        case GlobalDecl(name=n, type=t, qualifier=q, init=i, attributes=a):
            return ("global", n, t, q, node_key(i), tuple(a))
        case ShaderModule(name=n, structs=s, globals=g, functions=f):
            return ("module", n, node_key(s), node_key(g), node_key(f))
    raise TypeError(f"no structural key for {type(node).__name__}")


def _swizzle_key(name: str) -> str:
    if name and all(c in "rgba" for c in name):
        return name.translate(_COLOR_TO_POSITION)
    return name


def ast_equal(a: ShaderModule, b: ShaderModule) -> bool:
    """Structural equality ignoring source locations and single-statement blocks."""

    return node_key(a) == node_key(b)


# --------------------------------------------------------------------------- debug dump


def dump_module(module: ShaderModule) -> str:
    """Line-oriented IR dump, one node per line indented by depth. Not a stable format."""

    lines: list[str] = []

    def emit(node: Any, depth: int, label: str = "") -> None:
        pad = "  " * depth + (f"{label}: " if label else "")
        if isinstance(node, (Expr, Stmt, StructDecl, StructMember, Param, FunctionDecl, GlobalDecl, ShaderModule)):
            scalars: list[str] = []
            nested: list[tuple[str, Any]] = []
            for f in fields(node):
                if f.name in ("location", "ty"):
                    continue
                value = getattr(node, f.name)
                if isinstance(value, (Expr, Stmt)) or (
                    isinstance(value, list) and value and is_dataclass(value[0]) and not isinstance(value[0], tuple)
                ):
                    nested.append((f.name, value))
                elif isinstance(value, list) and not value:
                    continue
                else:
                    scalars.append(f"{f.name}={_fmt(value)}")
            ty = getattr(node, "ty", None)
            suffix = f" : {ty}" if ty is not None else ""
            lines.append(f"{pad}{type(node).__name__}({', '.join(scalars)}){suffix}")
            for name, value in nested:
                if isinstance(value, list):
                    for item in value:
                        emit(item, depth + 1, name)
                else:
                    emit(value, depth + 1, name)
        else:
            lines.append(f"{pad}{_fmt(node)}")

    emit(module, 0)
    return "\n".join(lines) + "\n"


def _fmt(value: Any) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(_fmt(v) for v in value) + ")"
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)
