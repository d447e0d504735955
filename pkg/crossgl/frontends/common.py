"""Tree rewriting shared by the GLSL and CUDA importers."""

from __future__ import annotations

from typing import Callable

from ..errors import UnsupportedConstruct
from ..ir import (
    COMPUTE_BUILTINS,
    INT,
    ArrayType,
    Assign,
    BinaryOp,
    Call,
    ConstructorCall,
    Expr,
    ExprStmt,
    For,
    FunctionDecl,
    If,
    IndexAccess,
    MemberAccess,
    MemberOrSwizzle,
    NamedType,
    Return,
    ShaderModule,
    Stmt,
    Swizzle,
    TernaryConditional,
    TypeExpr,
    UnaryOp,
    VarDecl,
    VarRef,
    While,
    stmt_exprs,
    walk_expr,
    walk_stmts,
)
from ..validate import node_key

ExprFn = Callable[[Expr], Expr]


def map_expr(e: Expr, fn: ExprFn) -> Expr:
    """Rebuild `e` bottom-up, replacing every node by fn(node)."""

    match e:
        case BinaryOp():
            e.left = map_expr(e.left, fn)
            e.right = map_expr(e.right, fn)
        case UnaryOp():
            e.operand = map_expr(e.operand, fn)
        case Call() | ConstructorCall():
            e.args = [map_expr(a, fn) for a in e.args]
        case MemberOrSwizzle() | MemberAccess() | Swizzle():
            e.base = map_expr(e.base, fn)
        case IndexAccess():
            e.base = map_expr(e.base, fn)
            e.index = map_expr(e.index, fn)
        case TernaryConditional():
            e.cond = map_expr(e.cond, fn)
            e.then = map_expr(e.then, fn)
            e.otherwise = map_expr(e.otherwise, fn)
    return fn(e)


def map_stmt_exprs(body: Stmt, fn: ExprFn) -> None:
    """Apply map_expr to every expression owned by `body` or its nested statements."""

    for st in walk_stmts(body):
        match st:
            case VarDecl(init=i) if i is not None:
                st.init = map_expr(i, fn)
            case Assign():
                st.target = map_expr(st.target, fn)
                st.value = map_expr(st.value, fn)
            case If() | While():
                st.cond = map_expr(st.cond, fn)
            case For(cond=c) if c is not None:
                st.cond = map_expr(c, fn)
            case Return(value=v) if v is not None:
                st.value = map_expr(v, fn)
            case ExprStmt():
                st.expr = map_expr(st.expr, fn)


def map_module_exprs(module: ShaderModule, fn: ExprFn) -> None:
    for g in module.globals:
        if g.init is not None:
            g.init = map_expr(g.init, fn)
    for f in module.functions:
        map_stmt_exprs(f.body, fn)


def rename_type(t: TypeExpr, fn: Callable[[str], str]) -> TypeExpr:
    match t:
        case NamedType(name=n):
            return NamedType(fn(n))
        case ArrayType(element=el, size=size):
            return ArrayType(rename_type(el, fn), size)
    return t


def rename_identifiers(module: ShaderModule, fn: Callable[[str], str]) -> None:
    """Apply `fn` to every user-chosen name: structs, members, globals, functions, params, locals."""

    for s in module.structs:
        s.name = fn(s.name)
        for m in s.members:
            m.name = fn(m.name)
            m.type = rename_type(m.type, fn)
    for g in module.globals:
        g.name = fn(g.name)
        g.type = rename_type(g.type, fn)
    for f in module.functions:
        f.name = fn(f.name)
        f.return_type = rename_type(f.return_type, fn)
        for p in f.params:
            p.name = fn(p.name)
            p.type = rename_type(p.type, fn)
        for st in walk_stmts(f.body):
            if isinstance(st, VarDecl):
                st.name = fn(st.name)
                st.type = rename_type(st.type, fn)

    def visit(e: Expr) -> Expr:
        match e:
            case VarRef():
                e.name = fn(e.name)
            case MemberOrSwizzle():
                e.name = fn(e.name)
            case Call():
                e.callee = fn(e.callee)
            case ConstructorCall():
                e.type = rename_type(e.type, fn)
        return e

    map_module_exprs(module, visit)


def merge_into(target: ShaderModule, part: ShaderModule, language: str) -> None:
    """Fold `part` into `target`; identical re-declarations merge, conflicting ones are rejected."""

    def conflict(kind: str, name: str, loc) -> UnsupportedConstruct:
        return UnsupportedConstruct(
            f"conflicting definitions of {kind} {name}",
            f"the {language} importer",
            "units must agree on shared declarations",
            location=loc,
        )

    for s in part.structs:
        existing = next((x for x in target.structs if x.name == s.name), None)
        if existing is None:
            target.structs.append(s)
        elif node_key(existing) != node_key(s):
            raise conflict("struct", s.name, s.location)
    for g in part.globals:
        existing = target.global_decl(g.name)
        if existing is None:
            target.globals.append(g)
        elif node_key(existing) != node_key(g):
            raise conflict("global", g.name, g.location)
    for f in part.functions:
        existing = next((x for x in target.functions if x.key == f.key), None)
        if existing is None:
            target.functions.append(f)
        elif existing.stage is not None or f.stage is not None or node_key(existing) != node_key(f):
            raise conflict("function", f.name, f.location)


def unwrap_int_cast(e: Expr) -> Expr:
    """`int(x)` where x already has the builtin's int meaning."""

    if isinstance(e, ConstructorCall) and len(e.args) == 1:
        return e.args[0]
    return e


def called_functions(f: FunctionDecl) -> list[str]:
    out: list[str] = []
    for st in walk_stmts(f.body):
        for e in _exprs(st):
            if isinstance(e, Call) and e.callee not in out:
                out.append(e.callee)
    return out


def _exprs(st: Stmt):
    for e in stmt_exprs(st):
        yield from walk_expr(e)


def builtin_rewriter(spellings: dict[str, str], global_id: str | None = None) -> ExprFn:
    """Map `<var>.x`-style thread indices back to the reserved compute builtins.

    `spellings` maps the source variable to a builtin kind (thread_id,
    block_id, block_dim); `global_id` names a variable read as
    block_id * block_dim + thread_id. An `int(...)` wrapper around a builtin is
    dropped.
    """

    def rewrite(e: Expr) -> Expr:
        if isinstance(e, MemberOrSwizzle) and isinstance(e.base, VarRef) and e.name in ("x", "y", "z"):
            base, axis, loc = e.base.name, e.name, e.location
            if base in spellings:
                return VarRef(f"{spellings[base]}_{axis}", location=loc)
            if base == global_id:
                product = BinaryOp("*", VarRef(f"block_id_{axis}", location=loc), VarRef(f"block_dim_{axis}", location=loc), location=loc)
                return BinaryOp("+", product, VarRef(f"thread_id_{axis}", location=loc), location=loc)
        if (
            isinstance(e, ConstructorCall)
            and e.type == INT
            and len(e.args) == 1
            and isinstance(e.args[0], VarRef)
            and e.args[0].name in COMPUTE_BUILTINS
        ):
            return e.args[0]
        return e

    return rewrite


def strip_suffix_renamer(reserved: frozenset[str], suffix: str = "_") -> Callable[[str], str]:
    """Inverse of a generator's `name_` spelling for identifiers its target reserves."""

    def original(name: str) -> str:
        if name.endswith(suffix) and name[: -len(suffix)] in reserved:
            return name[: -len(suffix)]
        return name

    return original
