"""Name resolution and expression typing.

typecheck_module never raises: every problem becomes a Diagnostic. On success
each Expr carries its resolved type in `ty` and every MemberOrSwizzle has been
replaced by a MemberAccess or Swizzle. Running it twice is a no-op.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import Generic, Iterator, TypeVar

from .diagnostics import Diagnostic, error, sort_diagnostics
from .errors import ShaderTypeError
from .intrinsics import INTRINSICS, resolve_intrinsic
from .ir import (
    BOOL,
    COMPUTE_BUILTINS,
    FLOAT,
    INT,
    VOID,
    ArrayType,
    Assign,
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
    MatrixType,
    MemberAccess,
    MemberOrSwizzle,
    NamedType,
    Qualifier,
    Return,
    ScalarKind,
    ScalarType,
    ShaderModule,
    SourceLocation,
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
    contains_sampler,
    is_numeric_scalar,
    lvalue_root,
    walk_expr,
)
from .validate import validate_program

log = logging.getLogger("crossgl.semantics")

V = TypeVar("V")

_POSITION_SET = "xyzw"
_COLOR_SET = "rgba"
_ARITHMETIC = frozenset({"+", "-", "*", "/"})
_RELATIONAL = frozenset({"<", "<=", ">", ">="})
_EQUALITY = frozenset({"==", "!="})
_LOGICAL = frozenset({"&&", "||"})


class SymbolKind(str, Enum):
    PARAM = "param"
    LOCAL = "local"
    GLOBAL = "global"
    FUNCTION = "function"
    STRUCT = "struct"


@dataclass(frozen=True, slots=True)
class Symbol:
    type: TypeExpr | None
    kind: SymbolKind
    qualifier: Qualifier = Qualifier.PLAIN


class SymbolTable(Generic[V]):
    """Stack of scopes; lookups search innermost first.

    Used with Symbol values by the typechecker and with runtime values by the
    interpreter.
    """

    def __init__(self) -> None:
        self._scopes: list[dict[str, V]] = [{}]

    def fork(self) -> "SymbolTable[V]":
        """New table sharing this one's outermost (module) scope, with a fresh inner scope."""

        child: SymbolTable[V] = SymbolTable()
        child._scopes = [self._scopes[0], {}]
        return child

    @property
    def depth(self) -> int:
        return len(self._scopes)

    def push(self) -> None:
        self._scopes.append({})

    def pop(self) -> None:
        if len(self._scopes) == 1:
            raise RuntimeError("cannot pop the module scope")
        self._scopes.pop()

    @contextmanager
    def scope(self) -> Iterator[None]:
        self.push()
        try:
            yield
        finally:
            self.pop()

    def define(self, name: str, value: V) -> bool:
        """Bind in the innermost scope. False when the name is already bound there."""

        inner = self._scopes[-1]
        if name in inner:
            return False
        inner[name] = value
        return True

    def lookup(self, name: str) -> V | None:
        for scope in reversed(self._scopes):
            if name in scope:
                return scope[name]
        return None

    def __contains__(self, name: str) -> bool:
        return any(name in s for s in self._scopes)

    def set(self, name: str, value: V) -> None:
        """Rebind an existing name in the innermost scope that holds it."""

        for scope in reversed(self._scopes):
            if name in scope:
                scope[name] = value
                return
        raise KeyError(name)


# --------------------------------------------------------------------------- type rules


def _promote_scalar(a: TypeExpr, b: TypeExpr) -> TypeExpr | None:
    if is_numeric_scalar(a) and is_numeric_scalar(b):
        return INT if a == INT and b == INT else FLOAT
    return None


def unify_types(left: TypeExpr, right: TypeExpr, op: str) -> TypeExpr:
    """Result type of `left op right`; raises ShaderTypeError when no rule applies."""

    def fail() -> ShaderTypeError:
        return ShaderTypeError(f"operator {op} cannot be applied to {left} and {right}")

    if op in _LOGICAL:
        if left == BOOL and right == BOOL:
            return BOOL
        raise fail()

    if op in _EQUALITY:
        if left == right and isinstance(left, ScalarType) and left != VOID:
            return BOOL
        if _promote_scalar(left, right) is not None:
            return BOOL
        raise fail()

    if op in _RELATIONAL:
        if _promote_scalar(left, right) is not None:
            return BOOL
        raise fail()

    if op == "%":
        if left == INT and right == INT:
            return INT
        raise fail()

    if op not in _ARITHMETIC:
        raise ShaderTypeError(f"unknown operator {op}")

    scalar = _promote_scalar(left, right)
    if scalar is not None:
        return scalar

    match left, right:
        case VectorType(dim=a), VectorType(dim=b) if a == b:
            return left
        case VectorType(), ScalarType() if is_numeric_scalar(right):
            return left
        case ScalarType(), VectorType() if is_numeric_scalar(left):
            return right
        case MatrixType(rows=a), MatrixType(rows=b) if a == b and op != "/":
            return left
        case MatrixType(), ScalarType() if is_numeric_scalar(right) and op in ("*", "/"):
            return left
        case ScalarType(), MatrixType() if is_numeric_scalar(left) and op == "*":
            return right
        case MatrixType(cols=c), VectorType(dim=d) if op == "*" and c == d:
            return VectorType(left.rows)
        case VectorType(dim=d), MatrixType(rows=r) if op == "*" and r == d:
            return VectorType(right.cols)
    raise fail()


def canonical_swizzle(components: str) -> str:
    """Map a colour swizzle (`rgb`) to its positional spelling (`xyz`)."""

    if components and all(c in _COLOR_SET for c in components):
        return components.translate(str.maketrans(_COLOR_SET, _POSITION_SET))
    return components


def is_swizzle_name(name: str) -> bool:
    return 1 <= len(name) <= 4 and (
        all(c in _POSITION_SET for c in name) or all(c in _COLOR_SET for c in name)
    )


def resolve_swizzle(base_type: TypeExpr, components: str, *, write: bool = False) -> TypeExpr:
    if not isinstance(base_type, VectorType):
        raise ShaderTypeError(f"cannot swizzle a value of type {base_type}")
    if not is_swizzle_name(components):
        raise ShaderTypeError(f"invalid swizzle .{components}")
    canon = canonical_swizzle(components)
    for c in canon:
        if _POSITION_SET.index(c) >= base_type.dim:
            raise ShaderTypeError(f"swizzle component {c} is out of range for {base_type}")
    if write and len(set(canon)) != len(canon):
        raise ShaderTypeError(f"swizzle .{components} repeats a component and cannot be assigned")
    return FLOAT if len(canon) == 1 else VectorType(len(canon))


def check_constructor(type_: TypeExpr, arg_types: list[TypeExpr]) -> TypeExpr:
    match type_:
        case ScalarType(kind=k) if k != ScalarKind.VOID:
            if len(arg_types) != 1 or not isinstance(arg_types[0], ScalarType) or arg_types[0] == VOID:
                raise ShaderTypeError(f"{type_} constructor takes exactly one scalar argument")
            return type_
        case VectorType(dim=n):
            if len(arg_types) == 1 and is_numeric_scalar(arg_types[0]):
                return type_
            total = 0
            for a in arg_types:
                if is_numeric_scalar(a):
                    total += 1
                elif isinstance(a, VectorType):
                    total += a.dim
                else:
                    raise ShaderTypeError(f"{type_} constructor cannot take an argument of type {a}")
            if total != n:
                raise ShaderTypeError(f"{type_} constructor needs {n} components, got {total}")
            return type_
        case MatrixType(rows=r, cols=c):
            column = VectorType(r)
            if len(arg_types) != c or any(a != column for a in arg_types):
                raise ShaderTypeError(f"{type_} constructor takes {c} {column} columns")
            return type_
    raise ShaderTypeError(f"type {type_} has no constructor")


def assignable(target: TypeExpr, source: TypeExpr) -> bool:
    """Implicit conversions: identity, int to float, sized array to unsized array."""

    if target == source:
        return True
    if target == FLOAT and source == INT:
        return True
    if isinstance(target, ArrayType) and isinstance(source, ArrayType) and target.size is None:
        return target.element == source.element
    return False


def always_returns(s: Stmt) -> bool:
    match s:
        case Return():
            return True
        case Block(stmts=ss):
            return any(always_returns(x) for x in ss)
        case If(then=t, otherwise=o):
            return o is not None and always_returns(t) and always_returns(o)
    return False


# --------------------------------------------------------------------------- checker


class TypeChecker:
    def __init__(self, module: ShaderModule) -> None:
        self.module = module
        self.structs: dict[str, StructDecl] = module.struct_map()
        self.functions: dict[str, FunctionDecl] = {f.key: f for f in module.functions}
        self.symbols: SymbolTable[Symbol] = SymbolTable()
        self.diagnostics: list[Diagnostic] = []
        self.current: FunctionDecl | None = None
        self.loop_depth = 0

        for s in module.structs:
            self.symbols.define(s.name, Symbol(NamedType(s.name), SymbolKind.STRUCT))
        for g in module.globals:
            self.symbols.define(g.name, Symbol(g.type, SymbolKind.GLOBAL, g.qualifier))
        for f in module.functions:
            self.symbols.define(f.name, Symbol(f.return_type, SymbolKind.FUNCTION))

    def report(self, message: str, loc: SourceLocation) -> None:
        self.diagnostics.append(error(message, loc, code="TYPE_ERROR"))

    # ------------------------------------------------------------------ declarations

    def run(self) -> list[Diagnostic]:
        for g in self.module.globals:
            if g.qualifier == Qualifier.PLAIN:
                self.report(f"mutable global {g.name} is not supported; declare it const or uniform", g.location)
            if contains_sampler(g.type, self.structs) and g.qualifier != Qualifier.UNIFORM:
                self.report(f"sampler global {g.name} must be a uniform", g.location)
            if isinstance(g.type, ArrayType) and g.type.size is None and g.qualifier != Qualifier.UNIFORM:
                self.report(f"unsized array {g.name} must be a uniform", g.location)
            if g.init is not None:
                g.init = self.expr(g.init)
                self._check_constant(g.init)
                if g.init.ty is not None and not assignable(g.type, g.init.ty):
                    self.report(f"cannot initialize {g.type} {g.name} with {g.init.ty}", g.init.location)
        for f in self.module.functions:
            self.function(f)
        return sort_diagnostics(self.diagnostics)

    def _check_constant(self, e: Expr) -> None:
        for sub in walk_expr(e):
            if isinstance(sub, VarRef):
                sym = self.symbols.lookup(sub.name)
                if sym is None or sym.kind != SymbolKind.GLOBAL or sym.qualifier != Qualifier.CONST:
                    self.report(f"{sub.name} is not a constant", sub.location)
            elif isinstance(sub, Call) and sub.callee not in INTRINSICS:
                self.report(f"call to {sub.callee} is not allowed in a constant initializer", sub.location)

    def function(self, f: FunctionDecl) -> None:
        self.current = f
        self.loop_depth = 0
        with self.symbols.scope():
            for p in f.params:
                if not self.symbols.define(p.name, Symbol(p.type, SymbolKind.PARAM)):
                    self.report(f"duplicate parameter {p.name}", p.location)
            # the body shares the parameter scope
            for s in f.body.stmts:
                self.stmt(s)
        if f.return_type != VOID and not always_returns(f.body):
            self.report(f"function {f.name} does not return a value on every path", f.location)
        if f.stage is not None:
            self.entry(f)
        self.current = None

    def _stage_record(self, t: TypeExpr, f: FunctionDecl, role: str) -> None:
        if not isinstance(t, NamedType) or t.name not in self.structs:
            return
        for m in self.structs[t.name].members:
            if m.type != FLOAT and not isinstance(m.type, VectorType):
                self.report(
                    f"{role} member {t.name}.{m.name} of {f.stage.value} entry {f.name} must be float or a vector",
                    m.location,
                )

    def entry(self, f: FunctionDecl) -> None:
        stage = f.stage
        where = f"{stage.value} entry {f.name}"
        if stage == Stage.VERTEX:
            if len(f.params) != 1 or not isinstance(f.params[0].type, NamedType):
                self.report(f"{where} must take exactly one struct parameter", f.location)
            else:
                self._stage_record(f.params[0].type, f, "input")
            if not isinstance(f.return_type, NamedType):
                self.report(f"{where} must return a struct", f.location)
            else:
                self._stage_record(f.return_type, f, "output")
        elif stage == Stage.FRAGMENT:
            if len(f.params) > 1:
                self.report(f"{where} takes at most one parameter", f.location)
            for p in f.params:
                if isinstance(p.type, NamedType):
                    self._stage_record(p.type, f, "input")
                elif p.type != FLOAT and not isinstance(p.type, VectorType):
                    self.report(f"{where} parameter {p.name} must be a struct, float or vector", p.location)
            if isinstance(f.return_type, NamedType):
                self._stage_record(f.return_type, f, "output")
            elif f.return_type != VectorType(4):
                self.report(f"{where} must return vec4 or a struct", f.location)
        else:
            if f.return_type != VOID:
                self.report(f"{where} must return void", f.location)
            for p in f.params:
                base = p.type
                while isinstance(base, ArrayType):
                    base = base.element
                if not (is_numeric_scalar(base) or isinstance(base, VectorType)):
                    self.report(f"{where} parameter {p.name} must be a scalar, vector or array of them", p.location)

    # ------------------------------------------------------------------ statements

    def block(self, b: Block) -> None:
        with self.symbols.scope():
            for s in b.stmts:
                self.stmt(s)

    def stmt(self, s: Stmt) -> None:
        match s:
            case Block():
                self.block(s)
            case VarDecl():
                self.var_decl(s)
            case Assign():
                self.assign(s)
            case If():
                s.cond = self.condition(s.cond, "if")
                self.scoped(s.then)
                if s.otherwise is not None:
                    self.scoped(s.otherwise)
            case While():
                s.cond = self.condition(s.cond, "while")
                self.loop_body(s.body)
            case For():
                with self.symbols.scope():
                    if s.init is not None:
                        self.stmt(s.init)
                    if s.cond is not None:
                        s.cond = self.condition(s.cond, "for")
                    if s.step is not None:
                        self.stmt(s.step)
                    self.loop_body(s.body)
            case Return():
                self.ret(s)
            case Break() | Continue():
                if self.loop_depth == 0:
                    word = "break" if isinstance(s, Break) else "continue"
                    self.report(f"{word} outside of a loop", s.location)
            case ExprStmt():
                s.expr = self.expr(s.expr)
            case _:
                self.report(f"unsupported statement {type(s).__name__}", s.location)

    def scoped(self, s: Stmt) -> None:
        if isinstance(s, Block):
            self.block(s)
        else:
            with self.symbols.scope():
                self.stmt(s)

    def loop_body(self, body: Stmt) -> None:
        self.loop_depth += 1
        try:
            self.scoped(body)
        finally:
            self.loop_depth -= 1

    def condition(self, e: Expr, what: str) -> Expr:
        e = self.expr(e)
        if e.ty is not None and e.ty != BOOL:
            self.report(f"{what} condition must be bool, got {e.ty}", e.location)
        return e

    def var_decl(self, s: VarDecl) -> None:
        if isinstance(s.type, ArrayType) and any(
            d is None for d in _dims(s.type)
        ):
            self.report(f"local array {s.name} needs a size", s.location)
        if contains_sampler(s.type, self.structs):
            self.report(f"local {s.name} cannot hold a sampler", s.location)
        if s.init is not None:
            s.init = self.expr(s.init)
            if s.init.ty is not None and not assignable(s.type, s.init.ty):
                self.report(f"cannot assign {s.init.ty} to {s.type}", s.init.location)
        if s.name in COMPUTE_BUILTINS or s.name in INTRINSICS:
            self.report(f"{s.name} is reserved", s.location)
        if not self.symbols.define(s.name, Symbol(s.type, SymbolKind.LOCAL)):
            self.report(f"redeclaration of {s.name}", s.location)

    def assign(self, s: Assign) -> None:
        root = lvalue_root(s.target)
        s.target = self.expr(s.target, write=True)
        s.value = self.expr(s.value)
        if root is None:
            self.report("assignment target is not a variable", s.target.location)
            return
        sym = self.symbols.lookup(root.name)
        if sym is not None and sym.kind == SymbolKind.GLOBAL:
            self.report(f"cannot assign to {sym.qualifier.value} {root.name}", s.location)
        elif sym is None and root.name in COMPUTE_BUILTINS:
            self.report(f"cannot assign to compute builtin {root.name}", s.location)
        target, value = s.target.ty, s.value.ty
        if target is None or value is None:
            return
        if s.op == "=":
            if not assignable(target, value):
                self.report(f"cannot assign {value} to {target}", s.value.location)
            return
        try:
            result = unify_types(target, value, s.op[0])
        except ShaderTypeError as exc:
            self.report(exc.message, s.location)
            return
        if result != target:
            self.report(f"{s.op} would change the type of {target} to {result}", s.location)

    def ret(self, s: Return) -> None:
        f = self.current
        if f is None:
            return
        if s.value is None:
            if f.return_type != VOID:
                self.report("missing return value", s.location)
            return
        s.value = self.expr(s.value)
        if f.return_type == VOID:
            self.report(f"void function {f.name} cannot return a value", s.location)
        elif s.value.ty is not None and not assignable(f.return_type, s.value.ty):
            self.report(f"cannot return {s.value.ty} from function returning {f.return_type}", s.value.location)

    # ------------------------------------------------------------------ expressions

    def expr(self, e: Expr, *, write: bool = False) -> Expr:
        """Type `e` and return the node that replaces it (itself unless specialised)."""

        e.ty = None
        try:
            return self._expr(e, write)
        except ShaderTypeError as exc:
            self.report(exc.message, e.location)
            e.ty = None
            return e

    def _expr(self, e: Expr, write: bool) -> Expr:
        match e:
            case IntLit():
                e.ty = INT
            case FloatLit():
                e.ty = FLOAT
            case BoolLit():
                e.ty = BOOL
            case VarRef():
                e.ty = self.var_type(e)
            case BinaryOp():
                e.left = self.expr(e.left)
                e.right = self.expr(e.right)
                if e.left.ty is not None and e.right.ty is not None:
                    e.ty = unify_types(e.left.ty, e.right.ty, e.op)
            case UnaryOp():
                e.operand = self.expr(e.operand)
                t = e.operand.ty
                if t is None:
                    return e
                if e.op == "!":
                    if t != BOOL:
                        raise ShaderTypeError(f"operator ! needs bool, got {t}")
                elif e.op == "-":
                    if not (is_numeric_scalar(t) or isinstance(t, (VectorType, MatrixType))):
                        raise ShaderTypeError(f"operator - cannot be applied to {t}")
                else:
                    raise ShaderTypeError(f"unknown unary operator {e.op}")
                e.ty = t
            case Call():
                e.args = [self.expr(a) for a in e.args]
                e.ty = self.call(e)
            case ConstructorCall():
                e.args = [self.expr(a) for a in e.args]
                types = [a.ty for a in e.args]
                if all(t is not None for t in types):
                    e.ty = check_constructor(e.type, types)  # type: ignore[arg-type]
            case MemberOrSwizzle() | MemberAccess() | Swizzle():
                return self.field(e, write)
            case IndexAccess():
                e.base = self.expr(e.base, write=write)
                e.index = self.expr(e.index)
                e.ty = self.index(e)
            case TernaryConditional():
                e.cond = self.condition(e.cond, "conditional")
                e.then = self.expr(e.then)
                e.otherwise = self.expr(e.otherwise)
                a, b = e.then.ty, e.otherwise.ty
                if a is None or b is None:
                    return e
                if a == b:
                    e.ty = a
                elif _promote_scalar(a, b) is not None:
                    e.ty = FLOAT
                else:
                    raise ShaderTypeError(f"conditional branches have different types {a} and {b}")
            case _:
                raise ShaderTypeError(f"unsupported expression {type(e).__name__}")
        return e

    def var_type(self, e: VarRef) -> TypeExpr | None:
        sym = self.symbols.lookup(e.name)
        if sym is None:
            if e.name in COMPUTE_BUILTINS:
                if self.current is None or self.current.stage != Stage.COMPUTE:
                    raise ShaderTypeError(f"{e.name} is only available in compute entry points")
                return INT
            raise ShaderTypeError(f"undeclared identifier {e.name}")
        if sym.kind in (SymbolKind.FUNCTION, SymbolKind.STRUCT):
            raise ShaderTypeError(f"{e.name} is a {sym.kind.value}, not a value")
        return sym.type

    def call(self, e: Call) -> TypeExpr | None:
        arg_types = [a.ty for a in e.args]
        if any(t is None for t in arg_types):
            return None
        f = self.functions.get(e.callee) or self.module.function(e.callee)
        if f is not None:
            if f.stage is not None:
                raise ShaderTypeError(f"entry point {f.name} cannot be called")
            if len(f.params) != len(e.args):
                raise ShaderTypeError(f"{f.name} expects {len(f.params)} arguments, got {len(e.args)}")
            for p, a in zip(f.params, e.args):
                if not assignable(p.type, a.ty):  # type: ignore[arg-type]
                    raise ShaderTypeError(f"argument {p.name} of {f.name} expects {p.type}, got {a.ty}")
            return f.return_type
        if e.callee in self.structs:
            raise ShaderTypeError(f"struct {e.callee} cannot be constructed; assign its members instead")
        if e.callee in INTRINSICS:
            sig = resolve_intrinsic(e.callee, arg_types)  # type: ignore[arg-type]
            if sig is None:
                shown = ", ".join(str(t) for t in arg_types)
                raise ShaderTypeError(f"no overload of {e.callee} takes ({shown})")
            return sig.result
        raise ShaderTypeError(f"call to undeclared function {e.callee}")

    def field(self, e: MemberOrSwizzle | MemberAccess | Swizzle, write: bool) -> Expr:
        base = self.expr(e.base, write=write)
        name = e.name if isinstance(e, MemberOrSwizzle) else e.member if isinstance(e, MemberAccess) else e.components
        t = base.ty
        if t is None:
            e.base = base
            return e
        if isinstance(t, NamedType):
            decl = self.structs.get(t.name)
            member = decl.member(name) if decl is not None else None
            if member is None:
                raise ShaderTypeError(f"struct {t.name} has no member {name}")
            return MemberAccess(base, name, location=e.location, ty=member.type)
        if isinstance(t, VectorType):
            ty = resolve_swizzle(t, name, write=write)
            return Swizzle(base, canonical_swizzle(name), location=e.location, ty=ty)
        raise ShaderTypeError(f"type {t} has no member {name}")

    def index(self, e: IndexAccess) -> TypeExpr | None:
        bt, it = e.base.ty, e.index.ty
        if bt is None or it is None:
            return None
        if it != INT:
            raise ShaderTypeError(f"index must be int, got {it}")
        match bt:
            case ArrayType(element=el, size=size):
                if isinstance(e.index, IntLit) and size is not None and not 0 <= e.index.value < size:
                    raise ShaderTypeError(f"index {e.index.value} is out of bounds for {bt}")
                return el
            case VectorType(dim=n):
                if isinstance(e.index, IntLit) and not 0 <= e.index.value < n:
                    raise ShaderTypeError(f"index {e.index.value} is out of bounds for {bt}")
                return FLOAT
            case MatrixType(rows=r, cols=c):
                if isinstance(e.index, IntLit) and not 0 <= e.index.value < c:
                    raise ShaderTypeError(f"index {e.index.value} is out of bounds for {bt}")
                return VectorType(r)
        raise ShaderTypeError(f"cannot index a value of type {bt}")


def _dims(t: TypeExpr) -> list[int | None]:
    out: list[int | None] = []
    while isinstance(t, ArrayType):
        out.append(t.size)
        t = t.element
    return out


def typecheck_module(module: ShaderModule) -> list[Diagnostic]:
    diags = TypeChecker(module).run()
    log.debug("typechecked %s: %d diagnostic(s)", module.name, len(diags))
    return diags


def analyze(module: ShaderModule) -> list[Diagnostic]:
    """validate_program, then typecheck_module when the declarations are sound."""

    diags = validate_program(module)
    if diags:
        return diags
    return typecheck_module(module)
