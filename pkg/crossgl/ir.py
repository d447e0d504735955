"""CrossGL intermediate representation.

Every frontend produces a ShaderModule and every backend consumes one.

Types are frozen values. Expression and statement nodes are plain dataclasses:
the typechecker writes the resolved type into `Expr.ty` and replaces
parse-time MemberOrSwizzle nodes in place; nothing else mutates a module after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class SourceLocation:
    file: str = "<memory>"
    line: int = 1
    column: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NO_LOCATION = SourceLocation("<generated>", 1, 1)


# --------------------------------------------------------------------------- types


class ScalarKind(str, Enum):
    INT = "int"
    FLOAT = "float"
    BOOL = "bool"
    VOID = "void"


@dataclass(frozen=True, slots=True)
class ScalarType:
    kind: ScalarKind

    def __str__(self) -> str:
        return self.kind.value


@dataclass(frozen=True, slots=True)
class VectorType:
    dim: int
    element: ScalarKind = ScalarKind.FLOAT

    def __str__(self) -> str:
        return f"vec{self.dim}"


@dataclass(frozen=True, slots=True)
class MatrixType:
    rows: int
    cols: int

    def __str__(self) -> str:
        return f"mat{self.rows}" if self.rows == self.cols else f"mat{self.cols}x{self.rows}"


@dataclass(frozen=True, slots=True)
class ArrayType:
    element: "TypeExpr"
    size: int | None = None

    def __str__(self) -> str:
        base, dims = _array_parts(self)
        return str(base) + "".join(f"[{'' if d is None else d}]" for d in dims)


@dataclass(frozen=True, slots=True)
class NamedType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class SamplerType:
    def __str__(self) -> str:
        return "sampler2D"


TypeExpr = Union[ScalarType, VectorType, MatrixType, ArrayType, NamedType, SamplerType]

INT = ScalarType(ScalarKind.INT)
FLOAT = ScalarType(ScalarKind.FLOAT)
BOOL = ScalarType(ScalarKind.BOOL)
VOID = ScalarType(ScalarKind.VOID)
VEC2, VEC3, VEC4 = VectorType(2), VectorType(3), VectorType(4)
MAT2, MAT3, MAT4 = MatrixType(2, 2), MatrixType(3, 3), MatrixType(4, 4)
SAMPLER2D = SamplerType()

# Spelling -> type for every builtin type keyword.
BUILTIN_TYPES: dict[str, TypeExpr] = {
    "int": INT,
    "float": FLOAT,
    "bool": BOOL,
    "void": VOID,
    "vec2": VEC2,
    "vec3": VEC3,
    "vec4": VEC4,
    "mat2": MAT2,
    "mat3": MAT3,
    "mat4": MAT4,
    "sampler2D": SAMPLER2D,
}


def _array_parts(t: ArrayType) -> tuple[TypeExpr, list[int | None]]:
    dims: list[int | None] = []
    cur: TypeExpr = t
    while isinstance(cur, ArrayType):
        dims.append(cur.size)
        cur = cur.element
    return cur, dims


def array_parts(t: TypeExpr) -> tuple[TypeExpr, list[int | None]]:
    """Split `float a[2][3]` into (float, [2, 3]); non-arrays give (t, [])."""

    if isinstance(t, ArrayType):
        return _array_parts(t)
    return t, []


def make_array(base: TypeExpr, dims: list[int | None]) -> TypeExpr:
    """Inverse of array_parts: the first dimension is the outermost."""

    t = base
    for d in reversed(dims):
        t = ArrayType(t, d)
    return t


def is_numeric_scalar(t: TypeExpr | None) -> bool:
    return isinstance(t, ScalarType) and t.kind in (ScalarKind.INT, ScalarKind.FLOAT)


def is_float_like(t: TypeExpr | None) -> bool:
    """float or vecN."""

    return t == FLOAT or isinstance(t, VectorType)


def component_count(t: TypeExpr) -> int:
    if isinstance(t, ScalarType):
        return 1
    if isinstance(t, VectorType):
        return t.dim
    if isinstance(t, MatrixType):
        return t.rows * t.cols
    raise ValueError(f"{t} has no component count")


def contains_sampler(t: TypeExpr, structs: dict[str, "StructDecl"] | None = None) -> bool:
    if isinstance(t, SamplerType):
        return True
    if isinstance(t, ArrayType):
        return contains_sampler(t.element, structs)
    if isinstance(t, NamedType) and structs and t.name in structs:
        return any(contains_sampler(m.type, structs) for m in structs[t.name].members)
    return False


# --------------------------------------------------------------------------- attributes


@dataclass(frozen=True, slots=True)
class Attribute:
    name: str
    args: tuple[str | int, ...] = ()

    def int_args(self) -> list[int]:
        return [a for a in self.args if isinstance(a, int)]


def find_attribute(attrs: tuple[Attribute, ...] | list[Attribute], name: str) -> Attribute | None:
    for a in attrs:
        if a.name == name:
            return a
    return None


# --------------------------------------------------------------------------- expressions


@dataclass(eq=False, slots=True, kw_only=True)
class Expr:
    location: SourceLocation = NO_LOCATION
    ty: TypeExpr | None = None


@dataclass(eq=False, slots=True)
class IntLit(Expr):
    value: int


@dataclass(eq=False, slots=True)
class FloatLit(Expr):
    value: float


@dataclass(eq=False, slots=True)
class BoolLit(Expr):
    value: bool


@dataclass(eq=False, slots=True)
class VarRef(Expr):
    name: str


@dataclass(eq=False, slots=True)
class BinaryOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(eq=False, slots=True)
class UnaryOp(Expr):
    op: str
    operand: Expr


@dataclass(eq=False, slots=True)
class Call(Expr):
    callee: str
    args: list[Expr]


@dataclass(eq=False, slots=True)
class ConstructorCall(Expr):
    type: TypeExpr
    args: list[Expr]


@dataclass(eq=False, slots=True)
class MemberOrSwizzle(Expr):
    """`.name` as parsed; the typechecker replaces it by MemberAccess or Swizzle."""

    base: Expr
    name: str


@dataclass(eq=False, slots=True)
class MemberAccess(Expr):
    base: Expr
    member: str


@dataclass(eq=False, slots=True)
class Swizzle(Expr):
    base: Expr
    components: str


@dataclass(eq=False, slots=True)
class IndexAccess(Expr):
    base: Expr
    index: Expr


@dataclass(eq=False, slots=True)
class TernaryConditional(Expr):
    cond: Expr
    then: Expr
    otherwise: Expr


BINARY_OPS = frozenset({"+", "-", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", "&&", "||"})
UNARY_OPS = frozenset({"-", "!"})
ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/="})
SWIZZLE_CHARS = "xyzw"


def children(e: Expr) -> list[Expr]:
    match e:
        case BinaryOp(left=l, right=r):
            return [l, r]
        case UnaryOp(operand=o):
            return [o]
        case Call(args=a) | ConstructorCall(args=a):
            return list(a)
        case MemberOrSwizzle(base=b) | MemberAccess(base=b) | Swizzle(base=b):
            return [b]
        case IndexAccess(base=b, index=i):
            return [b, i]
        case TernaryConditional(cond=c, then=t, otherwise=o):
            return [c, t, o]
    return []


def walk_expr(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from walk_expr(c)


def lvalue_root(e: Expr) -> VarRef | None:
    """Variable an assignment target is rooted at, or None when it is not an lvalue chain."""

    while True:
        match e:
            case VarRef():
                return e
            case MemberOrSwizzle(base=b) | MemberAccess(base=b) | Swizzle(base=b) | IndexAccess(base=b):
                e = b
            case _:
                return None


# --------------------------------------------------------------------------- statements


@dataclass(eq=False, slots=True, kw_only=True)
class Stmt:
    location: SourceLocation = NO_LOCATION


@dataclass(eq=False, slots=True)
class VarDecl(Stmt):
    name: str
    type: TypeExpr
    init: Expr | None = None


@dataclass(eq=False, slots=True)
class Assign(Stmt):
    target: Expr
    op: str
    value: Expr


@dataclass(eq=False, slots=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    otherwise: Stmt | None = None


@dataclass(eq=False, slots=True)
class For(Stmt):
    init: Stmt | None
    cond: Expr | None
    step: Stmt | None
    body: Stmt


@dataclass(eq=False, slots=True)
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass(eq=False, slots=True)
class Return(Stmt):
    value: Expr | None = None


@dataclass(eq=False, slots=True)
class Break(Stmt):
    pass


@dataclass(eq=False, slots=True)
class Continue(Stmt):
    pass


@dataclass(eq=False, slots=True)
class ExprStmt(Stmt):
    expr: Expr


@dataclass(eq=False, slots=True)
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


def stmt_exprs(s: Stmt) -> list[Expr]:
    """Expressions directly owned by a statement (not those of nested statements)."""

    match s:
        case VarDecl(init=i):
            return [i] if i is not None else []
        case Assign(target=t, value=v):
            return [t, v]
        case If(cond=c) | While(cond=c):
            return [c]
        case For(cond=c):
            return [c] if c is not None else []
        case Return(value=v):
            return [v] if v is not None else []
        case ExprStmt(expr=e):
            return [e]
    return []


def sub_stmts(s: Stmt) -> list[Stmt]:
    match s:
        case Block(stmts=ss):
            return list(ss)
        case If(then=t, otherwise=o):
            return [t] if o is None else [t, o]
        case For(init=i, step=st, body=b):
            return [x for x in (i, st, b) if x is not None]
        case While(body=b):
            return [b]
    return []


def walk_stmts(s: Stmt) -> Iterator[Stmt]:
    yield s
    for c in sub_stmts(s):
        yield from walk_stmts(c)


def walk_all_exprs(s: Stmt) -> Iterator[Expr]:
    for st in walk_stmts(s):
        for e in stmt_exprs(st):
            yield from walk_expr(e)


# --------------------------------------------------------------------------- declarations


class Stage(str, Enum):
    VERTEX = "vertex"
    FRAGMENT = "fragment"
    COMPUTE = "compute"


class Qualifier(str, Enum):
    UNIFORM = "uniform"
    CONST = "const"
    PLAIN = "plain"


@dataclass(eq=False, slots=True)
class StructMember:
    name: str
    type: TypeExpr
    attributes: tuple[Attribute, ...] = ()
    location: SourceLocation = NO_LOCATION


@dataclass(eq=False, slots=True)
class StructDecl:
    name: str
    members: list[StructMember]
    attributes: tuple[Attribute, ...] = ()
    location: SourceLocation = NO_LOCATION

    def member(self, name: str) -> StructMember | None:
        for m in self.members:
            if m.name == name:
                return m
        return None


@dataclass(eq=False, slots=True)
class Param:
    name: str
    type: TypeExpr
    attributes: tuple[Attribute, ...] = ()
    location: SourceLocation = NO_LOCATION


@dataclass(eq=False, slots=True)
class FunctionDecl:
    name: str
    params: list[Param]
    return_type: TypeExpr
    body: Block
    stage: Stage | None = None
    attributes: tuple[Attribute, ...] = ()
    location: SourceLocation = NO_LOCATION

    @property
    def is_entry(self) -> bool:
        return self.stage is not None

    @property
    def key(self) -> str:
        """Module-unique name: entries called `main` are qualified by their stage."""

        if self.stage is not None and self.name == "main":
            return f"{self.stage.value}_main"
        return self.name


@dataclass(eq=False, slots=True)
class GlobalDecl:
    name: str
    type: TypeExpr
    qualifier: Qualifier = Qualifier.PLAIN
    init: Expr | None = None
    attributes: tuple[Attribute, ...] = ()
    location: SourceLocation = NO_LOCATION


@dataclass(eq=False, slots=True)
class ShaderModule:
    name: str
    structs: list[StructDecl] = field(default_factory=list)
    globals: list[GlobalDecl] = field(default_factory=list)
    functions: list[FunctionDecl] = field(default_factory=list)
    location: SourceLocation = NO_LOCATION

    def struct_map(self) -> dict[str, StructDecl]:
        return {s.name: s for s in self.structs}

    def function(self, name: str) -> FunctionDecl | None:
        """Function by key, falling back to the first one declared under `name`."""

        for f in self.functions:
            if f.key == name:
                return f
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def global_decl(self, name: str) -> GlobalDecl | None:
        for g in self.globals:
            if g.name == name:
                return g
        return None

    def entries(self, stage: Stage | None = None) -> list[FunctionDecl]:
        return [f for f in self.functions if f.stage is not None and (stage is None or f.stage == stage)]

    def helpers(self) -> list[FunctionDecl]:
        return [f for f in self.functions if f.stage is None]

    def stages(self) -> list[Stage]:
        """Stages present, in pipeline order."""

        present = {f.stage for f in self.functions if f.stage is not None}
        return [s for s in Stage if s in present]


# Reserved int builtins readable in compute code; each maps to a per-target spelling.
COMPUTE_BUILTINS: tuple[str, ...] = tuple(
    f"{kind}_{axis}" for kind in ("thread_id", "block_id", "block_dim") for axis in "xyz"
)


def optimize(module: ShaderModule) -> ShaderModule:
    """Target-agnostic optimisation pass: the identity transformation."""

    return module
