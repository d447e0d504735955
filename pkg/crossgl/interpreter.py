"""Reference interpreter: the oracle every conformance claim is checked against.

Values are plain Python and numpy objects:

  int / float / bool       scalars (floats are doubles, ints wrap at 32 bits)
  numpy.ndarray (n,)       vecN
  numpy.ndarray (n, n)     matN, standard row/column layout, m[i] is column i
  list                     arrays
  dict                     struct records, member name -> value
  CheckerboardSampler      sampler2D

Reads return references; every binding (declaration, assignment, argument)
stores a copy.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable, Union

import numpy as np

from .backends.base import format_float
from .diagnostics import Diagnostic
from .errors import DiagnosticsError, EvalError, ShaderTypeError
from .ir import (
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
    NamedType,
    Qualifier,
    Return,
    SamplerType,
    ScalarKind,
    ScalarType,
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
)
from .parser import parse_expression
from .semantics import Symbol, SymbolKind, SymbolTable, TypeChecker

log = logging.getLogger("crossgl.interpreter")

MAX_CALL_DEPTH = 1024
STEP_BUDGET = 10**7
SAMPLE_SIZE = 32
SAMPLE_SEED = 20240917

_INT_MIN = -(2**31)
_MOD = 2**32


@dataclass(frozen=True, slots=True)
class CheckerboardSampler:
    """Procedural stand-in for any bound texture: an 8x8 black/white board."""

    cells: int = 8

    def sample(self, uv: np.ndarray) -> np.ndarray:
        c = float((math.floor(self.cells * uv[0]) + math.floor(self.cells * uv[1])) % 2)
        return np.array([c, c, c, 1.0])


Value = Union[int, float, bool, np.ndarray, list, dict, CheckerboardSampler]


def wrap_int(x: int) -> int:
    return (x - _INT_MIN) % _MOD + _INT_MIN


def _f(x: Any) -> Any:
    """numpy scalar -> Python float; arrays untouched."""

    if isinstance(x, np.ndarray):
        return float(x) if x.ndim == 0 else x
    if isinstance(x, np.floating):
        return float(x)
    return x


def copy_value(v: Value) -> Value:
    if isinstance(v, np.ndarray):
        return v.copy()
    if isinstance(v, list):
        return [copy_value(x) for x in v]
    if isinstance(v, dict):
        return {k: copy_value(x) for k, x in v.items()}
    return v


def coerce(v: Value, ty: TypeExpr | None) -> Value:
    """Apply the implicit int->float conversion and copy."""

    if ty == FLOAT and isinstance(v, int) and not isinstance(v, bool):
        return float(v)
    if isinstance(ty, SamplerType) and v is None:
        return CheckerboardSampler()
    return copy_value(v)


def zero_value(ty: TypeExpr, structs: dict[str, StructDecl]) -> Value:
    match ty:
        case ScalarType(kind=ScalarKind.INT):
            return 0
        case ScalarType(kind=ScalarKind.FLOAT):
            return 0.0
        case ScalarType(kind=ScalarKind.BOOL):
            return False
        case VectorType(dim=n):
            return np.zeros(n)
        case MatrixType(rows=r, cols=c):
            return np.zeros((r, c))
        case ArrayType(element=el, size=size):
            return [zero_value(el, structs) for _ in range(size or 0)]
        case NamedType(name=n):
            return {m.name: zero_value(m.type, structs) for m in structs[n].members}
        case SamplerType():
            return CheckerboardSampler()
    raise ShaderTypeError(f"type {ty} has no value")


def value_matches(v: Value, ty: TypeExpr, structs: dict[str, StructDecl]) -> bool:
    """Shape check of a runtime value against its static type."""

    match ty:
        case ScalarType(kind=ScalarKind.INT):
            return isinstance(v, int) and not isinstance(v, bool) and _INT_MIN <= v < -_INT_MIN
        case ScalarType(kind=ScalarKind.FLOAT):
            return isinstance(v, float)
        case ScalarType(kind=ScalarKind.BOOL):
            return isinstance(v, bool)
        case VectorType(dim=n):
            return isinstance(v, np.ndarray) and v.shape == (n,)
        case MatrixType(rows=r, cols=c):
            return isinstance(v, np.ndarray) and v.shape == (r, c)
        case ArrayType(element=el, size=size):
            return (
                isinstance(v, list)
                and (size is None or len(v) == size)
                and all(value_matches(x, el, structs) for x in v)
            )
        case NamedType(name=n):
            decl = structs.get(n)
            return (
                decl is not None
                and isinstance(v, dict)
                and set(v) == {m.name for m in decl.members}
                and all(value_matches(v[m.name], m.type, structs) for m in decl.members)
            )
        case SamplerType():
            return isinstance(v, CheckerboardSampler)
    return False


# --------------------------------------------------------------------------- builtins


def _floats(args: list[Value]) -> list[Value]:
    return [float(a) if isinstance(a, int) and not isinstance(a, bool) else a for a in args]


def _normalize(v: Value) -> Value:
    if isinstance(v, np.ndarray):
        return v / np.linalg.norm(v)
    return _f(np.float64(v) / abs(np.float64(v)))


def _length(v: Value) -> float:
    if isinstance(v, np.ndarray):
        return float(np.linalg.norm(v))
    return abs(float(v))


def _mix(a: Value, b: Value, t: Value) -> Value:
    return _f(np.multiply(a, 1.0 - np.float64(t)) + np.multiply(b, t))


def _texture(sampler: CheckerboardSampler, uv: np.ndarray) -> np.ndarray:
    return sampler.sample(uv)


_FLOAT_BUILTINS: dict[str, Callable[..., Value]] = {
    "dot": lambda a, b: float(np.dot(a, b)),
    "cross": lambda a, b: np.cross(a, b),
    "normalize": _normalize,
    "length": _length,
    "max": lambda a, b: _f(np.maximum(a, b)),
    "min": lambda a, b: _f(np.minimum(a, b)),
    "pow": lambda a, b: _f(np.power(np.asarray(a, dtype=float), b)),
    "sqrt": lambda a: _f(np.sqrt(a)),
    "mix": _mix,
    "clamp": lambda x, lo, hi: _f(np.minimum(np.maximum(x, lo), hi)),
    "abs": lambda a: _f(np.abs(a)),
    "floor": lambda a: _f(np.floor(a)),
    "sin": lambda a: _f(np.sin(a)),
    "cos": lambda a: _f(np.cos(a)),
    "texture": _texture,
}

_INT_BUILTINS: dict[str, Callable[..., int]] = {
    "max": max,
    "min": min,
    "clamp": lambda x, lo, hi: min(max(x, lo), hi),
    "abs": lambda a: wrap_int(abs(a)),
}


def call_intrinsic(name: str, args: list[Value], result: TypeExpr | None) -> Value:
    if result == INT:
        return _INT_BUILTINS[name](*args)
    with np.errstate(all="ignore"):
        return _FLOAT_BUILTINS[name](*_floats(args))


# --------------------------------------------------------------------------- arithmetic


def _int_div(a: int, b: int, loc) -> int:
    if b == 0:
        raise EvalError(EvalError.DIVISION_BY_ZERO, "integer division by zero", location=loc)
    q = abs(a) // abs(b)
    return wrap_int(q if (a < 0) == (b < 0) else -q)


def _int_rem(a: int, b: int, loc) -> int:
    if b == 0:
        raise EvalError(EvalError.DIVISION_BY_ZERO, "integer remainder by zero", location=loc)
    q = abs(a) // abs(b)
    q = q if (a < 0) == (b < 0) else -q
    return wrap_int(a - b * q)


def binary(op: str, a: Value, b: Value, lt: TypeExpr | None, rt: TypeExpr | None, result: TypeExpr | None, loc=None) -> Value:
    if op in ("==", "!="):
        eq = a == b
        return bool(eq) if op == "==" else not bool(eq)
    if op == "<":
        return bool(a < b)
    if op == "<=":
        return bool(a <= b)
    if op == ">":
        return bool(a > b)
    if op == ">=":
        return bool(a >= b)
    if result == INT:
        if op == "+":
            return wrap_int(a + b)
        if op == "-":
            return wrap_int(a - b)
        if op == "*":
            return wrap_int(a * b)
        if op == "/":
            return _int_div(a, b, loc)
        if op == "%":
            return _int_rem(a, b, loc)
    matmul = op == "*" and (isinstance(lt, MatrixType) or isinstance(rt, MatrixType)) and not (
        isinstance(lt, ScalarType) or isinstance(rt, ScalarType)
    )
    with np.errstate(all="ignore"):
        x = np.float64(a) if not isinstance(a, np.ndarray) else a
        y = np.float64(b) if not isinstance(b, np.ndarray) else b
        if matmul:
            return _f(x @ y)
        if op == "+":
            return _f(x + y)
        if op == "-":
            return _f(x - y)
        if op == "*":
            return _f(x * y)
        if op == "/":
            return _f(x / y)
    raise EvalError(EvalError.UNBOUND, f"operator {op} has no runtime meaning for {lt} and {rt}", location=loc)


# --------------------------------------------------------------------------- evaluator

_NORMAL, _BREAK, _CONTINUE, _RETURN = range(4)


def _ensure_recursion_limit() -> None:
    wanted = MAX_CALL_DEPTH * 40 + 1000
    if sys.getrecursionlimit() < wanted:
        sys.setrecursionlimit(wanted)


class Interpreter:
    def __init__(
        self,
        module: ShaderModule,
        *,
        uniforms: dict[str, Value] | None = None,
        builtins: dict[str, int] | None = None,
        step_budget: int = STEP_BUDGET,
        max_depth: int = MAX_CALL_DEPTH,
        check_types: bool = False,
    ) -> None:
        self.module = module
        self.structs = module.struct_map()
        self.functions = {f.key: f for f in module.functions}
        self.step_budget = step_budget
        self.max_depth = max_depth
        self.check_types = check_types
        self.builtins = dict(builtins) if builtins is not None else None
        self.steps = 0
        self.depth = 0
        self._unbound: set[str] = set()

        self.globals: SymbolTable[Value] = SymbolTable()
        if self.builtins is not None:
            for name in COMPUTE_BUILTINS:
                self.globals.define(name, int(self.builtins.get(name, 0)))
        supplied = uniforms or {}
        for g in module.globals:
            if g.qualifier == Qualifier.UNIFORM:
                if g.name in supplied:
                    self.globals.define(g.name, coerce(supplied[g.name], g.type))
                elif isinstance(g.type, SamplerType):
                    self.globals.define(g.name, CheckerboardSampler())
                else:
                    self._unbound.add(g.name)
            elif g.init is not None:
                self.globals.define(g.name, coerce(self.eval(self.globals, g.init), g.type))
            else:
                self.globals.define(g.name, zero_value(g.type, self.structs))

    # ------------------------------------------------------------------ entry points

    def call(self, name: str, args: list[Value]) -> Value:
        f = self.module.function(name)
        if f is None:
            raise EvalError(EvalError.UNBOUND, f"no function named {name}")
        if f.stage == Stage.COMPUTE and self.builtins is None:
            raise EvalError(
                EvalError.COMPUTE_ENTRY,
                f"compute entry {name} needs thread builtins; evaluate it with eval_kernel",
                location=f.location,
            )
        if len(args) != len(f.params):
            raise EvalError(EvalError.UNBOUND, f"{name} expects {len(f.params)} arguments, got {len(args)}")
        self.steps = 0
        self.depth = 0
        _ensure_recursion_limit()
        result, _ = self.invoke(f, args)
        return result

    def invoke(self, f: FunctionDecl, args: list[Value]) -> tuple[Value, SymbolTable[Value]]:
        self.depth += 1
        if self.depth > self.max_depth:
            raise EvalError(
                EvalError.CALL_DEPTH_EXCEEDED, f"call depth exceeded {self.max_depth}", location=f.location
            )
        try:
            env = self.globals.fork()
            for p, a in zip(f.params, args):
                env.define(p.name, coerce(a, p.type))
            status, value = self.run_stmts(env, f.body.stmts)
            if status == _RETURN and f.return_type != VOID:
                return coerce(value, f.return_type), env
            return None, env
        finally:
            self.depth -= 1

    # ------------------------------------------------------------------ statements

    def tick(self, loc=None) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise EvalError(EvalError.STEP_BUDGET_EXCEEDED, f"more than {self.step_budget} steps", location=loc)

    def run_stmts(self, env: SymbolTable[Value], stmts: list[Stmt]) -> tuple[int, Value]:
        for s in stmts:
            status, value = self.exec(env, s)
            if status != _NORMAL:
                return status, value
        return _NORMAL, None

    def scoped(self, env: SymbolTable[Value], s: Stmt) -> tuple[int, Value]:
        with env.scope():
            if isinstance(s, Block):
                return self.run_stmts(env, s.stmts)
            return self.exec(env, s)

    def exec(self, env: SymbolTable[Value], s: Stmt) -> tuple[int, Value]:
        self.tick(s.location)
        match s:
            case Block(stmts=ss):
                with env.scope():
                    return self.run_stmts(env, ss)
            case VarDecl(name=n, type=t, init=i):
                value = zero_value(t, self.structs) if i is None else self.eval(env, i)
                env.define(n, coerce(value, t))
            case Assign():
                self.assign(env, s)
            case If(cond=c, then=t, otherwise=o):
                if self.eval(env, c):
                    return self.scoped(env, t)
                if o is not None:
                    return self.scoped(env, o)
            case While(cond=c, body=b):
                while self.eval(env, c):
                    self.tick(s.location)
                    status, value = self.scoped(env, b)
                    if status == _BREAK:
                        break
                    if status == _RETURN:
                        return status, value
            case For(init=i, cond=c, step=st, body=b):
                with env.scope():
                    if i is not None:
                        self.exec(env, i)
                    while c is None or self.eval(env, c):
                        self.tick(s.location)
                        status, value = self.scoped(env, b)
                        if status == _BREAK:
                            break
                        if status == _RETURN:
                            return status, value
                        if st is not None:
                            self.exec(env, st)
            case Return(value=v):
                return _RETURN, None if v is None else self.eval(env, v)
            case Break():
                return _BREAK, None
            case Continue():
                return _CONTINUE, None
            case ExprStmt(expr=e):
                self.eval(env, e)
        return _NORMAL, None

    def assign(self, env: SymbolTable[Value], s: Assign) -> None:
        value = self.eval(env, s.value)
        if s.op != "=":
            current = self.eval(env, s.target)
            value = binary(s.op[0], current, value, s.target.ty, s.value.ty, s.target.ty, s.location)
        self.store(env, s.target, coerce(value, s.target.ty))

    def store(self, env: SymbolTable[Value], target: Expr, value: Value) -> None:
        match target:
            case VarRef(name=n):
                env.set(n, value)
            case MemberAccess(base=b, member=m):
                self.eval(env, b)[m] = value
            case IndexAccess(base=b, index=ix):
                container = self.eval(env, b)
                i = self.index_of(env, ix, container, target)
                if isinstance(container, np.ndarray) and container.ndim == 2:
                    container[:, i] = value
                else:
                    container[i] = value
            case Swizzle(base=b, components=cs):
                indices = ["xyzw".index(c) for c in cs]
                if isinstance(b, Swizzle):
                    vec = np.array(self.eval(env, b), dtype=float)
                    vec[indices] = value
                    self.store(env, b, vec)
                else:
                    self.eval(env, b)[indices] = value
            case _:
                raise EvalError(EvalError.UNBOUND, f"cannot assign to {type(target).__name__}", location=target.location)

    # ------------------------------------------------------------------ expressions

    def index_of(self, env: SymbolTable[Value], ix: Expr, container: Value, node: Expr) -> int:
        i = self.eval(env, ix)
        n = container.shape[-1] if isinstance(container, np.ndarray) else len(container)
        if not 0 <= i < n:
            raise EvalError(
                EvalError.INDEX_OUT_OF_BOUNDS, f"index {i} out of bounds for length {n}", location=node.location
            )
        return i

    def eval(self, env: SymbolTable[Value], e: Expr) -> Value:
        v = self._eval(env, e)
        if self.check_types and e.ty is not None and not value_matches(v, e.ty, self.structs):
            raise AssertionError(f"{e.location}: value {v!r} does not match static type {e.ty}")
        return v

    def _eval(self, env: SymbolTable[Value], e: Expr) -> Value:
        match e:
            case IntLit(value=v):
                return wrap_int(v)
            case FloatLit(value=v):
                return float(v)
            case BoolLit(value=v):
                return bool(v)
            case VarRef(name=n):
                v = env.lookup(n)
                if v is None:
                    if n in self._unbound:
                        raise EvalError(EvalError.UNBOUND, f"uniform {n} has no value", location=e.location)
                    raise EvalError(EvalError.UNBOUND, f"{n} is not bound", location=e.location)
                return v
            case BinaryOp(op="&&", left=l, right=r):
                return bool(self.eval(env, l)) and bool(self.eval(env, r))
            case BinaryOp(op="||", left=l, right=r):
                return bool(self.eval(env, l)) or bool(self.eval(env, r))
            case BinaryOp(op=op, left=l, right=r):
                a = self.eval(env, l)
                b = self.eval(env, r)
                return binary(op, a, b, l.ty, r.ty, e.ty, e.location)
            case UnaryOp(op="!", operand=o):
                return not self.eval(env, o)
            case UnaryOp(op="-", operand=o):
                v = self.eval(env, o)
                if isinstance(v, int) and not isinstance(v, bool):
                    return wrap_int(-v)
                return _f(-np.asarray(v, dtype=float)) if isinstance(v, np.ndarray) else -v
            case Call(callee=c, args=args):
                values = [self.eval(env, a) for a in args]
                f = self.functions.get(c)
                if f is not None:
                    result, _ = self.invoke(f, values)
                    return result
                return call_intrinsic(c, values, e.ty)
            case ConstructorCall(type=t, args=args):
                return construct(t, [self.eval(env, a) for a in args])
            case MemberAccess(base=b, member=m):
                return self.eval(env, b)[m]
            case Swizzle(base=b, components=cs):
                vec = self.eval(env, b)
                if len(cs) == 1:
                    return float(vec["xyzw".index(cs)])
                return np.array([vec["xyzw".index(c)] for c in cs], dtype=float)
            case IndexAccess(base=b, index=ix):
                container = self.eval(env, b)
                i = self.index_of(env, ix, container, e)
                if isinstance(container, np.ndarray):
                    return container[:, i] if container.ndim == 2 else float(container[i])
                return container[i]
            case TernaryConditional(cond=c, then=t, otherwise=o):
                chosen = t if self.eval(env, c) else o
                return coerce(self.eval(env, chosen), e.ty)
        raise EvalError(EvalError.UNBOUND, f"cannot evaluate {type(e).__name__}", location=e.location)


def construct(t: TypeExpr, args: list[Value]) -> Value:
    match t:
        case ScalarType(kind=ScalarKind.INT):
            a = args[0]
            if isinstance(a, float):
                return wrap_int(math.trunc(a)) if math.isfinite(a) else 0
            return wrap_int(int(a))
        case ScalarType(kind=ScalarKind.FLOAT):
            return float(args[0])
        case ScalarType(kind=ScalarKind.BOOL):
            return bool(args[0] != 0)
        case VectorType(dim=n):
            if len(args) == 1 and not isinstance(args[0], np.ndarray):
                return np.full(n, float(args[0]))
            return np.concatenate([np.atleast_1d(np.asarray(a, dtype=float)) for a in args])
        case MatrixType():
            return np.column_stack([np.asarray(a, dtype=float) for a in args])
    raise EvalError(EvalError.UNBOUND, f"type {t} has no constructor")


# --------------------------------------------------------------------------- public API


def eval_function(
    module: ShaderModule,
    name: str,
    args: list[Value],
    *,
    uniforms: dict[str, Value] | None = None,
    check_types: bool = False,
) -> Value:
    """Evaluate one function of a typechecked module. Compute entries are refused."""

    return Interpreter(module, uniforms=uniforms, check_types=check_types).call(name, args)


def eval_kernel(
    module: ShaderModule,
    name: str,
    args: list[Value],
    builtins: dict[str, int],
    *,
    uniforms: dict[str, Value] | None = None,
) -> list[Value]:
    """Run one invocation of a compute kernel; returns the parameters' final values."""

    interp = Interpreter(module, uniforms=uniforms, builtins=builtins)
    f = module.function(name)
    if f is None:
        raise EvalError(EvalError.UNBOUND, f"no function named {name}")
    if len(args) != len(f.params):
        raise EvalError(EvalError.UNBOUND, f"{name} expects {len(f.params)} arguments, got {len(args)}")
    _ensure_recursion_limit()
    _, env = interp.invoke(f, args)
    return [env.lookup(p.name) for p in f.params]


def eval_expression(env: SymbolTable[Value], expr: Expr, module: ShaderModule | None = None) -> Value:
    """Evaluate a typechecked expression against `env` (calls resolve in `module`)."""

    interp = Interpreter(module or ShaderModule("expr"))
    _ensure_recursion_limit()
    return interp.eval(env, expr)


# --------------------------------------------------------------------------- samples and comparison


def sample_value(ty: TypeExpr, rng: np.random.Generator, structs: dict[str, StructDecl]) -> Value:
    """Draw one argument: floats in [-2, 2], ints in [0, 8]."""

    match ty:
        case ScalarType(kind=ScalarKind.INT):
            return int(rng.integers(0, 9))
        case ScalarType(kind=ScalarKind.FLOAT):
            return float(rng.uniform(-2.0, 2.0))
        case ScalarType(kind=ScalarKind.BOOL):
            return bool(rng.integers(0, 2))
        case VectorType(dim=n):
            return rng.uniform(-2.0, 2.0, n)
        case MatrixType(rows=r, cols=c):
            return rng.uniform(-2.0, 2.0, (r, c))
        case ArrayType(element=el, size=size):
            return [sample_value(el, rng, structs) for _ in range(size or 4)]
        case NamedType(name=n):
            return {m.name: sample_value(m.type, rng, structs) for m in structs[n].members}
        case SamplerType():
            return CheckerboardSampler()
    raise ShaderTypeError(f"cannot sample type {ty}")


def standard_sample(
    f: FunctionDecl,
    structs: dict[str, StructDecl],
    *,
    count: int = SAMPLE_SIZE,
    seed: int = SAMPLE_SEED,
) -> list[list[Value]]:
    """Fixed, seeded argument lists for `f` (same seed, same points, every run)."""

    rng = np.random.default_rng(seed)
    return [[sample_value(p.type, rng, structs) for p in f.params] for _ in range(count)]


def values_close(a: Value, b: Value, *, rel: float = 1e-6, abs_tol: float = 1e-9) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        x, y = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return x.shape == y.shape and bool(np.allclose(x, y, rtol=rel, atol=abs_tol, equal_nan=True))
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(values_close(x, y, rel=rel, abs_tol=abs_tol) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(values_close(a[k], b[k], rel=rel, abs_tol=abs_tol) for k in a)
    if isinstance(a, float) or isinstance(b, float):
        if isinstance(a, bool) or isinstance(b, bool):
            return False
        x, y = float(a), float(b)
        if math.isnan(x) or math.isnan(y):
            return math.isnan(x) and math.isnan(y)
        return math.isclose(x, y, rel_tol=rel, abs_tol=abs_tol)
    return type(a) is type(b) and a == b


def format_value(v: Value) -> str:
    """CrossGL spelling of a value; arrays and records use a bracketed debug form."""

    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return f"vec{v.shape[0]}({', '.join(format_float(float(x)) for x in v)})"
        cols = [format_value(v[:, i].copy()) for i in range(v.shape[1])]
        return f"mat{v.shape[0]}({', '.join(cols)})"
    if isinstance(v, list):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {format_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, CheckerboardSampler):
        return "sampler2D(checkerboard)"
    return repr(v)


def value_to_json(v: Value) -> Any:
    """JSON-safe form: vectors as lists, matrices as lists of columns, non-finite floats as strings."""

    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return [value_to_json(float(x)) for x in v]
        return [value_to_json(v[:, i].copy()) for i in range(v.shape[1])]
    if isinstance(v, list):
        return [value_to_json(x) for x in v]
    if isinstance(v, dict):
        return {k: value_to_json(x) for k, x in v.items()}
    if isinstance(v, CheckerboardSampler):
        return "sampler2D"
    return None


def typecheck_expression(
    expr: Expr, bindings: dict[str, TypeExpr] | None = None
) -> tuple[Expr, list[Diagnostic]]:
    """Type a standalone expression against optional variable bindings."""

    checker = TypeChecker(ShaderModule("expr"))
    checker.symbols.push()
    for name, ty in (bindings or {}).items():
        checker.symbols.define(name, Symbol(ty, SymbolKind.LOCAL))
    typed = checker.expr(expr)
    return typed, checker.diagnostics


def parse_value(text: str) -> tuple[Value, TypeExpr]:
    """Evaluate a closed CrossGL expression such as `vec3(0, 0, 1)` (CLI and service arguments)."""

    typed, diags = typecheck_expression(parse_expression(text, "<arg>"))
    if diags:
        raise DiagnosticsError(diags)
    return eval_expression(SymbolTable(), typed), typed.ty  # type: ignore[return-value]
