"""Rust source generator: one self-contained .rs unit.

Every unit starts with a vector-math preamble (Vec2..Vec4, Mat2..Mat4 and the
builtin table) so it compiles without external crates. Uniforms travel in a
`Globals` record passed as the first parameter of every function; compute
entries also receive `ids: &ComputeIds`. Rust has no implicit int->float
conversion, so every such site is written out.
"""

from __future__ import annotations

from ..errors import UnsupportedConstruct, UnsupportedType
from ..ir import (
    COMPUTE_BUILTINS,
    FLOAT,
    INT,
    ArrayType,
    Assign,
    BinaryOp,
    Break,
    Call,
    ConstructorCall,
    Continue,
    Expr,
    For,
    FunctionDecl,
    IndexAccess,
    IntLit,
    MatrixType,
    NamedType,
    Qualifier,
    Return,
    ScalarKind,
    ScalarType,
    ShaderModule,
    Stage,
    Stmt,
    Swizzle,
    TernaryConditional,
    TypeExpr,
    UnaryOp,
    VarDecl,
    VarRef,
    VectorType,
    While,
    array_parts,
    contains_sampler,
    is_numeric_scalar,
    walk_all_exprs,
    walk_expr,
    walk_stmts,
)
from .base import (
    BINARY_PREC,
    PREC_POSTFIX,
    PREC_PRIMARY,
    Backend,
    CLikeEmitter,
    FeatureSupport,
    OutputUnit,
    Support,
    format_float,
    header_comment,
)

RESERVED = frozenset(
    (
        "as", "crate", "enum", "extern", "fn", "impl", "in", "let", "loop", "match", "mod", "move",
        "mut", "pub", "ref", "self", "Self", "static", "super", "trait", "type", "unsafe", "use",
        "where", "async", "await", "dyn", "abstract", "become", "box", "do", "final", "macro",
        "override", "priv", "typeof", "unsized", "virtual", "yield", "try", "union",
        "g", "ids", "Vec2", "Vec3", "Vec4", "Mat2", "Mat3", "Mat4", "Globals", "ComputeIds",
        "Gen", "MinMax",
    )
)

_COMPARISONS = frozenset(("==", "!=", "<", "<=", ">", ">="))
# i32 operators as wrapping methods, matching 32-bit wraparound.
_WRAPPING = {
    "+": "wrapping_add",
    "-": "wrapping_sub",
    "*": "wrapping_mul",
    "/": "wrapping_div",
    "%": "wrapping_rem",
}
_FIELDS = "xyzw"


# --------------------------------------------------------------------------- preamble


def _vector_preamble(n: int) -> list[str]:
    v = f"Vec{n}"
    fs = _FIELDS[:n]

    def each(fmt: str) -> str:
        return ", ".join(f"{c}: " + fmt.format(c=c) for c in fs)

    lines = [
        "#[derive(Clone, Copy, Debug, Default, PartialEq)]",
        f"pub struct {v} {{ {', '.join(f'pub {c}: f32' for c in fs)} }}",
        "",
        f"impl {v} {{",
        f"    pub fn new({', '.join(f'{c}: f32' for c in fs)}) -> {v} {{ {v} {{ {', '.join(fs)} }} }}",
        f"    pub fn splat(s: f32) -> {v} {{ {v} {{ {each('s')} }} }}",
        "}",
    ]
    for trait, op in (("Add", "+"), ("Sub", "-"), ("Mul", "*"), ("Div", "/")):
        method = trait.lower()
        lines += [
            f"impl {trait} for {v} {{ type Output = {v}; fn {method}(self, o: {v}) -> {v} {{ {v} {{ {each('self.{c} ' + op + ' o.{c}')} }} }} }}",
            f"impl {trait}<f32> for {v} {{ type Output = {v}; fn {method}(self, s: f32) -> {v} {{ {v} {{ {each('self.{c} ' + op + ' s')} }} }} }}",
            f"impl {trait}<{v}> for f32 {{ type Output = {v}; fn {method}(self, o: {v}) -> {v} {{ {v} {{ {each('self ' + op + ' o.{c}')} }} }} }}",
            f"impl {trait}Assign for {v} {{ fn {method}_assign(&mut self, o: {v}) {{ *self = *self {op} o; }} }}",
            f"impl {trait}Assign<f32> for {v} {{ fn {method}_assign(&mut self, s: f32) {{ *self = *self {op} s; }} }}",
        ]
    arms = " ".join(f"{i} => &self.{c}," for i, c in enumerate(fs))
    arms_mut = " ".join(f"{i} => &mut self.{c}," for i, c in enumerate(fs))
    lines += [
        f"impl Neg for {v} {{ type Output = {v}; fn neg(self) -> {v} {{ {v} {{ {each('-self.{c}')} }} }} }}",
        f"impl Index<usize> for {v} {{ type Output = f32; fn index(&self, i: usize) -> &f32 {{ match i {{ {arms} _ => panic!(\"index out of bounds\") }} }} }}",
        f"impl IndexMut<usize> for {v} {{ fn index_mut(&mut self, i: usize) -> &mut f32 {{ match i {{ {arms_mut} _ => panic!(\"index out of bounds\") }} }} }}",
        f"impl Gen for {v} {{",
        f"    fn map<F: Fn(f32) -> f32>(self, f: F) -> {v} {{ {v} {{ {each('f(self.{c})')} }} }}",
        f"    fn zip<F: Fn(f32, f32) -> f32>(self, o: {v}, f: F) -> {v} {{ {v} {{ {each('f(self.{c}, o.{c})')} }} }}",
        f"    fn dot(self, o: {v}) -> f32 {{ {' + '.join(f'self.{c} * o.{c}' for c in fs)} }}",
        "}",
        f"impl MinMax for {v} {{",
        f"    fn max_of(self, o: {v}) -> {v} {{ self.zip(o, f32::max) }}",
        f"    fn min_of(self, o: {v}) -> {v} {{ self.zip(o, f32::min) }}",
        f"    fn abs_of(self) -> {v} {{ self.map(f32::abs) }}",
        "}",
    ]
    return lines


def _matrix_preamble(n: int) -> list[str]:
    v = f"Vec{n}"
    m = f"Mat{n}"
    cols = range(n)

    def columns(fmt: str) -> str:
        return f"{m} {{ c: [{', '.join(fmt.format(i=i) for i in cols)}] }}"

    return [
        "#[derive(Clone, Copy, Debug, Default, PartialEq)]",
        f"pub struct {m} {{ pub c: [{v}; {n}] }}",
        "",
        f"impl {m} {{",
        f"    pub fn new({', '.join(f'c{i}: {v}' for i in cols)}) -> {m} {{ {columns('c{i}')} }}",
        "}",
        f"impl Index<usize> for {m} {{ type Output = {v}; fn index(&self, i: usize) -> &{v} {{ &self.c[i] }} }}",
        f"impl IndexMut<usize> for {m} {{ fn index_mut(&mut self, i: usize) -> &mut {v} {{ &mut self.c[i] }} }}",
        f"impl Mul<{v}> for {m} {{ type Output = {v}; fn mul(self, x: {v}) -> {v} {{ {' + '.join(f'self.c[{i}] * x[{i}]' for i in cols)} }} }}",
        f"impl Mul<{m}> for {v} {{ type Output = {v}; fn mul(self, a: {m}) -> {v} {{ {v}::new({', '.join(f'self.dot(a.c[{i}])' for i in cols)}) }} }}",
        f"impl Mul for {m} {{ type Output = {m}; fn mul(self, b: {m}) -> {m} {{ {columns('self * b.c[{i}]')} }} }}",
        f"impl Add for {m} {{ type Output = {m}; fn add(self, b: {m}) -> {m} {{ {columns('self.c[{i}] + b.c[{i}]')} }} }}",
        f"impl Sub for {m} {{ type Output = {m}; fn sub(self, b: {m}) -> {m} {{ {columns('self.c[{i}] - b.c[{i}]')} }} }}",
        f"impl Mul<f32> for {m} {{ type Output = {m}; fn mul(self, s: f32) -> {m} {{ {columns('self.c[{i}] * s')} }} }}",
        f"impl Div<f32> for {m} {{ type Output = {m}; fn div(self, s: f32) -> {m} {{ {columns('self.c[{i}] / s')} }} }}",
        f"impl Mul<{m}> for f32 {{ type Output = {m}; fn mul(self, a: {m}) -> {m} {{ a * self }} }}",
        f"impl Neg for {m} {{ type Output = {m}; fn neg(self) -> {m} {{ self * -1.0 }} }}",
        f"impl MulAssign for {m} {{ fn mul_assign(&mut self, b: {m}) {{ *self = *self * b; }} }}",
        f"impl MulAssign<f32> for {m} {{ fn mul_assign(&mut self, s: f32) {{ *self = *self * s; }} }}",
        f"impl DivAssign<f32> for {m} {{ fn div_assign(&mut self, s: f32) {{ *self = *self / s; }} }}",
        f"impl AddAssign for {m} {{ fn add_assign(&mut self, b: {m}) {{ *self = *self + b; }} }}",
        f"impl SubAssign for {m} {{ fn sub_assign(&mut self, b: {m}) {{ *self = *self - b; }} }}",
        f"impl MulAssign<{m}> for {v} {{ fn mul_assign(&mut self, a: {m}) {{ *self = *self * a; }} }}",
    ]


_BUILTINS = """\
pub trait Gen: Copy {
    fn map<F: Fn(f32) -> f32>(self, f: F) -> Self;
    fn zip<F: Fn(f32, f32) -> f32>(self, o: Self, f: F) -> Self;
    fn dot(self, o: Self) -> f32;
}

pub trait MinMax: Copy {
    fn max_of(self, o: Self) -> Self;
    fn min_of(self, o: Self) -> Self;
    fn abs_of(self) -> Self;
}

impl Gen for f32 {
    fn map<F: Fn(f32) -> f32>(self, f: F) -> f32 { f(self) }
    fn zip<F: Fn(f32, f32) -> f32>(self, o: f32, f: F) -> f32 { f(self, o) }
    fn dot(self, o: f32) -> f32 { self * o }
}
impl MinMax for f32 {
    fn max_of(self, o: f32) -> f32 { f32::max(self, o) }
    fn min_of(self, o: f32) -> f32 { f32::min(self, o) }
    fn abs_of(self) -> f32 { f32::abs(self) }
}
impl MinMax for i32 {
    fn max_of(self, o: i32) -> i32 { std::cmp::max(self, o) }
    fn min_of(self, o: i32) -> i32 { std::cmp::min(self, o) }
    fn abs_of(self) -> i32 { self.wrapping_abs() }
}

pub fn cgl_dot<T: Gen>(a: T, b: T) -> f32 { a.dot(b) }
pub fn cgl_length<T: Gen>(a: T) -> f32 { a.dot(a).sqrt() }
pub fn cgl_normalize<T: Gen>(a: T) -> T { let l = cgl_length(a); a.map(|x| x / l) }
pub fn cgl_sqrt<T: Gen>(a: T) -> T { a.map(f32::sqrt) }
pub fn cgl_floor<T: Gen>(a: T) -> T { a.map(f32::floor) }
pub fn cgl_sin<T: Gen>(a: T) -> T { a.map(f32::sin) }
pub fn cgl_cos<T: Gen>(a: T) -> T { a.map(f32::cos) }
pub fn cgl_pow<T: Gen>(a: T, b: T) -> T { a.zip(b, f32::powf) }
pub fn cgl_mix<T: Gen>(a: T, b: T, t: T) -> T {
    a.zip(t, |x, w| x * (1.0 - w)).zip(b.zip(t, |y, w| y * w), |p, q| p + q)
}
pub fn cgl_max<T: MinMax>(a: T, b: T) -> T { a.max_of(b) }
pub fn cgl_min<T: MinMax>(a: T, b: T) -> T { a.min_of(b) }
pub fn cgl_abs<T: MinMax>(a: T) -> T { a.abs_of() }
pub fn cgl_clamp<T: MinMax>(x: T, lo: T, hi: T) -> T { x.max_of(lo).min_of(hi) }
pub fn cgl_cross(a: Vec3, b: Vec3) -> Vec3 {
    Vec3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComputeIds {
    pub thread_id: [i32; 3],
    pub block_id: [i32; 3],
    pub block_dim: [i32; 3],
}"""


def _build_preamble() -> str:
    lines = [
        "#![allow(dead_code, unused_mut, unused_variables, unused_parens, unused_labels, unused_assignments,"
        " unreachable_code, non_snake_case, non_upper_case_globals, non_camel_case_types)]",
        "",
        "use std::ops::{Add, AddAssign, Div, DivAssign, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};",
        "",
    ]
    for n in (2, 3, 4):
        lines += _vector_preamble(n) + [""]
    for n in (2, 3, 4):
        lines += _matrix_preamble(n) + [""]
    lines.append(_BUILTINS)
    return "\n".join(lines)


PREAMBLE = _build_preamble()


# --------------------------------------------------------------------------- emitter


class RustEmitter(CLikeEmitter):
    target = "rust"
    reserved = RESERVED

    def __init__(self, module: ShaderModule, backend: Backend) -> None:
        super().__init__(module, backend)
        self.uniforms = {g.name for g in module.globals if g.qualifier == Qualifier.UNIFORM}
        self.has_globals = bool(self.uniforms)
        self.locals: set[str] = set()
        self.loops: list[tuple[str, str]] = []
        self.labels = 0
        self.current: FunctionDecl | None = None

    # ------------------------------------------------------------------ types

    def rust_type(self, t: TypeExpr) -> str:
        base, dims = array_parts(t)
        text = self.type_name(base)
        for d in reversed(dims):
            text = f"Vec<{text}>" if d is None else f"[{text}; {d}]"
        return text

    # ------------------------------------------------------------------ expressions

    def float_lit(self, v: float) -> str:
        if v != v:
            return "f32::NAN"
        if v in (float("inf"), float("-inf")):
            return "f32::INFINITY" if v > 0 else "f32::NEG_INFINITY"
        return format_float(v) + "_f32"

    def cast_float(self, e: Expr) -> str:
        if isinstance(e, IntLit):
            return self.float_lit(float(e.value))
        return f"({self.expr(e)} as f32)"

    def splat_text(self, t: TypeExpr, text: str) -> str:
        return f"{self.type_name(t)}::splat({text})"

    def as_float(self, e: Expr, target: TypeExpr | None) -> str:
        """`e` written for a slot of type `target`, converting an int when the slot is float."""

        if target == FLOAT and e.ty == INT:
            return self.cast_float(e)
        return self.expr(e)

    def expr_prec(self, e):
        if isinstance(e, VarRef):
            if e.name in COMPUTE_BUILTINS:
                kind, axis = e.name.rsplit("_", 1)
                return f"ids.{kind}[{_FIELDS.index(axis)}]", PREC_POSTFIX
            if e.name in self.uniforms and e.name not in self.locals:
                return f"g.{self.ident(e.name)}", PREC_POSTFIX
        if isinstance(e, UnaryOp) and e.op == "-" and e.ty == INT and not isinstance(e.operand, IntLit):
            return f"{self.receiver(e.operand)}.wrapping_neg()", PREC_POSTFIX
        return super().expr_prec(e)

    def operand(self, e: Expr, other: Expr, prec: int) -> str:
        if e.ty == INT and other.ty is not None and other.ty != INT:
            return self.cast_float(e)
        return self.expr(e, prec)

    def binary(self, e: BinaryOp) -> tuple[str, int]:
        p = BINARY_PREC[e.op]
        if e.op in _WRAPPING and e.left.ty == INT and e.right.ty == INT:
            return f"{self.receiver(e.left)}.{_WRAPPING[e.op]}({self.expr(e.right)})", PREC_POSTFIX
        if e.op in _COMPARISONS:
            # Rust comparisons do not chain; parenthesise any comparison or looser operand.
            left = self.operand(e.left, e.right, BINARY_PREC["+"])
            right = self.operand(e.right, e.left, BINARY_PREC["+"])
        else:
            left = self.operand(e.left, e.right, p)
            right = self.operand(e.right, e.left, p + 1)
        return f"{left} {e.op} {right}", p

    def receiver(self, e: Expr) -> str:
        """Method-call receiver; integer literals need a suffix to pick i32."""

        if isinstance(e, IntLit):
            return f"{e.value}_i32" if e.value >= 0 else f"({e.value}_i32)"
        return self.expr(e, PREC_POSTFIX)

    def call(self, e: Call) -> str:
        f = self.functions.get(e.callee)
        if f is None:
            if e.callee == "texture":
                raise self.unsupported("texture sampling", "the Rust target has no texture units", node=e)
            return f"cgl_{e.callee}({', '.join(self.intrinsic_args(e, splat=True))})"
        args = ["g"] if self.has_globals else []
        for p, a in zip(f.params, e.args):
            if isinstance(p.type, ArrayType) and p.type.size is None:
                passed_unsized = isinstance(a.ty, ArrayType) and a.ty.size is None or self.is_slice(a)
                args.append(self.expr(a) if passed_unsized else f"&mut {self.expr(a, PREC_POSTFIX)}")
            else:
                args.append(self.as_float(a, p.type))
        return f"{self.function_name(e.callee)}({', '.join(args)})"

    def is_slice(self, e: Expr) -> bool:
        """Kernel array parameters are `&mut [T]` whatever their declared size."""

        f = self.current
        if f is None or f.stage != Stage.COMPUTE or not isinstance(e, VarRef):
            return False
        return any(p.name == e.name and isinstance(p.type, ArrayType) for p in f.params)

    def constructor(self, e: ConstructorCall) -> tuple[str, int]:
        t = e.type
        if isinstance(t, ScalarType):
            a = e.args[0]
            text = self.expr(a, PREC_POSTFIX)
            if a.ty == t:
                return self.expr_prec(a)
            if t.kind == ScalarKind.BOOL:
                zero = "0.0_f32" if a.ty == FLOAT else "0"
                return f"({text} != {zero})", PREC_PRIMARY
            if a.ty == ScalarType(ScalarKind.BOOL):
                text = f"({text} as i32)"
            return f"({text} as {self.type_name(t)})", PREC_PRIMARY
        if isinstance(t, MatrixType):
            return f"Mat{t.cols}::new({self.args(e.args)})", PREC_POSTFIX
        if len(e.args) == 1 and isinstance(e.args[0].ty, ScalarType):
            return f"Vec{t.dim}::splat({self.as_float(e.args[0], FLOAT)})", PREC_POSTFIX
        components: list[str] = []
        for a in e.args:
            if isinstance(a.ty, VectorType):
                base = self.expr(a, PREC_POSTFIX)
                components += [f"{base}.{c}" for c in _FIELDS[: a.ty.dim]]
            else:
                components.append(self.as_float(a, FLOAT))
        return f"Vec{t.dim}::new({', '.join(components)})", PREC_POSTFIX

    def swizzle(self, e: Swizzle) -> tuple[str, int]:
        base = self.expr(e.base, PREC_POSTFIX)
        if len(e.components) == 1:
            return f"{base}.{e.components}", PREC_POSTFIX
        return f"Vec{len(e.components)}::new({', '.join(f'{base}.{c}' for c in e.components)})", PREC_POSTFIX

    def index(self, e: IndexAccess) -> tuple[str, int]:
        return f"{self.expr(e.base, PREC_POSTFIX)}[({self.expr(e.index)}) as usize]", PREC_POSTFIX

    def ternary(self, e: TernaryConditional) -> tuple[str, int]:
        then = self.as_float(e.then, e.ty)
        otherwise = self.as_float(e.otherwise, e.ty)
        return f"(if {self.expr(e.cond)} {{ {then} }} else {{ {otherwise} }})", PREC_PRIMARY

    # ------------------------------------------------------------------ statements

    def stmt(self, s: Stmt) -> None:
        match s:
            case Assign(target=Swizzle(components=comps)) if len(comps) > 1:
                self.swizzle_assign(s)
            case While(cond=c, body=b):
                label = self.new_label()
                self.loops.append((f"break '{label};", f"continue '{label};"))
                with self.w.block(f"'{label}: while {self.expr(c)}"):
                    self.body(b)
                self.loops.pop()
            case For():
                self.for_stmt(s)
            case Break():
                self.w.line(self.loops[-1][0])
            case Continue():
                self.w.line(self.loops[-1][1])
            case Return(value=v) if v is not None:
                self.w.line(f"return {self.as_float(v, self.current.return_type)};")
            case _:
                super().stmt(s)

    def new_label(self) -> str:
        self.labels += 1
        return f"cgl_loop_{self.labels}"

    def for_stmt(self, s: For) -> None:
        label = self.new_label()
        body_label = label.replace("loop", "body")
        with self.w.block(""):
            if s.init is not None:
                self.stmt(s.init)
            cond = self.expr(s.cond) if s.cond is not None else "true"
            with self.w.block(f"'{label}: while {cond}"):
                self.loops.append((f"break '{label};", f"break '{body_label};"))
                with self.w.block(f"'{body_label}:"):
                    self.body(s.body)
                self.loops.pop()
                if s.step is not None:
                    self.stmt(s.step)

    def var_decl_text(self, s: VarDecl) -> str:
        init = self.as_float(s.init, s.type) if s.init is not None else "Default::default()"
        return f"let mut {self.var_name(s.name)}: {self.rust_type(s.type)} = {init}"

    def assign_text(self, s: Assign) -> str:
        target_ty = s.target.ty
        op = s.op[:-1]
        if op in _WRAPPING and target_ty == INT and s.value.ty == INT:
            target = self.expr(s.target)
            return f"{target} = {target}.{_WRAPPING[op]}({self.expr(s.value)})"
        value = self.as_float(s.value, target_ty if is_numeric_scalar(target_ty) else FLOAT)
        return f"{self.expr(s.target)} {s.op} {value}"

    def swizzle_assign(self, s: Assign) -> None:
        target = s.target
        if any(isinstance(x, Swizzle) and len(x.components) > 1 for x in walk_expr(target.base)):
            raise self.unsupported("assignment through a nested swizzle", node=s)
        base = self.expr(target.base, PREC_POSTFIX)
        vector = isinstance(s.value.ty, VectorType)
        value_ty = s.value.ty if vector else FLOAT
        with self.w.block(""):
            self.w.line(f"let cgl_swz: {self.type_name(value_ty)} = {self.as_float(s.value, FLOAT)};")
            for i, c in enumerate(target.components):
                source = f"cgl_swz.{_FIELDS[i]}" if vector else "cgl_swz"
                self.w.line(f"{base}.{c} {s.op} {source};")

    # ------------------------------------------------------------------ functions

    def param_text(self, p, kernel: bool) -> str:
        name = self.var_name(p.name)
        if isinstance(p.type, ArrayType):
            base, dims = array_parts(p.type)
            if kernel or dims[0] is None:
                inner = self.rust_type(p.type.element)
                return f"{name}: &mut [{inner}]"
        return f"mut {name}: {self.rust_type(p.type)}"

    def rust_function(self, f: FunctionDecl) -> None:
        self.current = f
        self.locals = {p.name for p in f.params} | {
            st.name for st in walk_stmts(f.body) if isinstance(st, VarDecl)
        }
        kernel = f.stage == Stage.COMPUTE
        params = ["g: &Globals"] if self.has_globals else []
        params += [self.param_text(p, kernel) for p in f.params]
        if kernel:
            params.append("ids: &ComputeIds")
        ret = "" if f.return_type == ScalarType(ScalarKind.VOID) else f" -> {self.rust_type(f.return_type)}"
        with self.w.block(f"pub fn {self.function_name(f.key)}({', '.join(params)}){ret}"):
            for s in f.body.stmts:
                self.stmt(s)
        self.current = None

    def emit(self) -> str:
        m = self.module
        for f in m.functions:
            for e in walk_all_exprs(f.body):
                if isinstance(e, Call) and e.callee == "texture" and e.callee not in self.functions:
                    raise self.unsupported("texture sampling", "the Rust target has no texture units", node=e)
        self.w.line(f"// {header_comment(m, 'Rust')}")
        for line in PREAMBLE.splitlines():
            self.w.line(line)
        self.w.blank()
        for s in m.structs:
            self.w.line("#[derive(Clone, Copy, Debug, Default, PartialEq)]")
            with self.w.block(f"pub struct {self.ident(s.name)}"):
                for mem in s.members:
                    self.w.line(f"pub {self.ident(mem.name)}: {self.rust_type(mem.type)},")
            self.w.blank()
        if self.has_globals:
            self.w.line("#[derive(Clone, Debug, Default)]")
            with self.w.block("pub struct Globals"):
                for g in m.globals:
                    if g.qualifier == Qualifier.UNIFORM:
                        self.w.line(f"pub {self.ident(g.name)}: {self.rust_type(g.type)},")
            self.w.blank()
        for g in m.globals:
            if g.qualifier == Qualifier.CONST:
                self.w.line(f"pub const {self.var_name(g.name)}: {self.rust_type(g.type)} = {self.as_float(g.init, g.type)};")
        self.w.blank()
        for f in m.functions:
            self.rust_function(f)
            self.w.blank()
        return self.w.text()


class RustBackend(Backend):
    name = "rust"
    extensions = (".rs",)
    features = {
        "textures": FeatureSupport(Support.UNSUPPORTED, "no sampler type"),
        "shaders": FeatureSupport(Support.DEGRADED, "entry points become plain functions"),
    }

    def map_type(self, t: TypeExpr) -> str:
        match t:
            case ScalarType(kind=ScalarKind.INT):
                return "i32"
            case ScalarType(kind=ScalarKind.FLOAT):
                return "f32"
            case ScalarType(kind=ScalarKind.BOOL):
                return "bool"
            case ScalarType(kind=ScalarKind.VOID):
                return "()"
            case VectorType(dim=d, element=ScalarKind.FLOAT):
                return f"Vec{d}"
            case MatrixType(rows=r, cols=c) if r == c:
                return f"Mat{c}"
            case NamedType(name=n):
                return n + "_" if n in RESERVED else n
            case ArrayType(element=el, size=size):
                inner = self.map_type(el)
                return f"Vec<{inner}>" if size is None else f"[{inner}; {size}]"
        raise UnsupportedType(t, self.name)

    def generate(self, module: ShaderModule, *, stem: str | None = None) -> list[OutputUnit]:
        _reject_textures(module)
        text = RustEmitter(module, self).emit()
        return [OutputUnit(suggested_filename=f"{stem or module.name}.rs", target=self.name, text=text)]


def _reject_textures(module: ShaderModule) -> None:
    structs = module.struct_map()
    decls = [(g.type, g.location) for g in module.globals]
    decls += [(m.type, m.location) for s in module.structs for m in s.members]
    decls += [(p.type, p.location) for f in module.functions for p in f.params]
    for t, loc in decls:
        if contains_sampler(t, structs):
            raise UnsupportedConstruct("texture sampling", "rust", "no sampler type", location=loc)
