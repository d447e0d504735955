"""CUDA C++ generator: one .cu unit.

Compute entries become `__global__` kernels. Vertex and fragment entries have
no CUDA counterpart and are emitted as `__device__` functions so graphics
modules still translate. Vector arithmetic and the builtin table come from a
generated preamble in namespace `cgl`.
"""

from __future__ import annotations

from ..errors import UnsupportedType
from ..ir import (
    COMPUTE_BUILTINS,
    INT,
    ArrayType,
    Assign,
    Call,
    ConstructorCall,
    Expr,
    FunctionDecl,
    GlobalDecl,
    IndexAccess,
    MatrixType,
    NamedType,
    Param,
    Qualifier,
    SamplerType,
    ScalarKind,
    ScalarType,
    ShaderModule,
    Stage,
    Stmt,
    Swizzle,
    TypeExpr,
    VarRef,
    VectorType,
    array_parts,
    walk_expr,
)
from .base import (
    PREC_POSTFIX,
    PREC_PRIMARY,
    PREC_UNARY,
    Backend,
    CLikeEmitter,
    FeatureSupport,
    OutputUnit,
    Support,
    format_float,
    header_comment,
    uniform_uses,
)

RESERVED = frozenset(
    (
        "asm", "auto", "case", "catch", "char", "class", "const_cast", "default", "delete", "do",
        "double", "dynamic_cast", "enum", "explicit", "export", "extern", "friend", "goto",
        "inline", "long", "mutable", "namespace", "new", "operator", "private", "protected",
        "public", "register", "reinterpret_cast", "short", "signed", "sizeof", "static",
        "static_cast", "switch", "template", "this", "throw", "try", "typedef", "typeid",
        "typename", "union", "unsigned", "using", "virtual", "volatile", "wchar_t", "nullptr",
        "threadIdx", "blockIdx", "blockDim", "gridDim", "warpSize", "float2", "float3", "float4",
        "int2", "int3", "int4", "dim3", "cgl", "main",
    )
)

BUILTIN_SOURCES = {"thread_id": "threadIdx", "block_id": "blockIdx", "block_dim": "blockDim"}

_FN = "__host__ __device__ inline"
_UNARY_MATH = {"sqrt": "sqrtf", "floor": "floorf", "sin": "sinf", "cos": "cosf", "abs": "fabsf"}
_BINARY_MATH = {"max": "fmaxf", "min": "fminf", "pow": "powf"}


def _vector_preamble(n: int) -> list[str]:
    v = f"float{n}"
    comps = "xyzw"[:n]

    def make(fmt: str) -> str:
        return f"make_{v}({', '.join(fmt.format(c=c) for c in comps)})"

    lines = [f"{_FN} {v} cgl_splat{n}(float s) {{ return {make('s')}; }}"]
    for op in "+-*/":
        lines += [
            f"{_FN} {v} operator{op}({v} a, {v} b) {{ return {make('a.{c} ' + op + ' b.{c}')}; }}",
            f"{_FN} {v} operator{op}({v} a, float s) {{ return {make('a.{c} ' + op + ' s')}; }}",
            f"{_FN} {v} operator{op}(float s, {v} a) {{ return {make('s ' + op + ' a.{c}')}; }}",
            f"{_FN} {v}& operator{op}=({v}& a, {v} b) {{ a = a {op} b; return a; }}",
            f"{_FN} {v}& operator{op}=({v}& a, float s) {{ a = a {op} s; return a; }}",
        ]
    lines += [
        f"{_FN} {v} operator-({v} a) {{ return {make('-a.{c}')}; }}",
        f"{_FN} float& cgl_at({v}& a, int i) {{ return (&a.x)[i]; }}",
        f"{_FN} float cgl_at(const {v}& a, int i) {{ return (&a.x)[i]; }}",
        f"{_FN} float cgl_dot({v} a, {v} b) {{ return {' + '.join(f'a.{c} * b.{c}' for c in comps)}; }}",
        f"{_FN} float cgl_length({v} a) {{ return sqrtf(cgl_dot(a, a)); }}",
        f"{_FN} {v} cgl_normalize({v} a) {{ return a / cgl_length(a); }}",
    ]
    for name, fn in _UNARY_MATH.items():
        lines.append(f"{_FN} {v} cgl_{name}({v} a) {{ return {make(fn + '(a.{c})')}; }}")
    for name, fn in _BINARY_MATH.items():
        lines.append(f"{_FN} {v} cgl_{name}({v} a, {v} b) {{ return {make(fn + '(a.{c}, b.{c})')}; }}")
    for name, fn in (("max", "fmaxf"), ("min", "fminf")):
        lines.append(f"{_FN} {v} cgl_{name}({v} a, float s) {{ return {make(fn + '(a.{c}, s)')}; }}")
    lines += [
        f"{_FN} {v} cgl_mix({v} a, {v} b, {v} t) {{ return a * (1.0f - t) + b * t; }}",
        f"{_FN} {v} cgl_mix({v} a, {v} b, float t) {{ return a * (1.0f - t) + b * t; }}",
        f"{_FN} {v} cgl_clamp({v} x, {v} lo, {v} hi) {{ return cgl_min(cgl_max(x, lo), hi); }}",
        f"{_FN} {v} cgl_clamp({v} x, float lo, float hi) {{ return cgl_min(cgl_max(x, lo), hi); }}",
    ]
    return lines


def _matrix_preamble(n: int) -> list[str]:
    v = f"float{n}"
    m = f"cgl_mat{n}"
    cols = range(n)
    comps = "xyzw"[:n]
    lines = [
        f"struct {m} {{",
        f"    {v} c[{n}];",
        f"    __host__ __device__ {v}& operator[](int i) {{ return c[i]; }}",
        f"    __host__ __device__ const {v}& operator[](int i) const {{ return c[i]; }}",
        "};",
        f"{_FN} {m} cgl_make_mat{n}({', '.join(f'{v} c{i}' for i in cols)}) {{"
        f" {m} r; {' '.join(f'r.c[{i}] = c{i};' for i in cols)} return r; }}",
        f"{_FN} {v} operator*({m} a, {v} x) {{ return {' + '.join(f'a.c[{i}] * x.{comps[i]}' for i in cols)}; }}",
        f"{_FN} {v} operator*({v} x, {m} a) {{ return make_{v}({', '.join(f'cgl_dot(x, a.c[{i}])' for i in cols)}); }}",
        f"{_FN} {m} operator*({m} a, {m} b) {{ {m} r; {' '.join(f'r.c[{i}] = a * b.c[{i}];' for i in cols)} return r; }}",
    ]
    for op in "+-":
        lines.append(f"{_FN} {m} operator{op}({m} a, {m} b) {{ {m} r; {' '.join(f'r.c[{i}] = a.c[{i}] {op} b.c[{i}];' for i in cols)} return r; }}")
    for op in "*/":
        lines.append(f"{_FN} {m} operator{op}({m} a, float s) {{ {m} r; {' '.join(f'r.c[{i}] = a.c[{i}] {op} s;' for i in cols)} return r; }}")
    lines += [
        f"{_FN} {m} operator*(float s, {m} a) {{ return a * s; }}",
        f"{_FN} {m} operator-({m} a) {{ return a * -1.0f; }}",
        f"{_FN} {m}& operator*=({m}& a, {m} b) {{ a = a * b; return a; }}",
        f"{_FN} {m}& operator*=({m}& a, float s) {{ a = a * s; return a; }}",
        f"{_FN} {m}& operator/=({m}& a, float s) {{ a = a / s; return a; }}",
        f"{_FN} {m}& operator+=({m}& a, {m} b) {{ a = a + b; return a; }}",
        f"{_FN} {m}& operator-=({m}& a, {m} b) {{ a = a - b; return a; }}",
        f"{_FN} {v}& operator*=({v}& x, {m} a) {{ x = x * a; return x; }}",
    ]
    return lines


def _scalar_preamble() -> list[str]:
    lines = [
        f"{_FN} float cgl_dot(float a, float b) {{ return a * b; }}",
        f"{_FN} float cgl_length(float a) {{ return fabsf(a); }}",
        f"{_FN} float cgl_normalize(float a) {{ return a / fabsf(a); }}",
    ]
    for name, fn in _UNARY_MATH.items():
        lines.append(f"{_FN} float cgl_{name}(float a) {{ return {fn}(a); }}")
    for name, fn in _BINARY_MATH.items():
        lines.append(f"{_FN} float cgl_{name}(float a, float b) {{ return {fn}(a, b); }}")
    lines += [
        f"{_FN} int cgl_max(int a, int b) {{ return a > b ? a : b; }}",
        f"{_FN} int cgl_min(int a, int b) {{ return a < b ? a : b; }}",
        f"{_FN} int cgl_abs(int a) {{ return a < 0 ? -a : a; }}",
        f"{_FN} int cgl_clamp(int x, int lo, int hi) {{ return cgl_min(cgl_max(x, lo), hi); }}",
        f"{_FN} float cgl_clamp(float x, float lo, float hi) {{ return fminf(fmaxf(x, lo), hi); }}",
        f"{_FN} float cgl_mix(float a, float b, float t) {{ return a * (1.0f - t) + b * t; }}",
    ]
    return lines


def _build_preamble() -> str:
    lines = ["namespace cgl {", ""]
    lines += _scalar_preamble()
    for n in (2, 3, 4):
        lines.append("")
        lines += _vector_preamble(n)
    lines += [
        "",
        f"{_FN} float3 cgl_cross(float3 a, float3 b) {{",
        "    return make_float3(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);",
        "}",
    ]
    for n in (2, 3, 4):
        lines.append("")
        lines += _matrix_preamble(n)
    lines += ["", "}  // namespace cgl", "", "using namespace cgl;"]
    return "\n".join(lines)


PREAMBLE = _build_preamble()


class CudaEmitter(CLikeEmitter):
    target = "cuda"
    reserved = RESERVED

    def __init__(self, module: ShaderModule, backend: Backend) -> None:
        super().__init__(module, backend)
        self.uses = uniform_uses(module)
        self.uniforms = {g.name: g for g in module.globals if g.qualifier == Qualifier.UNIFORM}

    # ------------------------------------------------------------------ expressions

    def float_lit(self, v: float) -> str:
        text = format_float(v)
        if text.startswith("("):
            return text.replace(".0", ".0f")
        return text + "f"

    def cast_float(self, e: Expr) -> str:
        return f"(float)({self.expr(e)})"

    def expr_prec(self, e):
        if isinstance(e, VarRef) and e.name in COMPUTE_BUILTINS:
            kind, axis = e.name.rsplit("_", 1)
            return f"((int){BUILTIN_SOURCES[kind]}.{axis})", PREC_PRIMARY
        return super().expr_prec(e)

    def call(self, e: Call) -> str:
        if e.callee in self.functions:
            extra = [self.var_name(u) for u in self.uses[e.callee]]
            args = [self.expr(a) for a in e.args] + extra
            return f"{self.function_name(e.callee)}({', '.join(args)})"
        if e.callee == "texture":
            uv = self.expr(e.args[1], PREC_POSTFIX)
            return f"tex2D<float4>({self.expr(e.args[0])}, {uv}.x, {uv}.y)"
        return f"cgl_{e.callee}({', '.join(self.intrinsic_args(e))})"

    def constructor(self, e: ConstructorCall) -> tuple[str, int]:
        t = e.type
        if isinstance(t, ScalarType):
            return f"({self.type_name(t)})({self.expr(e.args[0])})", PREC_UNARY
        if isinstance(t, MatrixType):
            return f"cgl_make_mat{t.cols}({self.args(e.args)})", PREC_POSTFIX
        if len(e.args) == 1 and isinstance(e.args[0].ty, ScalarType):
            return f"cgl_splat{t.dim}({self.scalar_component(e.args[0])})", PREC_POSTFIX
        components: list[str] = []
        for a in e.args:
            if isinstance(a.ty, VectorType):
                base = self.expr(a, PREC_POSTFIX)
                components += [f"{base}.{c}" for c in "xyzw"[: a.ty.dim]]
            else:
                components.append(self.scalar_component(a))
        return f"make_float{t.dim}({', '.join(components)})", PREC_POSTFIX

    def scalar_component(self, a: Expr) -> str:
        return self.cast_float(a) if a.ty == INT else self.expr(a)

    def swizzle(self, e: Swizzle) -> tuple[str, int]:
        base = self.expr(e.base, PREC_POSTFIX)
        if len(e.components) == 1:
            return f"{base}.{e.components}", PREC_POSTFIX
        parts = ", ".join(f"{base}.{c}" for c in e.components)
        return f"make_float{len(e.components)}({parts})", PREC_POSTFIX

    def index(self, e: IndexAccess) -> tuple[str, int]:
        if isinstance(e.base.ty, VectorType):
            return f"cgl_at({self.expr(e.base)}, {self.expr(e.index)})", PREC_POSTFIX
        return super().index(e)

    # ------------------------------------------------------------------ statements

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, Assign) and isinstance(s.target, Swizzle) and len(s.target.components) > 1:
            self.swizzle_assign(s)
            return
        super().stmt(s)

    def swizzle_assign(self, s: Assign) -> None:
        target = s.target
        if any(isinstance(x, Swizzle) and len(x.components) > 1 for x in walk_expr(target.base)):
            raise self.unsupported("assignment through a nested swizzle", node=s)
        base = self.expr(target.base, PREC_POSTFIX)
        vector = isinstance(s.value.ty, VectorType)
        with self.w.block(""):
            self.w.line(f"{self.type_name(s.value.ty)} cgl_swz = {self.expr(s.value)};")
            for i, c in enumerate(target.components):
                source = f"cgl_swz.{'xyzw'[i]}" if vector else "cgl_swz"
                self.w.line(f"{base}.{c} {s.op} {source};")

    def simple_text(self, s: Stmt) -> str:
        if isinstance(s, Assign) and isinstance(s.target, Swizzle) and len(s.target.components) > 1:
            raise self.unsupported("multi-component swizzle assignment in a for header", node=s)
        return super().simple_text(s)

    # ------------------------------------------------------------------ functions

    def param_text(self, p: Param, *, kernel: bool) -> str:
        name = self.var_name(p.name)
        if isinstance(p.type, ArrayType):
            base, dims = array_parts(p.type)
            if kernel or dims[0] is None:
                if len(dims) > 1:
                    raise self.unsupported(f"multi-dimensional pointer parameter {p.name}", "only the outer dimension may be unsized")
                return f"{self.type_name(base)}* {name}"
        return self.declarator(p.type, name)

    def uniform_param(self, g: GlobalDecl) -> str:
        name = self.var_name(g.name)
        if isinstance(g.type, SamplerType):
            return f"cudaTextureObject_t {name}"
        if isinstance(g.type, ArrayType):
            base, dims = array_parts(g.type)
            if len(dims) > 1:
                raise self.unsupported(f"multi-dimensional uniform array {g.name}", "kernel parameters are flat pointers")
            return f"const {self.type_name(base)}* {name}"
        return self.declarator(g.type, name)

    def signature(self, f: FunctionDecl) -> str:
        kernel = f.stage == Stage.COMPUTE
        params = [self.param_text(p, kernel=kernel) for p in f.params]
        params += [self.uniform_param(self.uniforms[u]) for u in self.uses[f.key]]
        qualifier = "__global__" if kernel else "__device__"
        return f"{qualifier} {self.type_name(f.return_type)} {self.function_name(f.key)}({', '.join(params)})"

    def emit(self) -> str:
        m = self.module
        self.w.line(f"// {header_comment(m, 'CUDA')}")
        self.w.line("#include <cuda_runtime.h>")
        self.w.line("#include <math.h>")
        self.w.blank()
        for line in PREAMBLE.splitlines():
            self.w.line(line)
        self.w.blank()
        for s in m.structs:
            with self.w.block(f"struct {self.ident(s.name)}", closer="};"):
                for mem in s.members:
                    self.w.line(f"{self.declarator(mem.type, self.ident(mem.name))};")
            self.w.blank()
        for g in m.globals:
            if g.qualifier == Qualifier.CONST:
                self.w.line(f"__constant__ {self.declarator(g.type, self.var_name(g.name))} = {self.expr(g.init)};")
        self.w.blank()
        for f in m.functions:
            if f.stage != Stage.COMPUTE:
                self.w.line(self.signature(f) + ";")
        self.w.blank()
        for f in m.functions:
            self.function(f)
            self.w.blank()
        return self.w.text()


class CudaBackend(Backend):
    name = "cuda"
    extensions = (".cu",)
    features = {
        "shaders": FeatureSupport(Support.DEGRADED, "vertex and fragment entries become __device__ functions"),
    }

    def map_type(self, t: TypeExpr) -> str:
        match t:
            case ScalarType(kind=k):
                return k.value
            case VectorType(dim=d, element=ScalarKind.FLOAT):
                return f"float{d}"
            case MatrixType(rows=r, cols=c) if r == c:
                return f"cgl_mat{c}"
            case SamplerType():
                return "cudaTextureObject_t"
            case NamedType(name=n):
                return n + "_" if n in RESERVED else n
            case ArrayType():
                base, dims = array_parts(t)
                return self.map_type(base) + "".join(f"[{'' if d is None else d}]" for d in dims)
        raise UnsupportedType(t, self.name)

    def generate(self, module: ShaderModule, *, stem: str | None = None) -> list[OutputUnit]:
        text = CudaEmitter(module, self).emit()
        return [OutputUnit(suggested_filename=f"{stem or module.name}.cu", target=self.name, text=text)]
