"""HLSL (Shader Model 5) generator: one .hlsl unit holding every stage.

CrossGL matrices are column-major with `m[i]` the i-th column. HLSL's
`floatNxN(a, b, ...)` fills rows and `m[i]` is a row, so a CrossGL matrix is
held transposed: constructors and indexing carry over unchanged and products
swap their `mul` operands.
"""

from __future__ import annotations

from ..errors import UnsupportedType
from ..ir import (
    COMPUTE_BUILTINS,
    ArrayType,
    Assign,
    BinaryOp,
    ConstructorCall,
    FunctionDecl,
    MatrixType,
    NamedType,
    Qualifier,
    SamplerType,
    ScalarKind,
    ScalarType,
    ShaderModule,
    Stage,
    StructDecl,
    TypeExpr,
    VarRef,
    VectorType,
    array_parts,
    is_numeric_scalar,
)
from .base import (
    PREC_POSTFIX,
    PREC_PRIMARY,
    Backend,
    CLikeEmitter,
    OutputUnit,
    clip_position_member,
    header_comment,
    reject_recursion,
    workgroup_size,
)

RESERVED = frozenset(
    (
        "in", "out", "inout", "static", "register", "packoffset", "sampler", "texture", "matrix",
        "vector", "line", "point", "triangle", "linear", "centroid", "nointerpolation",
        "noperspective", "sample", "shared", "groupshared", "row_major", "column_major", "cbuffer",
        "tbuffer", "typedef", "half", "double", "uint", "dword", "string", "technique", "pass",
        "compile", "discard", "do", "switch", "case", "default", "precise", "snorm", "unorm",
        "export", "extern", "inline", "volatile", "namespace", "class", "interface", "asm", "auto",
        "catch", "char", "delete", "enum", "explicit", "friend", "goto", "long", "mutable", "new",
        "operator", "private", "protected", "public", "short", "signed", "sizeof", "template",
        "this", "throw", "try", "typename", "union", "unsigned", "using", "virtual", "min16float",
        "float1", "float2", "float3", "float4", "int2", "int3", "int4", "uint2", "uint3", "uint4",
        "float2x2", "float3x3", "float4x4", "bool2", "bool3", "bool4",
    )
)

STAGE_ENTRY = {Stage.VERTEX: "VSMain", Stage.FRAGMENT: "PSMain"}


class HLSLEmitter(CLikeEmitter):
    target = "hlsl"
    reserved = RESERVED
    intrinsic_names = {"mix": "lerp", "texture": "tex2D"}

    def __init__(self, module: ShaderModule, backend: Backend) -> None:
        super().__init__(module, backend)
        kernels = module.entries(Stage.COMPUTE)
        self.entry_names: dict[str, str] = {}
        for f in module.entries():
            if f.stage == Stage.COMPUTE:
                self.entry_names[f.key] = "CSMain" if len(kernels) == 1 else f"CSMain_{f.name}"
            else:
                self.entry_names[f.key] = STAGE_ENTRY[f.stage]
        self.local_size = (1, 1, 1)

    def function_name(self, name: str) -> str:
        return self.entry_names.get(name) or self.ident(name)

    # ------------------------------------------------------------------ expressions

    def expr_prec(self, e):
        if isinstance(e, VarRef) and e.name in COMPUTE_BUILTINS:
            kind, axis = e.name.rsplit("_", 1)
            if kind == "block_dim":
                return str(self.local_size["xyz".index(axis)]), PREC_PRIMARY
            source = "cgl_tid" if kind == "thread_id" else "cgl_gid"
            return f"((int){source}.{axis})", PREC_PRIMARY
        return super().expr_prec(e)

    def binary(self, e: BinaryOp) -> tuple[str, int]:
        lt, rt = e.left.ty, e.right.ty
        if (
            e.op == "*"
            and (isinstance(lt, MatrixType) or isinstance(rt, MatrixType))
            and not is_numeric_scalar(lt)
            and not is_numeric_scalar(rt)
        ):
            # Operands are held transposed.
            return f"mul({self.expr(e.right)}, {self.expr(e.left)})", PREC_POSTFIX
        return super().binary(e)

    def constructor(self, e: ConstructorCall) -> tuple[str, int]:
        if len(e.args) == 1 and (is_numeric_scalar(e.args[0].ty) or isinstance(e.type, ScalarType)):
            return f"(({self.type_name(e.type)})({self.expr(e.args[0])}))", PREC_PRIMARY
        return super().constructor(e)

    def assign_text(self, s: Assign) -> str:
        if s.op == "*=" and isinstance(s.value.ty, MatrixType):
            product = BinaryOp("*", s.target, s.value, ty=s.target.ty)
            return f"{self.expr(s.target)} = {self.binary(product)[0]}"
        return super().assign_text(s)

    # ------------------------------------------------------------------ declarations

    def struct(self, s: StructDecl, role: str | None) -> None:
        clip = clip_position_member(s) if role == "varying" else None
        with self.w.block(f"struct {self.ident(s.name)}", closer="};"):
            for i, mem in enumerate(s.members):
                decl = self.declarator(mem.type, self.ident(mem.name))
                if role == "target":
                    decl += f" : SV_Target{i}"
                elif role is not None:
                    decl += " : SV_Position" if mem.name == clip else f" : TEXCOORD{i}"
                self.w.line(decl + ";")

    def struct_roles(self) -> dict[str, str]:
        roles: dict[str, str] = {}

        def mark(t: TypeExpr, role: str) -> None:
            if isinstance(t, NamedType):
                roles.setdefault(t.name, role)

        for f in self.module.entries():
            if f.stage == Stage.VERTEX:
                mark(f.return_type, "varying")
                for p in f.params:
                    mark(p.type, "attribute")
            elif f.stage == Stage.FRAGMENT:
                mark(f.return_type, "target")
                for p in f.params:
                    mark(p.type, "varying")
        return roles

    def globals(self) -> None:
        m = self.module
        plain = []
        samplers = []
        buffers = []
        for g in m.globals:
            if g.qualifier == Qualifier.CONST:
                continue
            if isinstance(g.type, SamplerType):
                samplers.append(g)
            elif isinstance(g.type, ArrayType) and g.type.size is None:
                buffers.append(g)
            else:
                plain.append(g)
        if plain:
            with self.w.block("cbuffer Globals : register(b0)", closer="};"):
                for g in plain:
                    self.w.line(f"{self.declarator(g.type, self.var_name(g.name))};")
            self.w.blank()
        for i, g in enumerate(samplers):
            self.w.line(f"sampler2D {self.var_name(g.name)} : register(s{i});")
        for i, g in enumerate(buffers):
            self.w.line(f"StructuredBuffer<{self.type_name(g.type)}> {self.var_name(g.name)} : register(t{i});")
        for g in m.globals:
            if g.qualifier == Qualifier.CONST:
                self.w.line(f"static const {self.declarator(g.type, self.var_name(g.name))} = {self.expr(g.init)};")
        self.w.blank()

    def kernel_resources(self, kernels: list[FunctionDecl]) -> None:
        uav = 0
        for n, f in enumerate(kernels, start=1):
            scalars = []
            for p in f.params:
                if isinstance(p.type, ArrayType):
                    base, dims = array_parts(p.type)
                    if len(dims) > 1:
                        raise self.unsupported(f"multi-dimensional kernel parameter {p.name}", "structured buffers are one-dimensional")
                    name = p.name if len(kernels) == 1 else f"{f.name}_{p.name}"
                    self.w.line(f"RWStructuredBuffer<{self.type_name(base)}> {self.ident(name)} : register(u{uav});")
                    uav += 1
                else:
                    scalars.append(p)
            if scalars:
                with self.w.block(f"cbuffer {f.name}Args : register(b{n})", closer="};"):
                    for p in scalars:
                        self.w.line(f"{self.declarator(p.type, f'{f.name}_{p.name}')};")
        if kernels:
            self.w.blank()

    # ------------------------------------------------------------------ functions

    def helper(self, f: FunctionDecl) -> None:
        for p in f.params:
            if isinstance(p.type, ArrayType) and array_parts(p.type)[1][0] is None:
                raise self.unsupported(f"unsized array parameter {p.name} of {f.name}", "HLSL functions take sized arrays only")
        self.function(f)

    def graphics_entry(self, f: FunctionDecl) -> None:
        params = []
        for p in f.params:
            decl = self.declarator(p.type, self.var_name(p.name))
            if not isinstance(p.type, NamedType):
                decl += " : TEXCOORD0"
            params.append(decl)
        suffix = " : SV_Target" if f.stage == Stage.FRAGMENT and not isinstance(f.return_type, NamedType) else ""
        ret = self.type_name(f.return_type)
        self.function(f, signature=f"{ret} {self.function_name(f.key)}({', '.join(params)}){suffix}")

    def kernel(self, f: FunctionDecl, many: bool) -> None:
        self.local_size = workgroup_size(f)
        x, y, z = self.local_size
        self.renames = {}
        for p in f.params:
            if isinstance(p.type, ArrayType) and many:
                self.renames[p.name] = self.ident(f"{f.name}_{p.name}")
        self.w.line(f"[numthreads({x}, {y}, {z})]")
        signature = f"void {self.function_name(f.key)}(uint3 cgl_tid : SV_GroupThreadID, uint3 cgl_gid : SV_GroupID)"
        with self.w.block(signature):
            for p in f.params:
                if not isinstance(p.type, ArrayType):
                    self.w.line(f"{self.declarator(p.type, self.var_name(p.name))} = {f.name}_{p.name};")
            for s in f.body.stmts:
                self.stmt(s)
        self.renames = {}

    def emit(self) -> str:
        m = self.module
        self.w.line(f"// {header_comment(m, 'HLSL')}")
        self.w.blank()
        roles = self.struct_roles()
        for s in m.structs:
            self.struct(s, roles.get(s.name))
            self.w.blank()
        self.globals()
        kernels = m.entries(Stage.COMPUTE)
        self.kernel_resources(kernels)
        helpers = m.helpers()
        for f in helpers:
            self.w.line(self.signature(f) + ";")
        self.w.blank()
        for f in m.functions:
            if f.stage is None:
                self.helper(f)
            elif f.stage == Stage.COMPUTE:
                self.kernel(f, many=len(kernels) > 1)
            else:
                self.graphics_entry(f)
            self.w.blank()
        return self.w.text()


class HLSLBackend(Backend):
    name = "hlsl"
    extensions = (".hlsl",)

    def map_type(self, t: TypeExpr) -> str:
        match t:
            case ScalarType(kind=k):
                return k.value
            case VectorType(dim=d, element=ScalarKind.FLOAT):
                return f"float{d}"
            case MatrixType(rows=r, cols=c):
                return f"float{c}x{r}"
            case SamplerType():
                return "sampler2D"
            case NamedType(name=n):
                return n + "_" if n in RESERVED else n
            case ArrayType():
                base, dims = array_parts(t)
                return self.map_type(base) + "".join(f"[{'' if d is None else d}]" for d in dims)
        raise UnsupportedType(t, self.name)

    def generate(self, module: ShaderModule, *, stem: str | None = None) -> list[OutputUnit]:
        reject_recursion(module, self.name)
        text = HLSLEmitter(module, self).emit()
        return [OutputUnit(suggested_filename=f"{stem or module.name}.hlsl", target=self.name, text=text)]
