"""Metal Shading Language generator: one .metal unit.

Metal has no global uniforms, so every uniform an entry point reads
(directly or through helpers) becomes a bound parameter of that entry, and
helpers receive the uniforms they need as extra trailing parameters.
"""

from __future__ import annotations

from ..errors import UnsupportedType
from ..ir import (
    COMPUTE_BUILTINS,
    ArrayType,
    Call,
    FunctionDecl,
    GlobalDecl,
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
    contains_sampler,
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
    uniform_uses,
)

RESERVED = frozenset(
    (
        "vertex", "fragment", "kernel", "constant", "device", "thread", "threadgroup", "sampler",
        "texture", "half", "uint", "ushort", "uchar", "char", "short", "long", "double", "size_t",
        "ptrdiff_t", "atomic", "using", "namespace", "template", "typename", "class", "union",
        "enum", "typedef", "static", "extern", "inline", "auto", "this", "new", "delete",
        "operator", "private", "protected", "public", "virtual", "friend", "switch", "case",
        "default", "do", "goto", "sizeof", "signed", "unsigned", "volatile", "mutable",
        "explicit", "register", "float2", "float3", "float4", "float2x2", "float3x3", "float4x4",
        "int2", "int3", "int4", "uint2", "uint3", "uint4", "discard_fragment", "metal",
    )
)

BUILTIN_PARAMS = (
    ("thread_id", "cgl_tid", "thread_position_in_threadgroup"),
    ("block_id", "cgl_gid", "threadgroup_position_in_grid"),
    ("block_dim", "cgl_bdim", "threads_per_threadgroup"),
)


class MetalEmitter(CLikeEmitter):
    target = "metal"
    reserved = RESERVED

    def __init__(self, module: ShaderModule, backend: Backend) -> None:
        super().__init__(module, backend)
        self.uses = uniform_uses(module)
        self.uniforms = {g.name: g for g in module.globals if g.qualifier == Qualifier.UNIFORM}
        buffers = [g.name for g in self.uniforms.values() if not isinstance(g.type, SamplerType)]
        textures = [g.name for g in self.uniforms.values() if isinstance(g.type, SamplerType)]
        self.buffer_index = {name: i for i, name in enumerate(buffers)}
        self.texture_index = {name: i for i, name in enumerate(textures)}

    # ------------------------------------------------------------------ expressions

    def expr_prec(self, e):
        if isinstance(e, VarRef) and e.name in COMPUTE_BUILTINS:
            kind, axis = e.name.rsplit("_", 1)
            source = next(var for k, var, _ in BUILTIN_PARAMS if k == kind)
            return f"((int){source}.{axis})", PREC_PRIMARY
        return super().expr_prec(e)

    def call(self, e: Call) -> str:
        if e.callee in self.functions:
            extra = [self.var_name(u) for u in self.uses[e.callee]]
            args = [self.expr(a) for a in e.args] + extra
            return f"{self.function_name(e.callee)}({', '.join(args)})"
        if e.callee == "texture":
            return f"{self.expr(e.args[0], PREC_POSTFIX)}.sample(cgl_sampler, {self.expr(e.args[1])})"
        return f"{e.callee}({', '.join(self.intrinsic_args(e, splat=True))})"

    # ------------------------------------------------------------------ declarations

    def uniform_param(self, g: GlobalDecl, *, bound: bool) -> str:
        name = self.var_name(g.name)
        if isinstance(g.type, SamplerType):
            text = f"texture2d<float> {name}"
            return text + (f" [[texture({self.texture_index[g.name]})]]" if bound else "")
        if isinstance(g.type, ArrayType):
            base, dims = array_parts(g.type)
            if len(dims) > 1:
                raise self.unsupported(f"multi-dimensional uniform array {g.name}", "buffers are one-dimensional")
            text = f"constant {self.type_name(base)}* {name}"
        else:
            text = f"constant {self.type_name(g.type)}& {name}"
        return text + (f" [[buffer({self.buffer_index[g.name]})]]" if bound else "")

    def struct(self, s: StructDecl, role: str | None) -> None:
        clip = clip_position_member(s) if role == "varying" else None
        with self.w.block(f"struct {self.ident(s.name)}", closer="};"):
            for i, mem in enumerate(s.members):
                decl = self.declarator(mem.type, self.ident(mem.name))
                if role == "attribute":
                    decl += f" [[attribute({i})]]"
                elif role == "target":
                    decl += f" [[color({i})]]"
                elif mem.name == clip:
                    decl += " [[position]]"
                self.w.line(decl + ";")

    def struct_roles(self) -> dict[str, str]:
        roles: dict[str, str] = {}
        for f in self.module.entries():
            if f.stage == Stage.VERTEX:
                pairs = [(f.return_type, "varying")] + [(p.type, "attribute") for p in f.params]
            elif f.stage == Stage.FRAGMENT:
                pairs = [(f.return_type, "target")] + [(p.type, "varying") for p in f.params]
            else:
                continue
            for t, role in pairs:
                if isinstance(t, NamedType):
                    roles.setdefault(t.name, role)
        return roles

    # ------------------------------------------------------------------ functions

    def helper_signature(self, f: FunctionDecl) -> str:
        for p in f.params:
            if isinstance(p.type, ArrayType) and array_parts(p.type)[1][0] is None:
                raise self.unsupported(f"unsized array parameter {p.name} of {f.name}", "Metal functions take sized arrays only")
        params = [self.declarator(p.type, self.var_name(p.name)) for p in f.params]
        params += [self.uniform_param(self.uniforms[u], bound=False) for u in self.uses[f.key]]
        ret = self.type_name(f.return_type)
        return f"{ret} {self.function_name(f.key)}({', '.join(params)})"

    def stage_in_struct(self, f: FunctionDecl) -> str | None:
        """Record synthesised for a fragment entry taking a bare float or vector."""

        if f.stage != Stage.FRAGMENT or not f.params or isinstance(f.params[0].type, NamedType):
            return None
        return f"{self.function_name(f.key)}_in"

    def graphics_entry(self, f: FunctionDecl) -> None:
        params: list[str] = []
        prelude: list[str] = []
        synthesized = self.stage_in_struct(f)
        if synthesized is not None:
            p = f.params[0]
            params.append(f"{synthesized} cgl_in [[stage_in]]")
            prelude.append(f"{self.declarator(p.type, self.var_name(p.name))} = cgl_in.{self.var_name(p.name)};")
        else:
            params += [f"{self.declarator(p.type, self.var_name(p.name))} [[stage_in]]" for p in f.params]
        params += [self.uniform_param(self.uniforms[u], bound=True) for u in self.uses[f.key]]
        ret = self.type_name(f.return_type)
        with self.w.block(f"{f.stage.value} {ret} {self.function_name(f.key)}({', '.join(params)})"):
            for line in prelude:
                self.w.line(line)
            for s in f.body.stmts:
                self.stmt(s)

    def kernel(self, f: FunctionDecl) -> None:
        params: list[str] = []
        prelude: list[str] = []
        slot = len(self.buffer_index)
        for p in f.params:
            name = self.var_name(p.name)
            if isinstance(p.type, ArrayType):
                base, dims = array_parts(p.type)
                if len(dims) > 1:
                    raise self.unsupported(f"multi-dimensional kernel parameter {p.name}", "buffers are one-dimensional")
                params.append(f"device {self.type_name(base)}* {name} [[buffer({slot})]]")
            else:
                params.append(f"constant {self.type_name(p.type)}& {name}_arg [[buffer({slot})]]")
                prelude.append(f"{self.declarator(p.type, name)} = {name}_arg;")
            slot += 1
        params += [self.uniform_param(self.uniforms[u], bound=True) for u in self.uses[f.key]]
        params += [f"uint3 {var} [[{attr}]]" for _, var, attr in BUILTIN_PARAMS]
        with self.w.block(f"kernel void {self.function_name(f.key)}({', '.join(params)})"):
            for line in prelude:
                self.w.line(line)
            for s in f.body.stmts:
                self.stmt(s)

    def emit(self) -> str:
        m = self.module
        self.w.line(f"// {header_comment(m, 'Metal')}")
        self.w.line("#include <metal_stdlib>")
        self.w.line("using namespace metal;")
        self.w.blank()
        if any(contains_sampler(g.type) for g in m.globals):
            self.w.line("constexpr sampler cgl_sampler(filter::linear, address::repeat);")
            self.w.blank()
        roles = self.struct_roles()
        for s in m.structs:
            self.struct(s, roles.get(s.name))
            self.w.blank()
        for f in m.entries(Stage.FRAGMENT):
            synthesized = self.stage_in_struct(f)
            if synthesized is not None:
                p = f.params[0]
                with self.w.block(f"struct {synthesized}", closer="};"):
                    self.w.line(f"{self.declarator(p.type, self.var_name(p.name))} [[user(locn0)]];")
                self.w.blank()
        for g in m.globals:
            if g.qualifier == Qualifier.CONST:
                self.w.line(f"constant {self.declarator(g.type, self.var_name(g.name))} = {self.expr(g.init)};")
        self.w.blank()
        helpers = m.helpers()
        for f in helpers:
            self.w.line(self.helper_signature(f) + ";")
        self.w.blank()
        for f in m.functions:
            if f.stage is None:
                self.function(f, signature=self.helper_signature(f))
            elif f.stage == Stage.COMPUTE:
                self.kernel(f)
            else:
                self.graphics_entry(f)
            self.w.blank()
        return self.w.text()


class MetalBackend(Backend):
    name = "metal"
    extensions = (".metal",)

    def map_type(self, t: TypeExpr) -> str:
        match t:
            case ScalarType(kind=k):
                return k.value
            case VectorType(dim=d, element=ScalarKind.FLOAT):
                return f"float{d}"
            case MatrixType(rows=r, cols=c):
                return f"float{c}x{r}"
            case SamplerType():
                return "texture2d<float>"
            case NamedType(name=n):
                return n + "_" if n in RESERVED else n
            case ArrayType():
                base, dims = array_parts(t)
                return self.map_type(base) + "".join(f"[{'' if d is None else d}]" for d in dims)
        raise UnsupportedType(t, self.name)

    def generate(self, module: ShaderModule, *, stem: str | None = None) -> list[OutputUnit]:
        reject_recursion(module, self.name)
        text = MetalEmitter(module, self).emit()
        return [OutputUnit(suggested_filename=f"{stem or module.name}.metal", target=self.name, text=text)]
