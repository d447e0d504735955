"""GLSL 4.50 generator: one compilation unit per stage, one per compute kernel.

Entry functions are emitted as ordinary functions and driven by a generated
`void main()` that moves stage inputs and outputs between the `in`/`out`
globals and the entry's records. The GLSL importer recognises this shape.
"""

from __future__ import annotations

from ..errors import UnsupportedType
from ..ir import (
    COMPUTE_BUILTINS,
    ArrayType,
    FunctionDecl,
    MatrixType,
    NamedType,
    Qualifier,
    SamplerType,
    ScalarKind,
    ScalarType,
    ShaderModule,
    Stage,
    TypeExpr,
    VarRef,
    VectorType,
    array_parts,
)
from ..lexer import KEYWORDS, Dialect
from .base import (
    PREC_POSTFIX,
    Backend,
    CLikeEmitter,
    OutputUnit,
    clip_position_member,
    header_comment,
    reject_recursion,
    workgroup_size,
)

# Identifiers legal in CrossGL that GLSL reserves.
RESERVED: frozenset[str] = (KEYWORDS[Dialect.GLSL] - KEYWORDS[Dialect.CROSSGL]) | frozenset(
    (
        "input", "output", "sample", "filter", "common", "partition", "active", "attribute",
        "varying", "centroid", "patch", "invariant", "precise", "coherent", "volatile",
        "restrict", "readonly", "writeonly", "subroutine", "noperspective", "smooth",
        "class", "union", "enum", "typedef", "template", "this", "goto", "inline", "noinline",
        "public", "static", "extern", "external", "interface", "long", "short", "half", "fixed",
        "unsigned", "superp", "sizeof", "cast", "namespace", "using", "default", "case",
    )
)

STAGE_EXTENSIONS = {Stage.VERTEX: ".vert", Stage.FRAGMENT: ".frag", Stage.COMPUTE: ".comp"}

BUILTIN_SPELLING = {"thread_id": "gl_LocalInvocationID", "block_id": "gl_WorkGroupID", "block_dim": "gl_WorkGroupSize"}

DEFAULT_LOCAL_SIZE = (64, 1, 1)


def builtin_text(name: str) -> str:
    kind, axis = name.rsplit("_", 1)
    return f"int({BUILTIN_SPELLING[kind]}.{axis})"


class GLSLEmitter(CLikeEmitter):
    target = "glsl"
    reserved = RESERVED

    def expr_prec(self, e):
        if isinstance(e, VarRef) and e.name in COMPUTE_BUILTINS:
            return builtin_text(e.name), PREC_POSTFIX
        return super().expr_prec(e)

    # ------------------------------------------------------------------ shared declarations

    def preamble(self, stage: Stage | None) -> None:
        m = self.module
        self.w.line(f"// {header_comment(m, 'GLSL', stage)}")
        self.w.line("#version 450")
        self.w.blank()
        for s in m.structs:
            with self.w.block(f"struct {self.ident(s.name)}", closer="};"):
                for mem in s.members:
                    self.w.line(f"{self.declarator(mem.type, self.ident(mem.name))};")
            self.w.blank()

    def globals(self, binding: int = 0) -> int:
        """Uniform and const globals; returns the next free buffer binding."""

        for g in self.module.globals:
            name = self.var_name(g.name)
            if g.qualifier == Qualifier.CONST:
                self.w.line(f"const {self.declarator(g.type, name)} = {self.expr(g.init)};")
            elif isinstance(g.type, ArrayType) and g.type.size is None:
                with self.w.block(f"layout(std430, binding = {binding}) buffer cgl_{g.name}", closer="};"):
                    self.w.line(f"{self.declarator(g.type, name)};")
                binding += 1
            else:
                self.w.line(f"uniform {self.declarator(g.type, name)};")
        self.w.blank()
        return binding

    def helpers(self) -> None:
        helpers = self.module.helpers()
        for f in helpers:
            for p in f.params:
                if isinstance(p.type, ArrayType) and array_parts(p.type)[1][0] is None:
                    raise self.unsupported(
                        f"unsized array parameter {p.name} of {f.name}",
                        "GLSL functions take sized arrays only",
                    )
            self.w.line(self.signature(f) + ";")
        self.w.blank()
        for f in helpers:
            self.function(f)
            self.w.blank()

    # ------------------------------------------------------------------ units

    def graphics_unit(self, f: FunctionDecl) -> str:
        self.preamble(f.stage)
        self.globals()
        if f.stage == Stage.VERTEX:
            self.vertex_io(f)
        else:
            self.fragment_io(f)
        self.w.blank()
        self.helpers()
        self.function(f)
        self.w.blank()
        with self.w.block("void main()"):
            if f.stage == Stage.VERTEX:
                self.vertex_main(f)
            else:
                self.fragment_main(f)
        return self.w.text()

    def _record(self, t: TypeExpr):
        return self.structs[t.name] if isinstance(t, NamedType) else None

    def vertex_io(self, f: FunctionDecl) -> None:
        record = self._record(f.params[0].type)
        for i, mem in enumerate(record.members):
            self.w.line(f"layout(location = {i}) in {self.type_name(mem.type)} in_{mem.name};")
        for mem in self._record(f.return_type).members:
            self.w.line(f"out {self.type_name(mem.type)} vs_{mem.name};")

    def vertex_main(self, f: FunctionDecl) -> None:
        param = f.params[0]
        record = self._record(param.type)
        self.w.line(f"{self.type_name(param.type)} stage_in;")
        for mem in record.members:
            self.w.line(f"stage_in.{self.ident(mem.name)} = in_{mem.name};")
        out = self._record(f.return_type)
        self.w.line(f"{self.type_name(f.return_type)} stage_out = {self.function_name(f.key)}(stage_in);")
        clip = clip_position_member(out)
        if clip is not None:
            self.w.line(f"gl_Position = stage_out.{self.ident(clip)};")
        for mem in out.members:
            self.w.line(f"vs_{mem.name} = stage_out.{self.ident(mem.name)};")

    def fragment_io(self, f: FunctionDecl) -> None:
        if f.params:
            p = f.params[0]
            record = self._record(p.type)
            if record is not None:
                for mem in record.members:
                    self.w.line(f"in {self.type_name(mem.type)} vs_{mem.name};")
            else:
                self.w.line(f"in {self.type_name(p.type)} vs_{p.name};")
        out = self._record(f.return_type)
        if out is None:
            self.w.line(f"layout(location = 0) out {self.type_name(f.return_type)} frag_color;")
        else:
            for i, mem in enumerate(out.members):
                self.w.line(f"layout(location = {i}) out {self.type_name(mem.type)} fs_{mem.name};")

    def fragment_main(self, f: FunctionDecl) -> None:
        arg = ""
        if f.params:
            p = f.params[0]
            record = self._record(p.type)
            if record is not None:
                self.w.line(f"{self.type_name(p.type)} stage_in;")
                for mem in record.members:
                    self.w.line(f"stage_in.{self.ident(mem.name)} = vs_{mem.name};")
                arg = "stage_in"
            else:
                arg = f"vs_{p.name}"
        call = f"{self.function_name(f.key)}({arg})"
        out = self._record(f.return_type)
        if out is None:
            self.w.line(f"frag_color = {call};")
            return
        self.w.line(f"{self.type_name(f.return_type)} stage_out = {call};")
        for mem in out.members:
            self.w.line(f"fs_{mem.name} = stage_out.{self.ident(mem.name)};")

    def compute_unit(self, f: FunctionDecl) -> str:
        self.preamble(Stage.COMPUTE)
        x, y, z = workgroup_size(f, DEFAULT_LOCAL_SIZE)
        self.w.line(f"layout(local_size_x = {x}, local_size_y = {y}, local_size_z = {z}) in;")
        self.w.blank()
        binding = self.globals()
        kernel = self.function_name(f.key)
        for p in f.params:
            with self.w.block(f"layout(std430, binding = {binding}) buffer {kernel}_{p.name}", closer="};"):
                self.w.line(f"{self.declarator(p.type, self.var_name(p.name))};")
            binding += 1
        self.w.blank()
        self.helpers()
        self.function(f, signature=f"void {kernel}()")
        self.w.blank()
        with self.w.block("void main()"):
            self.w.line(f"{kernel}();")
        return self.w.text()

    def library_unit(self) -> str:
        self.preamble(None)
        self.globals()
        self.helpers()
        return self.w.text()


class GLSLBackend(Backend):
    name = "glsl"
    extensions = (".vert", ".frag", ".comp", ".glsl")

    def map_type(self, t: TypeExpr) -> str:
        match t:
            case ScalarType(kind=k):
                return k.value
            case VectorType(dim=d, element=ScalarKind.FLOAT):
                return f"vec{d}"
            case MatrixType(rows=r, cols=c):
                return f"mat{r}" if r == c else f"mat{c}x{r}"
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
        stem = stem or module.name
        units: list[OutputUnit] = []
        entries = module.entries()
        kernels = module.entries(Stage.COMPUTE)
        for f in entries:
            emitter = GLSLEmitter(module, self)
            if f.stage == Stage.COMPUTE:
                text = emitter.compute_unit(f)
                filename = f"{stem}_{f.name}.comp" if len(kernels) > 1 else f"{stem}.comp"
            else:
                text = emitter.graphics_unit(f)
                filename = stem + STAGE_EXTENSIONS[f.stage]
            units.append(OutputUnit(suggested_filename=filename, target=self.name, text=text))
        if not entries:
            text = GLSLEmitter(module, self).library_unit()
            units.append(OutputUnit(suggested_filename=f"{stem}.glsl", target=self.name, text=text))
        return units
