"""GLSL importer: single-stage compilation units merged back into one ShaderModule.

Two shapes are understood. Units produced by the GLSL generator drive an
ordinary entry function from a wrapper `void main()`; the wrapper, its
`in_`/`vs_`/`fs_` stage variables and the per-parameter buffer blocks are
folded back into the entry's signature. Hand-written units with loose
`in`/`out` globals are repacked into VertexInput/VertexOutput style records,
pairing a fragment's inputs with the vertex outputs of the same name.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Sequence

from ..backends.glsl import RESERVED as GLSL_RESERVED
from ..diagnostics import Diagnostic, warning
from ..errors import ParseError, UnsupportedConstruct
from ..ir import (
    BUILTIN_TYPES,
    VOID,
    Assign,
    Attribute,
    Block,
    Call,
    Expr,
    ExprStmt,
    FunctionDecl,
    GlobalDecl,
    MemberOrSwizzle,
    NamedType,
    Param,
    Qualifier,
    Return,
    ShaderModule,
    SourceLocation,
    Stage,
    Stmt,
    StructDecl,
    StructMember,
    TypeExpr,
    VarDecl,
    VarRef,
    VectorType,
    walk_all_exprs,
    walk_stmts,
)
from ..lexer import Dialect, Token, TokenKind, tokenize
from ..parser import CLikeParser, parse_int_text
from .common import (
    builtin_rewriter,
    map_module_exprs,
    map_stmt_exprs,
    merge_into,
    rename_identifiers,
    strip_suffix_renamer,
)

log = logging.getLogger("crossgl.frontends.glsl")

IMPORTER = "the GLSL importer"

DEFAULT_LOCAL_SIZE = (64, 1, 1)
BUILTIN_VARIABLES = {"gl_LocalInvocationID": "thread_id", "gl_WorkGroupID": "block_id", "gl_WorkGroupSize": "block_dim"}
GLOBAL_INVOCATION_ID = "gl_GlobalInvocationID"
CLIP_POSITION = "gl_Position"

GEOMETRY_LAYOUTS = frozenset(
    (
        "points", "lines", "lines_adjacency", "triangles", "triangles_adjacency",
        "line_strip", "triangle_strip", "max_vertices", "invocations", "vertices",
    )
)
GEOMETRY_CALLS = frozenset(("EmitVertex", "EndPrimitive", "EmitStreamVertex", "EndStreamPrimitive"))
UNSUPPORTED_TYPES = frozenset(
    (
        "uint", "double", "ivec2", "ivec3", "ivec4", "uvec2", "uvec3", "uvec4",
        "bvec2", "bvec3", "bvec4", "samplerCube", "sampler3D",
    )
)
STORAGE_QUALIFIERS = ("in", "out", "uniform", "buffer", "const", "shared")
IGNORED_QUALIFIERS = frozenset(
    (
        "highp", "mediump", "lowp", "flat", "smooth", "noperspective", "centroid",
        "readonly", "writeonly", "coherent", "restrict", "volatile", "invariant",
    )
)

_HEADER = re.compile(r"//\s*Generated by crossgl from (\w+)")


@dataclass
class StageVariable:
    name: str
    type: TypeExpr
    slot: int | None
    location: SourceLocation


@dataclass
class BufferBlock:
    name: str
    binding: int | None
    members: list[StructMember]
    location: SourceLocation


@dataclass
class GLSLUnit:
    """Declarations of one compilation unit, before stage IO is folded away."""

    stage: Stage | None
    file: str
    structs: list[StructDecl] = field(default_factory=list)
    globals: list[GlobalDecl] = field(default_factory=list)
    inputs: list[StageVariable] = field(default_factory=list)
    outputs: list[StageVariable] = field(default_factory=list)
    buffers: list[BufferBlock] = field(default_factory=list)
    functions: list[FunctionDecl] = field(default_factory=list)
    local_size: tuple[int, int, int] | None = None


def unsupported(construct: str, reason: str = "", location: SourceLocation | None = None) -> UnsupportedConstruct:
    return UnsupportedConstruct(construct, IMPORTER, reason, location=location)


class GLSLParser(CLikeParser):
    """Top-level GLSL declarations on top of the shared C-like grammar."""

    def __init__(self, tokens: list[Token], warnings: list[Diagnostic]) -> None:
        super().__init__(tokens)
        self.warnings = warnings

    # ------------------------------------------------------------------ dialect hooks

    def is_type_start(self, tok: Token) -> bool:
        return tok.kind == TokenKind.KEYWORD and (tok.text in BUILTIN_TYPES or tok.text in UNSUPPORTED_TYPES)

    def parse_base_type(self) -> TypeExpr:
        t = self.tok
        if t.kind == TokenKind.KEYWORD and t.text in UNSUPPORTED_TYPES:
            raise unsupported(f"type {t.text}", "outside the float/int/bool subset", t.location)
        return super().parse_base_type()

    def make_call(self, name: str, args: list[Expr], loc: SourceLocation) -> Expr:
        if name in GEOMETRY_CALLS:
            raise unsupported(f"geometry-stage call {name}", location=loc)
        return super().make_call(name, args, loc)

    def make_var(self, name: str, loc: SourceLocation) -> Expr:
        known = name == CLIP_POSITION or name == GLOBAL_INVOCATION_ID or name in BUILTIN_VARIABLES
        if name.startswith("gl_") and not known:
            raise unsupported(f"built-in variable {name}", location=loc)
        return super().make_var(name, loc)

    def parse_statement_hook(self) -> Stmt | None:
        t = self.tok
        if t.kind == TokenKind.KEYWORD:
            if t.text in ("discard", "do", "switch"):
                raise unsupported(f"'{t.text}' statement", location=t.location)
            while self.tok.text in ("highp", "mediump", "lowp"):
                self.advance()
        return None

    def parse_param(self) -> Param:
        while True:
            t = self.tok
            if t.text in ("out", "inout"):
                raise unsupported(f"'{t.text}' parameter", "functions return results by value", t.location)
            if t.text in ("in", "const") or t.text in IGNORED_QUALIFIERS:
                self.advance()
                continue
            return super().parse_param()

    # ------------------------------------------------------------------ declarations

    def parse_layout(self) -> dict[str, int | None]:
        self.expect("layout")
        self.expect("(")
        out: dict[str, int | None] = {}
        while True:
            t = self.advance()
            if t.kind not in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
                raise ParseError(t.location, "layout qualifier", t.describe())
            if t.text in GEOMETRY_LAYOUTS:
                raise unsupported(f"geometry-stage layout {t.text}", location=t.location)
            value = None
            if self.accept("="):
                value = parse_int_text(self.expect_kind(TokenKind.INT_LIT, "layout value").text)
            out[t.text] = value
            if self.accept(")"):
                return out
            self.expect(",")

    def skip_qualifiers(self) -> list[str]:
        storage: list[str] = []
        while self.tok.text in STORAGE_QUALIFIERS or self.tok.text in IGNORED_QUALIFIERS:
            t = self.advance()
            if t.text == "shared":
                raise unsupported("shared memory", location=t.location)
            if t.text in STORAGE_QUALIFIERS:
                storage.append(t.text)
        return storage

    def parse_unit(self, stage: Stage | None, file: str) -> GLSLUnit:
        unit = GLSLUnit(stage, file)
        while self.tok.kind != TokenKind.EOF:
            self.parse_top(unit)
        return unit

    def parse_top(self, unit: GLSLUnit) -> None:
        if self.accept(";"):
            return
        loc = self.tok.location
        if self.check("precision"):
            while not self.accept(";"):
                if self.tok.kind == TokenKind.EOF:
                    raise self.fail("';'")
                self.advance()
            self.warnings.append(warning("precision statement ignored", loc))
            return
        layout = self.parse_layout() if self.check("layout") else {}
        storage = self.skip_qualifiers()
        if self.check(";") and storage in (["in"], ["out"]):
            self.advance()
            self.layout_declaration(unit, storage[0], layout, loc)
            return
        if self.check("struct"):
            unit.structs.append(self.parse_struct())
            return
        if storage and self.tok.kind == TokenKind.IDENTIFIER and self.peek().text == "{":
            self.parse_block_declaration(unit, storage[-1], layout, loc)
            return
        base = self.parse_base_type()
        name = self.expect_kind(TokenKind.IDENTIFIER, "declaration name")
        if self.check("(", TokenKind.PUNCT):
            if storage:
                raise self.fail("declaration")
            params = self.parse_params()
            if self.accept(";"):
                return
            unit.functions.append(FunctionDecl(name.text, params, base, self.parse_block(), location=loc))
            return
        ty = self.parse_array_suffix(base)
        init = self.parse_expr() if self.accept("=") else None
        self.expect(";")
        if "in" in storage:
            unit.inputs.append(StageVariable(name.text, ty, layout.get("location"), loc))
        elif "out" in storage:
            unit.outputs.append(StageVariable(name.text, ty, layout.get("location"), loc))
        elif "uniform" in storage:
            unit.globals.append(GlobalDecl(name.text, ty, Qualifier.UNIFORM, init, location=loc))
        elif "const" in storage:
            unit.globals.append(GlobalDecl(name.text, ty, Qualifier.CONST, init, location=loc))
        else:
            unit.globals.append(GlobalDecl(name.text, ty, Qualifier.PLAIN, init, location=loc))

    def layout_declaration(self, unit: GLSLUnit, direction: str, layout: dict[str, int | None], loc: SourceLocation) -> None:
        if direction == "in" and any(k.startswith("local_size_") for k in layout):
            unit.local_size = (
                layout.get("local_size_x") or 1,
                layout.get("local_size_y") or 1,
                layout.get("local_size_z") or 1,
            )
            return
        self.warnings.append(warning(f"layout declaration '{direction}' ignored", loc))

    def parse_members(self) -> list[StructMember]:
        self.expect("{")
        members: list[StructMember] = []
        while not self.check("}"):
            if self.tok.kind == TokenKind.EOF:
                raise self.fail("'}'")
            mloc = self.tok.location
            self.skip_qualifiers()
            base = self.parse_base_type()
            mname = self.expect_kind(TokenKind.IDENTIFIER, "member name")
            members.append(StructMember(mname.text, self.parse_array_suffix(base), location=mloc))
            self.expect(";")
        self.advance()
        return members

    def parse_struct(self) -> StructDecl:
        loc = self.expect("struct").location
        name = self.expect_kind(TokenKind.IDENTIFIER, "struct name")
        members = self.parse_members()
        self.expect(";")
        return StructDecl(name.text, members, location=loc)

    def parse_block_declaration(
        self, unit: GLSLUnit, storage: str, layout: dict[str, int | None], loc: SourceLocation
    ) -> None:
        if storage != "buffer":
            raise unsupported(f"{storage} interface block", "declare stage variables and uniforms one by one", loc)
        name = self.expect_kind(TokenKind.IDENTIFIER, "block name")
        members = self.parse_members()
        if self.tok.kind == TokenKind.IDENTIFIER:
            raise unsupported("named buffer block instance", location=self.tok.location)
        self.expect(";")
        unit.buffers.append(BufferBlock(name.text, layout.get("binding"), members, loc))


# --------------------------------------------------------------------------- stage IO folding


def _compute_attributes(unit: GLSLUnit) -> tuple[Attribute, ...]:
    size = unit.local_size or DEFAULT_LOCAL_SIZE
    if size == DEFAULT_LOCAL_SIZE:
        return ()
    return (Attribute("workgroup_size", size),)


def _entry_call(st: Stmt, callees: set[str]) -> str | None:
    """Callee when `st` is the generator's hand-off to the entry function."""

    match st:
        case VarDecl(name="stage_out", init=Call(callee=c)) if c in callees:
            return c
        case Assign(target=VarRef(name="frag_color"), op="=", value=Call(callee=c)) if c in callees:
            return c
        case ExprStmt(expr=Call(callee=c, args=[])) if c in callees:
            return c
    return None


def _is_copy(st: Stmt) -> bool:
    match st:
        case VarDecl(name="stage_in", init=None):
            return True
        case Assign(op="="):
            return not any(isinstance(e, Call) for e in walk_all_exprs(st))
    return False


def find_wrapper(unit: GLSLUnit) -> FunctionDecl | None:
    """The entry function a generated `main` drives, or None for hand-written units."""

    main = next((f for f in unit.functions if f.name == "main"), None)
    if main is None:
        return None
    callees = {f.name for f in unit.functions if f is not main}
    entry: str | None = None
    for st in main.body.stmts:
        called = _entry_call(st, callees)
        if called is not None and entry is None:
            entry = called
        elif not _is_copy(st):
            return None
    if entry is None:
        return None
    return next(f for f in unit.functions if f.name == entry)


def _stage_entry_name(f: FunctionDecl, stage: Stage) -> str:
    return "main" if f.name == f"{stage.value}_main" else f.name


def _fold_wrapper(unit: GLSLUnit, entry: FunctionDecl) -> ShaderModule:
    stage = unit.stage
    part = ShaderModule(entry.name, list(unit.structs), list(unit.globals))
    kernel_blocks: list[BufferBlock] = []
    for block in sorted(unit.buffers, key=lambda b: (b.binding is None, b.binding or 0)):
        if len(block.members) != 1:
            raise unsupported(f"buffer block {block.name} with several members", location=block.location)
        if stage == Stage.COMPUTE and block.name.startswith(entry.name + "_"):
            kernel_blocks.append(block)
        else:
            member = block.members[0]
            part.globals.append(GlobalDecl(member.name, member.type, Qualifier.UNIFORM, location=block.location))
    for f in unit.functions:
        if f.name == "main":
            continue
        if f is entry:
            f.stage = stage
            f.name = _stage_entry_name(f, stage)
            if stage == Stage.COMPUTE:
                f.params = [Param(b.members[0].name, b.members[0].type, location=b.location) for b in kernel_blocks]
                f.attributes = _compute_attributes(unit)
        part.functions.append(f)
    return part


def _io_rewriter(mapping: dict[str, Expr]):
    def rewrite(e: Expr) -> Expr:
        if isinstance(e, VarRef) and e.name in mapping:
            target = mapping[e.name]
            if isinstance(target, MemberOrSwizzle):
                return MemberOrSwizzle(VarRef(target.base.name, location=e.location), target.name, location=e.location)
            return VarRef(target.name, location=e.location)
        return e

    return rewrite


def _member(record: str, name: str) -> MemberOrSwizzle:
    return MemberOrSwizzle(VarRef(record), name)


def _record(name: str, variables: list[StageVariable], location: SourceLocation) -> StructDecl:
    ordered = sorted(enumerate(variables), key=lambda iv: (iv[1].slot is None, iv[1].slot or 0, iv[0]))
    return StructDecl(name, [StructMember(v.name, v.type, location=v.location) for _, v in ordered], location=location)


def _returns_to(body: Block, value: str) -> None:
    for st in walk_stmts(body):
        if isinstance(st, Return) and st.value is None:
            st.value = VarRef(value, location=st.location)
    if not body.stmts or not isinstance(body.stmts[-1], Return):
        body.stmts.append(Return(VarRef(value)))


def _matching_record(module: ShaderModule, variables: list[StageVariable]) -> StructDecl | None:
    """Record a hand-written fragment input can reuse: the vertex output first, never a vertex input."""

    def fits(s: StructDecl) -> bool:
        return all(s.member(v.name) is not None and s.member(v.name).type == v.type for v in variables)

    structs = module.struct_map()
    vertex = module.entries(Stage.VERTEX)
    for f in vertex:
        if isinstance(f.return_type, NamedType):
            s = structs.get(f.return_type.name)
            if s is not None and fits(s):
                return s
    inputs = {p.type.name for f in vertex for p in f.params if isinstance(p.type, NamedType)}
    for s in module.structs:
        if s.name not in inputs and fits(s):
            return s
    return None


def _repack(unit: GLSLUnit, main: FunctionDecl, merged: ShaderModule) -> ShaderModule:
    """Turn a hand-written `void main()` with loose stage variables into an entry function."""

    stage = unit.stage
    if stage is None:
        raise unsupported("main in a .glsl unit", "name the file .vert, .frag or .comp", main.location)
    part = ShaderModule(main.name, list(unit.structs), list(unit.globals))
    body = main.body
    mapping: dict[str, Expr] = {}
    params: list[Param] = []
    return_type: TypeExpr = VOID
    prologue: list[Stmt] = []

    if stage == Stage.VERTEX:
        clip = "clipPosition" if any(v.name == "position" for v in unit.outputs) else "position"
        inputs = _record("VertexInput", unit.inputs, main.location)
        outputs = _record("VertexOutput", unit.outputs, main.location)
        outputs.members.insert(0, StructMember(clip, VectorType(4), location=main.location))
        part.structs += [inputs, outputs]
        mapping.update({v.name: _member("stage_in", v.name) for v in unit.inputs})
        mapping.update({v.name: _member("stage_out", v.name) for v in unit.outputs})
        mapping[CLIP_POSITION] = _member("stage_out", clip)
        params.append(Param("stage_in", NamedType(inputs.name), location=main.location))
        return_type = NamedType(outputs.name)
        prologue.append(VarDecl("stage_out", return_type, location=main.location))
    elif stage == Stage.FRAGMENT:
        if unit.inputs:
            record = _matching_record(merged, unit.inputs)
            if record is None:
                record = _record("FragmentInput", unit.inputs, main.location)
                part.structs.append(record)
            mapping.update({v.name: _member("stage_in", v.name) for v in unit.inputs})
            params.append(Param("stage_in", NamedType(record.name), location=main.location))
        if not unit.outputs:
            raise unsupported("fragment unit without outputs", location=main.location)
        if len(unit.outputs) == 1 and unit.outputs[0].type == VectorType(4):
            out = unit.outputs[0]
            return_type = out.type
            prologue.append(VarDecl(out.name, out.type, location=out.location))
            result = out.name
        else:
            record = _record("FragmentOutput", unit.outputs, main.location)
            part.structs.append(record)
            mapping.update({v.name: _member("stage_out", v.name) for v in unit.outputs})
            return_type = NamedType(record.name)
            prologue.append(VarDecl("stage_out", return_type, location=main.location))
            result = "stage_out"
    else:
        ordered = sorted(unit.buffers, key=lambda b: (b.binding is None, b.binding or 0))
        params = [Param(m.name, m.type, location=m.location) for b in ordered for m in b.members]

    map_stmt_exprs(body, _io_rewriter(mapping))
    body.stmts[:0] = prologue
    if stage == Stage.VERTEX:
        _returns_to(body, "stage_out")
    elif stage == Stage.FRAGMENT:
        _returns_to(body, result)
    attrs = _compute_attributes(unit) if stage == Stage.COMPUTE else ()
    entry = FunctionDecl("main", params, return_type, body, stage, attrs, location=main.location)
    part.functions = [f for f in unit.functions if f is not main] + [entry]
    return part


def assemble_unit(unit: GLSLUnit, merged: ShaderModule) -> ShaderModule:
    entry = find_wrapper(unit)
    if entry is not None:
        log.debug("unit %s: generated wrapper around %s", unit.file, entry.name)
        return _fold_wrapper(unit, entry)
    main = next((f for f in unit.functions if f.name == "main"), None)
    if main is not None:
        log.debug("unit %s: repacking loose stage variables", unit.file)
        return _repack(unit, main, merged)
    if unit.inputs or unit.outputs:
        raise unsupported("stage variables without a main function", location=(unit.inputs + unit.outputs)[0].location)
    part = ShaderModule(unit.file, list(unit.structs), list(unit.globals), list(unit.functions))
    for block in unit.buffers:
        for m in block.members:
            part.globals.append(GlobalDecl(m.name, m.type, Qualifier.UNIFORM, location=block.location))
    return part


# --------------------------------------------------------------------------- names


original_name = strip_suffix_renamer(GLSL_RESERVED)


def _reject_leftover_builtins(module: ShaderModule) -> None:
    for f in module.functions:
        for e in walk_all_exprs(f.body):
            if isinstance(e, VarRef) and e.name.startswith("gl_"):
                raise unsupported(f"use of {e.name} outside a stage entry", location=e.location)


def module_name(sources: Sequence[str], default: str) -> str:
    for text in sources:
        m = _HEADER.search(text)
        if m is not None:
            return m.group(1)
    return default


_STAGE_ORDER = {None: 0, Stage.VERTEX: 1, Stage.FRAGMENT: 2, Stage.COMPUTE: 3}


def parse_glsl_unit(stage: Stage | None, source: str, file: str = "<glsl>", warnings: list[Diagnostic] | None = None) -> GLSLUnit:
    tokens = tokenize(source, file, Dialect.GLSL)
    return GLSLParser(tokens, warnings if warnings is not None else []).parse_unit(stage, file)


def import_glsl(
    units: Sequence[tuple[Stage | None, str] | tuple[Stage | None, str, str]],
    warnings: list[Diagnostic] | None = None,
    *,
    name: str | None = None,
) -> ShaderModule:
    """Merge single-stage GLSL units (stage, source[, file]) into one module.

    Raises UnsupportedConstruct for anything outside the importable subset:
    geometry stages, interface blocks, non-float vector types, `out`
    parameters. Skipped declarations are reported through `warnings`.
    """

    sink = warnings if warnings is not None else []
    parsed: list[GLSLUnit] = []
    for i, unit in enumerate(units):
        stage, source = unit[0], unit[1]
        file = unit[2] if len(unit) > 2 else f"<glsl:{i}>"
        parsed.append(parse_glsl_unit(stage, source, file, sink))
    parsed.sort(key=lambda u: _STAGE_ORDER[u.stage])

    module = ShaderModule(name or module_name([u[1] for u in units], "Imported"))
    for unit in parsed:
        part = assemble_unit(unit, module)
        merge_into(module, part, "GLSL")
    map_module_exprs(module, builtin_rewriter(BUILTIN_VARIABLES, GLOBAL_INVOCATION_ID))
    _reject_leftover_builtins(module)
    rename_identifiers(module, original_name)
    log.debug("imported %d GLSL unit(s) into %s", len(parsed), module.name)
    return module
