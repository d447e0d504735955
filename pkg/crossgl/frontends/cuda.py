"""CUDA importer: `__global__` kernels and `__device__` functions into CrossGL.

Host code is not translated. Host functions and host globals are skipped
with a warning, and so is every kernel launch (`k<<<grid, block>>>(...)`)
found in them. The `cgl` namespace emitted by the CUDA generator is
recognised by name and skipped; its helpers map back to builtins.
"""

from __future__ import annotations

import logging
import re

from ..backends.cuda import RESERVED as CUDA_RESERVED
from ..diagnostics import Diagnostic, warning
from ..errors import UnsupportedConstruct
from ..intrinsics import INTRINSICS
from ..ir import (
    BOOL,
    FLOAT,
    INT,
    VOID,
    ArrayType,
    ConstructorCall,
    Expr,
    FunctionDecl,
    GlobalDecl,
    IndexAccess,
    MatrixType,
    Param,
    Qualifier,
    ShaderModule,
    SourceLocation,
    Stage,
    Stmt,
    StructDecl,
    StructMember,
    TypeExpr,
    VarRef,
    VectorType,
    walk_all_exprs,
)
from ..lexer import Dialect, Token, TokenKind, tokenize
from ..parser import CLikeParser
from .common import builtin_rewriter, map_module_exprs, rename_identifiers, strip_suffix_renamer

log = logging.getLogger("crossgl.frontends.cuda")

IMPORTER = "the CUDA importer"

CUDA_TYPES: dict[str, TypeExpr] = {
    "void": VOID,
    "int": INT,
    "float": FLOAT,
    "bool": BOOL,
    "float2": VectorType(2),
    "float3": VectorType(3),
    "float4": VectorType(4),
    "cgl_mat2": MatrixType(2, 2),
    "cgl_mat3": MatrixType(3, 3),
    "cgl_mat4": MatrixType(4, 4),
}
CAST_TYPES = {"int": INT, "float": FLOAT, "bool": BOOL}
UNSUPPORTED_TYPES = frozenset(("double", "unsigned", "char", "short", "long", "size_t", "cudaTextureObject_t", "half"))

BUILTIN_VARIABLES = {"threadIdx": "thread_id", "blockIdx": "block_id", "blockDim": "block_dim"}

# libm spellings and the generator's `cgl_` helpers, back to builtin names.
MATH_FUNCTIONS = {
    "fmaxf": "max", "fminf": "min", "sqrtf": "sqrt", "floorf": "floor", "sinf": "sin",
    "cosf": "cos", "powf": "pow", "fabsf": "abs", "fabs": "abs",
}
MATH_FUNCTIONS.update({name: name for name in INTRINSICS if name != "texture"})
MATH_FUNCTIONS.update({f"cgl_{name}": name for name in INTRINSICS})

_VECTOR_MAKERS = re.compile(r"^(?:make_float|cgl_splat)([234])$")
_MATRIX_MAKERS = re.compile(r"^cgl_make_mat([234])$")
_TEXTURE_CALL = re.compile(r"^(?:tex\d?D\w*|tex1Dfetch|surf\w+)$")

UNSUPPORTED_CALLS = {
    "__syncthreads": "barriers",
    "__syncwarp": "barriers",
    "__threadfence": "memory fences",
    "atomicAdd": "atomics",
    "atomicSub": "atomics",
    "atomicMax": "atomics",
    "atomicMin": "atomics",
    "atomicExch": "atomics",
    "atomicCAS": "atomics",
    "malloc": "device allocation",
    "printf": "device printf",
}
FUNCTION_QUALIFIERS = frozenset(("__global__", "__device__", "__host__"))
IGNORED_QUALIFIERS = frozenset(("static", "inline", "__forceinline__", "__noinline__", "extern"))

_HEADER = re.compile(r"//\s*Generated by crossgl from (\w+)")


def unsupported(construct: str, reason: str = "", location: SourceLocation | None = None) -> UnsupportedConstruct:
    return UnsupportedConstruct(construct, IMPORTER, reason, location=location)


class CudaParser(CLikeParser):
    """Device-side CUDA C++ on top of the shared C-like grammar."""

    def __init__(self, tokens: list[Token], warnings: list[Diagnostic]) -> None:
        super().__init__(tokens)
        self.warnings = warnings

    # ------------------------------------------------------------------ dialect hooks

    def is_type_start(self, tok: Token) -> bool:
        if tok.text in UNSUPPORTED_TYPES:
            return True
        return tok.kind == TokenKind.KEYWORD and tok.text in CUDA_TYPES

    def parse_base_type(self) -> TypeExpr:
        t = self.tok
        if t.text in UNSUPPORTED_TYPES:
            raise unsupported(f"type {t.text}", "outside the float/int/bool subset", t.location)
        if t.text == "__shared__":
            raise unsupported("__shared__ memory", location=t.location)
        if t.text in CUDA_TYPES:
            self.advance()
            return CUDA_TYPES[t.text]
        return super().parse_base_type()

    def constructor_type(self, tok: Token) -> TypeExpr | None:
        return CAST_TYPES.get(tok.text) if tok.kind == TokenKind.KEYWORD else None

    def parse_prefix_hook(self) -> Expr | None:
        t = self.tok
        if t.kind == TokenKind.PUNCT and t.text == "(" and self.peek(2).text == ")":
            inner = self.peek()
            if inner.kind == TokenKind.KEYWORD and inner.text in CAST_TYPES:
                self.advance()
                self.advance()
                self.advance()
                return ConstructorCall(CAST_TYPES[inner.text], [self.parse_unary()], location=t.location)
        return None

    def parse_primary(self) -> Expr:
        t = self.tok
        if t.kind == TokenKind.IDENTIFIER and _TEXTURE_CALL.match(t.text):
            raise unsupported(f"texture/surface operation {t.text}", location=t.location)
        if t.kind == TokenKind.IDENTIFIER and self.peek().text == "<<<":
            raise unsupported("kernel launch in device code", "dynamic parallelism", t.location)
        return super().parse_primary()

    def make_call(self, name: str, args: list[Expr], loc: SourceLocation) -> Expr:
        if name in UNSUPPORTED_CALLS:
            raise unsupported(f"call to {name}", UNSUPPORTED_CALLS[name], loc)
        if m := _VECTOR_MAKERS.match(name):
            return ConstructorCall(VectorType(int(m.group(1))), args, location=loc)
        if m := _MATRIX_MAKERS.match(name):
            n = int(m.group(1))
            return ConstructorCall(MatrixType(n, n), args, location=loc)
        if name == "cgl_at" and len(args) == 2:
            return IndexAccess(args[0], args[1], location=loc)
        return super().make_call(MATH_FUNCTIONS.get(name, name), args, loc)

    def make_var(self, name: str, loc: SourceLocation) -> Expr:
        if name in ("gridDim", "warpSize"):
            raise unsupported(f"built-in variable {name}", location=loc)
        return super().make_var(name, loc)

    def parse_statement_hook(self) -> Stmt | None:
        t = self.tok
        if t.text == "__shared__":
            raise unsupported("__shared__ memory", location=t.location)
        if t.kind == TokenKind.KEYWORD and t.text in ("do", "switch"):
            raise unsupported(f"'{t.text}' statement", location=t.location)
        return None

    def parse_param(self) -> Param:
        loc = self.tok.location
        while self.accept("const"):
            pass
        base = self.parse_base_type()
        pointer = False
        while self.tok.text in ("*", "__restrict__", "const"):
            if self.advance().text == "*":
                if pointer:
                    raise unsupported("pointer to pointer parameter", location=loc)
                pointer = True
        if self.check("&"):
            raise unsupported("reference parameter", location=self.tok.location)
        name = self.expect_kind(TokenKind.IDENTIFIER, "parameter name")
        ty = self.parse_array_suffix(base)
        if pointer:
            ty = ArrayType(ty, None)
        return Param(name.text, ty, location=loc)

    # ------------------------------------------------------------------ top level

    def skip_balanced(self, opener: str, closer: str) -> list[Token]:
        """Consume a bracketed region starting at `opener`; returns its tokens."""

        self.expect(opener)
        depth = 1
        out: list[Token] = []
        while depth:
            t = self.advance()
            if t.kind == TokenKind.EOF:
                raise self.fail(f"'{closer}'")
            if t.text == opener:
                depth += 1
            elif t.text == closer:
                depth -= 1
            out.append(t)
        return out

    def warn_launches(self, tokens: list[Token]) -> None:
        for a, b in zip(tokens, tokens[1:]):
            if a.kind == TokenKind.IDENTIFIER and b.text == "<<<":
                self.warnings.append(warning(f"kernel launch of {a.text} skipped: host code is not translated", a.location))

    def skip_host_item(self, loc: SourceLocation) -> None:
        seen: list[Token] = []
        while True:
            t = self.tok
            if t.kind == TokenKind.EOF:
                raise self.fail("';' or '{'")
            if t.text == ";":
                self.advance()
                break
            if t.text == "{":
                body = self.skip_balanced("{", "}")
                self.warn_launches(body)
                break
            seen.append(self.advance())
        self.warn_launches(seen)
        name = next((a.text for a, b in zip(seen, seen[1:]) if a.kind == TokenKind.IDENTIFIER and b.text == "("), None)
        what = f"host function {name}" if name is not None else "host declaration"
        self.warnings.append(warning(f"{what} skipped: host code is not translated", loc))

    def parse_unit(self, name: str) -> ShaderModule:
        module = ShaderModule(name)
        while self.tok.kind != TokenKind.EOF:
            self.parse_top(module)
        return module

    def parse_top(self, module: ShaderModule) -> None:
        if self.accept(";"):
            return
        t = self.tok
        loc = t.location
        if t.text == "namespace":
            self.advance()
            ns = self.tok.text if self.tok.kind == TokenKind.IDENTIFIER else "<anonymous>"
            if self.tok.kind == TokenKind.IDENTIFIER:
                self.advance()
            self.skip_balanced("{", "}")
            if ns != "cgl":
                self.warnings.append(warning(f"namespace {ns} skipped", loc))
            return
        if t.text == "using":
            while not self.accept(";"):
                if self.tok.kind == TokenKind.EOF:
                    raise self.fail("';'")
                self.advance()
            return
        if t.text == "template":
            raise unsupported("templates", location=loc)
        if t.text == "struct" and self.peek(2).text == "{":
            module.structs.append(self.parse_struct())
            return
        qualifiers: set[str] = set()
        while self.tok.text in FUNCTION_QUALIFIERS or self.tok.text in IGNORED_QUALIFIERS or self.tok.text in (
            "__constant__",
            "__shared__",
            "const",
        ):
            q = self.advance()
            if q.text == "__shared__":
                raise unsupported("__shared__ memory", location=q.location)
            qualifiers.add(q.text)
        device = qualifiers & {"__global__", "__device__", "__constant__", "const"}
        if not device:
            self.skip_host_item(loc)
            return
        base = self.parse_base_type()
        if self.check("*"):
            raise unsupported("pointer return type", location=self.tok.location)
        name = self.expect_kind(TokenKind.IDENTIFIER, "declaration name")
        if self.check("(", TokenKind.PUNCT):
            params = self.parse_params()
            if self.accept(";"):
                return
            stage = Stage.COMPUTE if "__global__" in qualifiers else None
            body = self.parse_block()
            module.functions.append(FunctionDecl(name.text, params, base, body, stage, location=loc))
            return
        ty = self.parse_array_suffix(base)
        init = self.parse_expr() if self.accept("=") else None
        self.expect(";")
        if init is not None and qualifiers & {"__constant__", "const"}:
            module.globals.append(GlobalDecl(name.text, ty, Qualifier.CONST, init, location=loc))
        elif "__constant__" in qualifiers:
            module.globals.append(GlobalDecl(name.text, ty, Qualifier.UNIFORM, location=loc))
        else:
            raise unsupported(f"mutable device global {name.text}", "device globals must be __constant__", loc)

    def parse_struct(self) -> StructDecl:
        loc = self.expect("struct").location
        name = self.expect_kind(TokenKind.IDENTIFIER, "struct name")
        self.expect("{")
        members: list[StructMember] = []
        while not self.check("}"):
            if self.tok.kind == TokenKind.EOF:
                raise self.fail("'}'")
            mloc = self.tok.location
            base = self.parse_base_type()
            mname = self.expect_kind(TokenKind.IDENTIFIER, "member name")
            members.append(StructMember(mname.text, self.parse_array_suffix(base), location=mloc))
            self.expect(";")
        self.advance()
        self.expect(";")
        return StructDecl(name.text, members, location=loc)


original_name = strip_suffix_renamer(CUDA_RESERVED)


def import_cuda(
    source: str,
    warnings: list[Diagnostic] | None = None,
    *,
    file: str = "<cuda>",
    name: str | None = None,
) -> ShaderModule:
    """Import device code: `__global__` kernels become compute entries, `__device__` functions helpers.

    Raises UnsupportedConstruct for shared memory, barriers, atomics,
    texture/surface operations and kernel launches inside device code.
    """

    sink = warnings if warnings is not None else []
    header = _HEADER.search(source)
    module_name = name or (header.group(1) if header is not None else "Imported")
    module = CudaParser(tokenize(source, file, Dialect.CUDA), sink).parse_unit(module_name)
    for f in module.functions:
        if f.stage == Stage.COMPUTE and f.name == "compute_main":
            f.name = "main"
    map_module_exprs(module, builtin_rewriter(BUILTIN_VARIABLES))
    for f in module.functions:
        for e in walk_all_exprs(f.body):
            if isinstance(e, VarRef) and e.name in BUILTIN_VARIABLES:
                raise unsupported(f"whole-vector use of {e.name}", location=e.location)
    rename_identifiers(module, original_name)
    log.debug("imported %d function(s) from %s", len(module.functions), file)
    return module
