"""Recursive-descent parsing.

CLikeParser holds the grammar shared by CrossGL, GLSL and CUDA (expressions,
statements, declarators); CrossGLParser adds the `shader { ... }` container,
stage blocks and `@attribute(...)` syntax. The GLSL and CUDA importers
subclass CLikeParser in crossgl.frontends.

Policy: fail fast. The first syntax error raises ParseError; there is no recovery.
"""

from __future__ import annotations

from .errors import ParseError
from .ir import (
    ASSIGN_OPS,
    BUILTIN_TYPES,
    Assign,
    Attribute,
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
    GlobalDecl,
    If,
    IndexAccess,
    IntLit,
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
    TernaryConditional,
    TypeExpr,
    UnaryOp,
    VarDecl,
    VarRef,
    While,
    BinaryOp,
    make_array,
)
from .lexer import Dialect, Token, TokenKind, tokenize
from .validate import node_key

# Binary precedence, lowest first. Ternary sits below all of these, unary above.
BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)

_CONSTRUCTIBLE = frozenset(k for k in BUILTIN_TYPES if k not in ("void", "sampler2D"))


class TokenCursor:
    def __init__(self, tokens: list[Token]) -> None:
        if not tokens or tokens[-1].kind != TokenKind.EOF:
            raise ValueError("token stream must end with EOF")
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != TokenKind.EOF:
            self.pos += 1
        return t

    def check(self, text: str, kind: TokenKind | None = None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind != TokenKind.EOF

    def accept(self, text: str) -> Token | None:
        if self.check(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if self.check(text):
            return self.advance()
        raise ParseError(self.tok.location, repr(text), self.tok.describe())

    def expect_kind(self, kind: TokenKind, what: str) -> Token:
        if self.tok.kind == kind:
            return self.advance()
        raise ParseError(self.tok.location, what, self.tok.describe())

    def fail(self, expected: str) -> ParseError:
        return ParseError(self.tok.location, expected, self.tok.describe())


class CLikeParser(TokenCursor):
    """Expressions, statements and declarators common to the C-family dialects."""

    # ------------------------------------------------------------------ dialect hooks

    def is_type_start(self, tok: Token) -> bool:
        return tok.kind == TokenKind.KEYWORD and tok.text in BUILTIN_TYPES

    def parse_base_type(self) -> TypeExpr:
        t = self.tok
        if t.kind == TokenKind.KEYWORD and t.text in BUILTIN_TYPES:
            self.advance()
            return BUILTIN_TYPES[t.text]
        if t.kind == TokenKind.IDENTIFIER:
            self.advance()
            return NamedType(t.text)
        raise self.fail("type")

    def constructor_type(self, tok: Token) -> TypeExpr | None:
        """Type named by `tok` when it is used as `T(args)`."""

        if tok.kind == TokenKind.KEYWORD and tok.text in _CONSTRUCTIBLE:
            return BUILTIN_TYPES[tok.text]
        return None

    def make_call(self, name: str, args: list[Expr], loc: SourceLocation) -> Expr:
        return Call(name, args, location=loc)

    def make_var(self, name: str, loc: SourceLocation) -> Expr:
        return VarRef(name, location=loc)

    def parse_prefix_hook(self) -> Expr | None:
        """Dialect-specific unary forms (casts); None when not applicable."""

        return None

    def parse_statement_hook(self) -> Stmt | None:
        return None

    # ------------------------------------------------------------------ declarators

    def at_declaration(self) -> bool:
        t = self.tok
        nxt = self.peek()
        if t.kind == TokenKind.KEYWORD and t.text == "const":
            return True
        if self.is_type_start(t) and nxt.kind == TokenKind.IDENTIFIER:
            return True
        return t.kind == TokenKind.IDENTIFIER and nxt.kind == TokenKind.IDENTIFIER

    def parse_array_suffix(self, base: TypeExpr) -> TypeExpr:
        dims: list[int | None] = []
        while self.accept("["):
            if self.accept("]"):
                dims.append(None)
                continue
            size_tok = self.expect_kind(TokenKind.INT_LIT, "array size")
            dims.append(parse_int_text(size_tok.text))
            self.expect("]")
        return make_array(base, dims)

    def parse_var_decl(self, *, require_semicolon: bool = True) -> VarDecl:
        loc = self.tok.location
        self.accept("const")
        base = self.parse_base_type()
        name = self.expect_kind(TokenKind.IDENTIFIER, "variable name")
        ty = self.parse_array_suffix(base)
        init = self.parse_expr() if self.accept("=") else None
        if require_semicolon:
            self.expect(";")
        return VarDecl(name.text, ty, init, location=loc)

    def parse_params(self) -> list[Param]:
        self.expect("(")
        params: list[Param] = []
        if self.accept(")"):
            return params
        if self.check("void") and self.peek().text == ")":
            self.advance()
            self.expect(")")
            return params
        while True:
            params.append(self.parse_param())
            if self.accept(")"):
                return params
            self.expect(",")

    def parse_param(self) -> Param:
        loc = self.tok.location
        attrs = self.parse_attributes()
        base = self.parse_base_type()
        name = self.expect_kind(TokenKind.IDENTIFIER, "parameter name")
        return Param(name.text, self.parse_array_suffix(base), attrs, location=loc)

    def parse_attributes(self) -> tuple[Attribute, ...]:
        return ()

    # ------------------------------------------------------------------ statements

    def parse_block(self) -> Block:
        loc = self.expect("{").location
        stmts: list[Stmt] = []
        while not self.check("}"):
            if self.tok.kind == TokenKind.EOF:
                raise self.fail("'}'")
            stmts.append(self.parse_statement())
        self.advance()
        return Block(stmts, location=loc)

    def parse_statement(self) -> Stmt:
        hooked = self.parse_statement_hook()
        if hooked is not None:
            return hooked
        t = self.tok
        loc = t.location
        if t.text == "{" and t.kind == TokenKind.PUNCT:
            return self.parse_block()
        if t.kind == TokenKind.KEYWORD:
            if t.text == "if":
                self.advance()
                self.expect("(")
                cond = self.parse_expr()
                self.expect(")")
                then = self.parse_statement()
                otherwise = self.parse_statement() if self.accept("else") else None
                return If(cond, then, otherwise, location=loc)
            if t.text == "while":
                self.advance()
                self.expect("(")
                cond = self.parse_expr()
                self.expect(")")
                return While(cond, self.parse_statement(), location=loc)
            if t.text == "for":
                return self.parse_for()
            if t.text == "return":
                self.advance()
                value = None if self.check(";") else self.parse_expr()
                self.expect(";")
                return Return(value, location=loc)
            if t.text == "break":
                self.advance()
                self.expect(";")
                return Break(location=loc)
            if t.text == "continue":
                self.advance()
                self.expect(";")
                return Continue(location=loc)
        if self.at_declaration():
            return self.parse_var_decl()
        stmt = self.parse_simple_statement()
        self.expect(";")
        return stmt

    def parse_for(self) -> For:
        loc = self.expect("for").location
        self.expect("(")
        init: Stmt | None = None
        if not self.check(";"):
            init = self.parse_var_decl(require_semicolon=False) if self.at_declaration() else self.parse_simple_statement()
        self.expect(";")
        cond = None if self.check(";") else self.parse_expr()
        self.expect(";")
        step = None if self.check(")") else self.parse_simple_statement()
        self.expect(")")
        return For(init, cond, step, self.parse_statement(), location=loc)

    def parse_simple_statement(self) -> Stmt:
        """Assignment, increment/decrement or bare expression; no trailing ';'."""

        loc = self.tok.location
        if self.check("++") or self.check("--"):
            op = self.advance().text
            target = self.parse_unary()
            return Assign(target, "+=" if op == "++" else "-=", IntLit(1, location=loc), location=loc)
        expr = self.parse_expr()
        t = self.tok
        if t.kind == TokenKind.OPERATOR and t.text in ASSIGN_OPS:
            self.advance()
            return Assign(expr, t.text, self.parse_expr(), location=loc)
        if t.kind == TokenKind.OPERATOR and t.text in ("++", "--"):
            self.advance()
            return Assign(expr, "+=" if t.text == "++" else "-=", IntLit(1, location=t.location), location=loc)
        return ExprStmt(expr, location=loc)

    # ------------------------------------------------------------------ expressions

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        cond = self.parse_binary(0)
        if self.check("?", TokenKind.OPERATOR):
            self.advance()
            then = self.parse_expr()
            self.expect(":")
            otherwise = self.parse_ternary()
            return TernaryConditional(cond, then, otherwise, location=cond.location)
        return cond

    def parse_binary(self, level: int) -> Expr:
        if level == len(BINARY_LEVELS):
            return self.parse_unary()
        ops = BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while self.tok.kind == TokenKind.OPERATOR and self.tok.text in ops:
            op = self.advance().text
            right = self.parse_binary(level + 1)
            left = BinaryOp(op, left, right, location=left.location)
        return left

    def parse_unary(self) -> Expr:
        t = self.tok
        if t.kind == TokenKind.OPERATOR and t.text in ("-", "!"):
            self.advance()
            return UnaryOp(t.text, self.parse_unary(), location=t.location)
        if t.kind == TokenKind.OPERATOR and t.text == "+":
            self.advance()
            return self.parse_unary()
        hooked = self.parse_prefix_hook()
        if hooked is not None:
            return hooked
        return self.parse_postfix(self.parse_primary())

    def parse_postfix(self, expr: Expr) -> Expr:
        while True:
            if self.check(".", TokenKind.PUNCT):
                self.advance()
                name = self.expect_kind(TokenKind.IDENTIFIER, "member or swizzle name")
                expr = MemberOrSwizzle(expr, name.text, location=name.location)
            elif self.check("[", TokenKind.PUNCT):
                loc = self.advance().location
                index = self.parse_expr()
                self.expect("]")
                expr = IndexAccess(expr, index, location=loc)
            else:
                return expr

    def parse_args(self) -> list[Expr]:
        self.expect("(")
        args: list[Expr] = []
        if self.accept(")"):
            return args
        while True:
            args.append(self.parse_expr())
            if self.accept(")"):
                return args
            self.expect(",")

    def parse_primary(self) -> Expr:
        t = self.tok
        loc = t.location
        if t.kind == TokenKind.INT_LIT:
            self.advance()
            return IntLit(parse_int_text(t.text), location=loc)
        if t.kind == TokenKind.FLOAT_LIT:
            self.advance()
            return FloatLit(float(t.text.rstrip("fF")), location=loc)
        if t.kind == TokenKind.KEYWORD and t.text in ("true", "false"):
            self.advance()
            return BoolLit(t.text == "true", location=loc)
        if t.kind == TokenKind.PUNCT and t.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        ctor = self.constructor_type(t)
        if ctor is not None and self.peek().text == "(":
            self.advance()
            return ConstructorCall(ctor, self.parse_args(), location=loc)
        if t.kind == TokenKind.IDENTIFIER:
            self.advance()
            if self.check("(", TokenKind.PUNCT):
                return self.make_call(t.text, self.parse_args(), loc)
            return self.make_var(t.text, loc)
        raise self.fail("expression")


def parse_int_text(text: str) -> int:
    text = text.rstrip("uU")
    if text.lower().startswith("0x"):
        return int(text, 16)
    return int(text, 10)


_STAGE_KEYWORDS = {"vertex": Stage.VERTEX, "fragment": Stage.FRAGMENT, "compute": Stage.COMPUTE}


class CrossGLParser(CLikeParser):
    """Parser for `.cgl` sources: `shader Name { structs, globals, functions, stage blocks }`."""

    def parse_attributes(self) -> tuple[Attribute, ...]:
        attrs: list[Attribute] = []
        while self.check("@", TokenKind.PUNCT):
            self.advance()
            name = self.expect_kind(TokenKind.IDENTIFIER, "attribute name")
            args: list[str | int] = []
            if self.accept("("):
                if not self.accept(")"):
                    while True:
                        a = self.tok
                        if a.kind == TokenKind.INT_LIT:
                            args.append(parse_int_text(a.text))
                        elif a.kind in (TokenKind.IDENTIFIER, TokenKind.KEYWORD):
                            args.append(a.text)
                        else:
                            raise self.fail("attribute argument")
                        self.advance()
                        if self.accept(")"):
                            break
                        self.expect(",")
            attrs.append(Attribute(name.text, tuple(args)))
        return tuple(attrs)

    def parse_module(self) -> ShaderModule:
        loc = self.expect("shader").location
        name = self.expect_kind(TokenKind.IDENTIFIER, "shader name")
        module = ShaderModule(name.text, location=loc)
        self.expect("{")
        while not self.check("}"):
            if self.tok.kind == TokenKind.EOF:
                raise self.fail("'}'")
            self.parse_item(module)
        self.advance()
        if self.tok.kind != TokenKind.EOF:
            raise self.fail("end of input")
        return module

    def parse_item(self, module: ShaderModule) -> None:
        attrs = self.parse_attributes()
        t = self.tok
        if t.kind == TokenKind.KEYWORD and t.text == "struct":
            module.structs.append(self.parse_struct(attrs))
        elif t.kind == TokenKind.KEYWORD and t.text in _STAGE_KEYWORDS:
            self.parse_stage_block(module, attrs)
        elif t.kind == TokenKind.KEYWORD and t.text in ("uniform", "const"):
            _add_global(module, self.parse_global(attrs))
        else:
            self.parse_function_or_global(module, attrs, stage=None)

    def parse_struct(self, attrs: tuple[Attribute, ...]) -> StructDecl:
        loc = self.expect("struct").location
        name = self.expect_kind(TokenKind.IDENTIFIER, "struct name")
        self.expect("{")
        members: list[StructMember] = []
        while not self.check("}"):
            if self.tok.kind == TokenKind.EOF:
                raise self.fail("'}'")
            mloc = self.tok.location
            mattrs = self.parse_attributes()
            base = self.parse_base_type()
            mname = self.expect_kind(TokenKind.IDENTIFIER, "member name")
            members.append(StructMember(mname.text, self.parse_array_suffix(base), mattrs, location=mloc))
            self.expect(";")
        self.advance()
        self.accept(";")
        return StructDecl(name.text, members, attrs, location=loc)

    def parse_global(self, attrs: tuple[Attribute, ...]) -> GlobalDecl:
        t = self.advance()
        qualifier = Qualifier.UNIFORM if t.text == "uniform" else Qualifier.CONST
        base = self.parse_base_type()
        name = self.expect_kind(TokenKind.IDENTIFIER, "global name")
        ty = self.parse_array_suffix(base)
        init = None
        if qualifier == Qualifier.CONST:
            self.expect("=")
            init = self.parse_expr()
        self.expect(";")
        return GlobalDecl(name.text, ty, qualifier, init, attrs, location=t.location)

    def parse_stage_block(self, module: ShaderModule, attrs: tuple[Attribute, ...]) -> None:
        stage = _STAGE_KEYWORDS[self.advance().text]
        self.expect("{")
        while not self.check("}"):
            if self.tok.kind == TokenKind.EOF:
                raise self.fail("'}'")
            inner = attrs + self.parse_attributes()
            if self.tok.kind == TokenKind.KEYWORD and self.tok.text in ("uniform", "const"):
                _add_global(module, self.parse_global(inner))
            else:
                self.parse_function_or_global(module, inner, stage=stage, functions_only=True)
        self.advance()

    def parse_function_or_global(
        self,
        module: ShaderModule,
        attrs: tuple[Attribute, ...],
        *,
        stage: Stage | None,
        functions_only: bool = False,
    ) -> None:
        loc = self.tok.location
        base = self.parse_base_type()
        name = self.expect_kind(TokenKind.IDENTIFIER, "declaration name")
        if self.check("(", TokenKind.PUNCT):
            params = self.parse_params()
            body = self.parse_block()
            module.functions.append(FunctionDecl(name.text, params, base, body, stage, attrs, location=loc))
            return
        if functions_only:
            raise self.fail("'('")
        ty = self.parse_array_suffix(base)
        init = self.parse_expr() if self.accept("=") else None
        self.expect(";")
        _add_global(module, GlobalDecl(name.text, ty, Qualifier.PLAIN, init, attrs, location=loc))


def _add_global(module: ShaderModule, decl: GlobalDecl) -> None:
    """Append a global, merging identical re-declarations hoisted from stage blocks."""

    existing = module.global_decl(decl.name)
    if existing is not None and node_key(existing) == node_key(decl):
        return
    module.globals.append(decl)


def parse_module(tokens: list[Token]) -> ShaderModule:
    return CrossGLParser(tokens).parse_module()


def parse_source(source: str, file: str = "<memory>") -> ShaderModule:
    """tokenize + parse_module for CrossGL text."""

    return parse_module(tokenize(source, file, Dialect.CROSSGL))


def parse_expression(source: str, file: str = "<expr>") -> Expr:
    """Parse a standalone CrossGL expression (used by tests and the `eval` command)."""

    p = CrossGLParser(tokenize(source, file, Dialect.CROSSGL))
    expr = p.parse_expr()
    if p.tok.kind != TokenKind.EOF:
        raise p.fail("end of input")
    return expr

