"""Tokenizers for CrossGL and the C-like import languages (GLSL, CUDA).

Built on ply.lex. One lexer per dialect is built lazily and cloned per call, so
concurrent tokenize() calls share no mutable state.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from enum import Enum

import ply.lex as lex

from .errors import LexError
from .ir import SourceLocation

log = logging.getLogger("crossgl.lexer")


class TokenKind(str, Enum):
    KEYWORD = "Keyword"
    IDENTIFIER = "Identifier"
    INT_LIT = "IntLit"
    FLOAT_LIT = "FloatLit"
    OPERATOR = "Operator"
    PUNCT = "Punct"
    EOF = "EOF"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    location: SourceLocation

    def is_(self, kind: TokenKind, text: str | None = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)

    def describe(self) -> str:
        if self.kind == TokenKind.EOF:
            return "end of input"
        return f"{self.kind.value} {self.text!r}"


class Dialect(str, Enum):
    CROSSGL = "crossgl"
    GLSL = "glsl"
    CUDA = "cuda"


_TYPE_KEYWORDS = ("void", "int", "float", "bool", "vec2", "vec3", "vec4", "mat2", "mat3", "mat4", "sampler2D")

KEYWORDS: dict[Dialect, frozenset[str]] = {
    Dialect.CROSSGL: frozenset(
        (
            "shader", "struct", "vertex", "fragment", "compute", "uniform", "const",
            "if", "else", "for", "while", "return", "break", "continue", "true", "false",
        )
        + _TYPE_KEYWORDS
    ),
    Dialect.GLSL: frozenset(
        (
            "struct", "uniform", "const", "in", "out", "inout", "layout", "buffer", "precision",
            "highp", "mediump", "lowp", "flat", "smooth", "if", "else", "for", "while", "do",
            "return", "break", "continue", "discard", "switch", "true", "false",
            "uint", "double", "ivec2", "ivec3", "ivec4", "uvec2", "uvec3", "uvec4",
            "bvec2", "bvec3", "bvec4", "samplerCube", "sampler3D", "shared",
        )
        + _TYPE_KEYWORDS
    ),
    Dialect.CUDA: frozenset(
        (
            "__global__", "__device__", "__host__", "__shared__", "__constant__", "__forceinline__",
            "struct", "const", "static", "inline", "unsigned", "namespace", "using", "extern",
            "if", "else", "for", "while", "do", "return", "break", "continue", "switch",
            "true", "false", "void", "int", "float", "bool", "double", "float2", "float3", "float4",
        )
    ),
}

# Longest first: ply tries alternatives left to right.
_CROSSGL_OPERATORS = (
    r"\+\+|--|\+=|-=|\*=|/=|%=|==|!=|<=|>=|&&|\|\||<<|>>|->|[-+*/%<>=!?:&|^~]"
)
_C_OPERATORS = r"<<<|>>>|::|" + _CROSSGL_OPERATORS
_CROSSGL_NUMBER = r"\d+\.\d+(?:[eE][+-]?\d+)?|\d+"
_C_NUMBER = (
    r"(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)[fF]?"
    r"|0[xX][0-9a-fA-F]+[uU]?|\d+[uU]?"
)


def _location(t: lex.LexToken) -> SourceLocation:
    lexer = t.lexer
    return SourceLocation(lexer.filename, lexer.lineno, t.lexpos - lexer.line_start + 1)


def _build(dialect: Dialect) -> lex.Lexer:
    keywords = KEYWORDS[dialect]
    number = _CROSSGL_NUMBER if dialect == Dialect.CROSSGL else _C_NUMBER
    operators = _CROSSGL_OPERATORS if dialect == Dialect.CROSSGL else _C_OPERATORS
    allow_directives = dialect != Dialect.CROSSGL

    class Rules:
        tokens = ("NUMBER", "ID", "OP", "PUNCT")
        t_ignore = " \t\r\f\v"

        def t_newline(self, t):
            r"\n+"
            t.lexer.lineno += len(t.value)
            t.lexer.line_start = t.lexpos + len(t.value)

        def t_block_comment(self, t):
            r"/\*(.|\n)*?\*/"
            newlines = t.value.count("\n")
            if newlines:
                t.lexer.lineno += newlines
                t.lexer.line_start = t.lexpos + t.value.rfind("\n") + 1

        def t_unterminated_comment(self, t):
            r"/\*"
            raise LexError("unterminated block comment", location=_location(t))

        def t_line_comment(self, t):
            r"//[^\n]*"

        def t_directive(self, t):
            r"\#[^\n]*"
            if not allow_directives:
                raise LexError("preprocessor directives are not supported", location=_location(t))
            log.debug("skipping directive %r", t.value)

        @lex.TOKEN(number)
        def t_NUMBER(self, t):
            return t

        def t_ID(self, t):
            r"[A-Za-z_][A-Za-z0-9_]*"
            return t

        @lex.TOKEN(operators)
        def t_OP(self, t):
            return t

        def t_PUNCT(self, t):
            r"[{}()\[\];,.@]"
            return t

        def t_error(self, t):
            raise LexError(f"unrecognized character {t.value[0]!r}", location=_location(t))

    built = lex.lex(module=Rules(), errorlog=lex.NullLogger())
    built.keywords = keywords
    return built


_LEXERS: dict[Dialect, lex.Lexer] = {}
_LOCK = threading.Lock()


def _lexer_for(dialect: Dialect) -> lex.Lexer:
    with _LOCK:
        built = _LEXERS.get(dialect)
        if built is None:
            built = _LEXERS[dialect] = _build(dialect)
        return built.clone()


def _is_float_text(text: str) -> bool:
    if text.lower().startswith("0x"):
        return False
    return any(c in text for c in ".eE") or text[-1] in "fF"


def tokenize(source: str, file: str = "<memory>", dialect: Dialect = Dialect.CROSSGL) -> list[Token]:
    """Return the full token stream, ending in an EOF token.

    Comments and whitespace are skipped; each token's location points at its first
    character (1-based line and column).
    """

    lexer = _lexer_for(dialect)
    lexer.filename = file
    lexer.lineno = 1
    lexer.line_start = 0
    lexer.input(source)

    keywords: frozenset[str] = lexer.keywords
    out: list[Token] = []
    while True:
        t = lexer.token()
        if t is None:
            break
        loc = _location(t)
        if t.type == "NUMBER":
            kind = TokenKind.FLOAT_LIT if _is_float_text(t.value) else TokenKind.INT_LIT
        elif t.type == "ID":
            kind = TokenKind.KEYWORD if t.value in keywords else TokenKind.IDENTIFIER
        elif t.type == "OP":
            kind = TokenKind.OPERATOR
        else:
            kind = TokenKind.PUNCT
        out.append(Token(kind, t.value, loc))

    # EOF sits just past the last character.
    eof_col = len(source) - lexer.line_start + 1
    out.append(Token(TokenKind.EOF, "", SourceLocation(file, lexer.lineno, max(1, eof_col))))
    return out
