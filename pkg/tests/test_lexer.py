from __future__ import annotations

import pytest

from crossgl.errors import LexError
from crossgl.lexer import Dialect, TokenKind, tokenize


def kinds(source: str, dialect: Dialect = Dialect.CROSSGL) -> list[tuple[TokenKind, str]]:
    return [(t.kind, t.text) for t in tokenize(source, "t.cgl", dialect)]


def test_declaration_tokens():
    assert kinds("vec3 a = 1.5;") == [
        (TokenKind.KEYWORD, "vec3"),
        (TokenKind.IDENTIFIER, "a"),
        (TokenKind.OPERATOR, "="),
        (TokenKind.FLOAT_LIT, "1.5"),
        (TokenKind.PUNCT, ";"),
        (TokenKind.EOF, ""),
    ]


def test_int_and_float_literals_are_distinguished():
    toks = tokenize("42 4.0", "t.cgl")
    assert [t.kind for t in toks[:2]] == [TokenKind.INT_LIT, TokenKind.FLOAT_LIT]


def test_longest_operator_wins():
    texts = [t.text for t in tokenize("a += b && c <= d ++", "t.cgl")[:-1]]
    assert texts == ["a", "+=", "b", "&&", "c", "<=", "d", "++"]


def test_comments_are_skipped_and_locations_track_lines():
    toks = tokenize("// header\n/* block\n comment */ float x;", "t.cgl")
    first = toks[0]
    assert first.text == "float"
    assert (first.location.line, first.location.column) == (3, 13)


def test_locations_are_one_based():
    toks = tokenize("  shader", "t.cgl")
    assert (toks[0].location.line, toks[0].location.column) == (1, 3)


def test_eof_token_is_last():
    toks = tokenize("", "t.cgl")
    assert len(toks) == 1 and toks[0].kind == TokenKind.EOF


def test_unknown_character_is_a_lex_error():
    with pytest.raises(LexError) as info:
        tokenize("float $x;", "t.cgl")
    assert info.value.location.column == 7


def test_unterminated_block_comment():
    with pytest.raises(LexError, match="unterminated"):
        tokenize("float x; /* never closed", "t.cgl")


def test_directives_rejected_in_crossgl_but_skipped_in_glsl():
    with pytest.raises(LexError):
        tokenize("#version 450\n", "t.cgl")
    toks = tokenize("#version 450\nfloat x;", "t.glsl", Dialect.GLSL)
    assert toks[0].text == "float"
    assert toks[0].location.line == 2


def test_dialect_keywords_differ():
    assert kinds("layout", Dialect.GLSL)[0][0] == TokenKind.KEYWORD
    assert kinds("layout")[0][0] == TokenKind.IDENTIFIER
    assert kinds("__global__", Dialect.CUDA)[0][0] == TokenKind.KEYWORD


def test_cuda_float_suffix_and_hex():
    toks = tokenize("1.0f 0x10 2", "k.cu", Dialect.CUDA)
    assert [t.kind for t in toks[:3]] == [TokenKind.FLOAT_LIT, TokenKind.INT_LIT, TokenKind.INT_LIT]
