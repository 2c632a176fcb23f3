"""
Java Lexer
Turns method source into a flat token list; comments and whitespace are dropped.
"""
from dataclasses import dataclass
from typing import List, Tuple

from hierarchynet.utils.errors import JavaSyntaxError, UnterminatedString

STR_TOKEN = "<str>"

KEYWORDS = frozenset((
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class",
    "const", "continue", "default", "do", "double", "else", "enum", "extends", "final",
    "finally", "float", "for", "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "package", "private", "protected", "public",
    "return", "short", "static", "strictfp", "super", "switch", "synchronized", "this",
    "throw", "throws", "transient", "try", "void", "volatile", "while",
    "true", "false", "null",
))

# Longest first; the scan takes the first operator that matches.
OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "?", ":", "&", "|", "^",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
)


@dataclass(frozen=True)
class Token:
    kind: str       # identifier | keyword | integer | float | string | char | op
    text: str
    start: int
    end: int

    @property
    def span(self):
        return (self.start, self.end)


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def skip_string_literal(source: str, pos: int) -> int:
    """Return the offset just past the string literal that opens at `pos`."""
    i = pos + 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\\":
            i += 2
            continue
        if ch == '"':
            return i + 1
        if ch == "\n":
            break
        i += 1
    raise UnterminatedString(pos)


def _scan_number(source: str, pos: int) -> Tuple[str, int]:
    n = len(source)
    i = pos
    kind = "integer"
    if source.startswith(("0x", "0X"), pos):
        i += 2
        while i < n and (source[i] in "0123456789abcdefABCDEF_"):
            i += 1
    elif source.startswith(("0b", "0B"), pos):
        i += 2
        while i < n and source[i] in "01_":
            i += 1
    else:
        while i < n and (source[i].isdigit() or source[i] == "_"):
            i += 1
        if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
            kind = "float"
            i += 1
            while i < n and (source[i].isdigit() or source[i] == "_"):
                i += 1
        if i < n and source[i] in "eE":
            j = i + 1
            if j < n and source[j] in "+-":
                j += 1
            if j < n and source[j].isdigit():
                kind = "float"
                i = j
                while i < n and source[i].isdigit():
                    i += 1
    if i < n and source[i] in "lL":
        i += 1
    elif i < n and source[i] in "fFdD":
        kind = "float"
        i += 1
    return kind, i


def tokenize(source: str) -> List[Token]:
    """
    Lex Java source. String literals (and the `<str>` placeholder left by
    preprocessing) become a single `string` token whose text is `<str>`.
    """
    tokens: List[Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if source.startswith("//", i):
            nl = source.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if source.startswith("/*", i):
            close = source.find("*/", i + 2)
            if close < 0:
                raise JavaSyntaxError((i, n), "unterminated comment")
            i = close + 2
            continue
        if source.startswith(STR_TOKEN, i):
            tokens.append(Token("string", STR_TOKEN, i, i + len(STR_TOKEN)))
            i += len(STR_TOKEN)
            continue
        if ch == '"':
            end = skip_string_literal(source, i)
            tokens.append(Token("string", STR_TOKEN, i, end))
            i = end
            continue
        if ch == "'":
            j = i + 1
            while j < n and source[j] != "'":
                j += 2 if source[j] == "\\" else 1
            if j >= n:
                raise JavaSyntaxError((i, n), "unterminated character literal")
            tokens.append(Token("char", source[i:j + 1], i, j + 1))
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            if ch == ".":
                kind, end = _scan_number(source, i + 1)
                kind = "float"
            else:
                kind, end = _scan_number(source, i)
            tokens.append(Token(kind, source[i:end], i, end))
            i = end
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_part(source[j]):
                j += 1
            word = source[i:j]
            tokens.append(Token("keyword" if word in KEYWORDS else "identifier", word, i, j))
            i = j
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, i, i + len(op)))
                i += len(op)
                break
        else:
            raise JavaSyntaxError((i, i + 1), f"unexpected character {ch!r}")
    return tokens
