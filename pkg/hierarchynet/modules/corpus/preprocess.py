"""
Code and summary normalisation applied before tokenization.
"""
import re
from typing import Optional

from hierarchynet.modules.syntax.javaLexer import STR_TOKEN, skip_string_literal
from hierarchynet.utils.errors import EmptyAfterPreprocess, UnterminatedString

ABBREVIATIONS = frozenset(("e.g.", "i.e.", "etc.", "vs.", "cf."))
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")
_WS = re.compile(r"\s+")


def preprocess_code(code: str) -> str:
    """Replace every string literal (text blocks included) with <str>; nothing else changes."""
    out = []
    i = 0
    n = len(code)
    while i < n:
        ch = code[i]
        if code.startswith("//", i):
            j = code.find("\n", i)
            j = n if j < 0 else j
            out.append(code[i:j])
            i = j
        elif code.startswith("/*", i):
            j = code.find("*/", i + 2)
            j = n if j < 0 else j + 2
            out.append(code[i:j])
            i = j
        elif code.startswith('"""', i):
            j = code.find('"""', i + 3)
            if j < 0:
                raise UnterminatedString(i)
            out.append(STR_TOKEN)
            i = j + 3
        elif ch == '"':
            out.append(STR_TOKEN)
            i = skip_string_literal(code, i)
        elif ch == "'":
            j = i + 1
            while j < n and code[j] != "'":
                j += 2 if code[j] == "\\" else 1
            out.append(code[i:j + 1])
            i = j + 1
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def first_sentence(text: str) -> str:
    for match in _SENTENCE_END.finditer(text):
        end = match.end()
        start = text.rfind(" ", 0, end) + 1
        if text[start:end].lower() in ABBREVIATIONS:
            continue
        return text[:end]
    return text


def preprocess_summary(text: str, max_len: Optional[int] = None) -> str:
    """First sentence, lowercased, whitespace collapsed, cut to `max_len` words."""
    collapsed = _WS.sub(" ", text or "").strip()
    summary = first_sentence(collapsed).lower()
    if max_len is not None:
        summary = " ".join(summary.split()[:max_len])
    if not summary.strip():
        raise EmptyAfterPreprocess("summary is empty after preprocessing")
    return summary
