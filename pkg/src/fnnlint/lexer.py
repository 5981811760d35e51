"""Tokenizer for the subset of Python that model-building scripts use.

Produces a flat token stream with synthetic ``Newline``/``Indent``/``Dedent``
tokens. Newlines inside brackets and after a backslash continuation are
joined, comments and blank lines are dropped.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import LexError


class Tok(str, enum.Enum):
    IDENT = "Ident"
    INT = "Int"
    FLOAT = "Float"
    STRING = "String"
    BOOL = "Bool"
    NONE = "None"
    PUNCT = "Punct"
    NEWLINE = "Newline"
    INDENT = "Indent"
    DEDENT = "Dedent"
    EOF = "EOF"


@dataclass(frozen=True)
class SourceToken:
    kind: Tok
    text: str
    line: int
    col: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.line, self.col)

    def is_punct(self, text: str) -> bool:
        return self.kind is Tok.PUNCT and self.text == text

    def is_ident(self, text: str | None = None) -> bool:
        return self.kind is Tok.IDENT and (text is None or self.text == text)

    def __repr__(self) -> str:
        return f"{self.kind.value}({self.text!r}@{self.line}:{self.col})"


_NUMBER = re.compile(
    r"""
    0[xX](?:_?[0-9a-fA-F])+
  | 0[oO](?:_?[0-7])+
  | 0[bB](?:_?[01])+
  | (?P<float>
        (?:[0-9](?:_?[0-9])*)?\.[0-9](?:_?[0-9])*(?:[eE][+-]?[0-9](?:_?[0-9])*)?[jJ]?
      | [0-9](?:_?[0-9])*\.(?:[eE][+-]?[0-9](?:_?[0-9])*)?[jJ]?
      | [0-9](?:_?[0-9])*[eE][+-]?[0-9](?:_?[0-9])*[jJ]?
      | [0-9](?:_?[0-9])*[jJ]
    )
  | [0-9](?:_?[0-9])*
    """,
    re.VERBOSE,
)
_IDENT = re.compile(r"[^\W\d]\w*", re.UNICODE)
_STRING_PREFIX = re.compile(r"(?i:rb|br|fr|rf|r|b|f|u)?(?='|\")")

# longest first so that maximal munch works with a simple scan
_PUNCTS = sorted(
    """
    ( ) [ ] { } , : ; . ... @ = -> := == != < > <= >= + - * / // % ** << >> & | ^ ~
    += -= *= /= //= %= **= <<= >>= &= |= ^= @=
    """.split(),
    key=len,
    reverse=True,
)
_OPENERS = {"(": ")", "[": "]", "{": "}"}


def _scan_string(source: str, pos: int, line: int, col: int) -> tuple[int, int, int]:
    """Return the end offset and the line/col after the string starting at ``pos``."""
    quote = source[pos]
    triple = source.startswith(quote * 3, pos)
    delim = quote * 3 if triple else quote
    i = pos + len(delim)
    cur_line, cur_col = line, col + len(delim)
    while i < len(source):
        ch = source[i]
        if source.startswith(delim, i):
            return i + len(delim), cur_line, cur_col + len(delim)
        if ch == "\\" and i + 1 < len(source):
            if source[i + 1] == "\n":
                cur_line, cur_col = cur_line + 1, 1
            else:
                cur_col += 2
            i += 2
            continue
        if ch == "\n":
            if not triple:
                break
            cur_line, cur_col = cur_line + 1, 1
        else:
            cur_col += 1
        i += 1
    raise LexError(line, col, "unterminated string literal")


def tokenize(source: str) -> list[SourceToken]:
    tokens: list[SourceToken] = []
    indents = [0]
    depth: list[str] = []
    pos = 0
    line = 1
    col = 1
    at_line_start = True
    n = len(source)

    while pos < n:
        if at_line_start and not depth:
            # measure indentation; skip blank and comment-only lines entirely
            width = 0
            p = pos
            while p < n and source[p] in " \t\f":
                width = (width // 8 + 1) * 8 if source[p] == "\t" else width + 1
                p += 1
            if p >= n:
                pos = p
                break
            if source[p] in "\r\n#":
                while p < n and source[p] != "\n":
                    p += 1
                pos = p + 1
                line += 1
                col = 1
                continue
            if source[p] == "\\" and source.startswith("\\\n", p):
                pos = p + 2
                line += 1
                col = 1
                continue
            col += p - pos
            pos = p
            if width > indents[-1]:
                indents.append(width)
                tokens.append(SourceToken(Tok.INDENT, "", line, col))
            else:
                while width < indents[-1]:
                    indents.pop()
                    tokens.append(SourceToken(Tok.DEDENT, "", line, col))
                if width != indents[-1]:
                    raise LexError(line, col, "unindent does not match any outer indentation level")
            at_line_start = False

        ch = source[pos]
        if ch in " \t\f\r":
            pos += 1
            col += 1
            continue
        if ch == "#":
            while pos < n and source[pos] != "\n":
                pos += 1
            continue
        if ch == "\\":
            if source.startswith("\\\n", pos) or source.startswith("\\\r\n", pos):
                pos = source.index("\n", pos) + 1
                line += 1
                col = 1
                continue
            raise LexError(line, col, "unexpected character after line continuation")
        if ch == "\n":
            if not depth:
                tokens.append(SourceToken(Tok.NEWLINE, "\n", line, col))
                at_line_start = True
            pos += 1
            line += 1
            col = 1
            continue

        m = _STRING_PREFIX.match(source, pos)
        if m is not None and pos + len(m.group(0)) < n:
            start_line, start_col = line, col
            quote_pos = pos + len(m.group(0))
            end, line, col = _scan_string(source, quote_pos, line, col + len(m.group(0)))
            tokens.append(SourceToken(Tok.STRING, source[pos:end], start_line, start_col))
            pos = end
            continue

        m = _NUMBER.match(source, pos)
        if m is not None and not (ch == "." and not source[pos + 1 : pos + 2].isdigit()):
            text = m.group(0)
            kind = Tok.FLOAT if m.group("float") else Tok.INT
            tokens.append(SourceToken(kind, text, line, col))
            pos = m.end()
            col += len(text)
            continue

        m = _IDENT.match(source, pos)
        if m is not None:
            text = m.group(0)
            if text in ("True", "False"):
                kind = Tok.BOOL
            elif text == "None":
                kind = Tok.NONE
            else:
                kind = Tok.IDENT
            tokens.append(SourceToken(kind, text, line, col))
            pos = m.end()
            col += len(text)
            continue

        for punct in _PUNCTS:
            if source.startswith(punct, pos):
                break
        else:
            raise LexError(line, col, f"illegal character {ch!r}")
        if punct in _OPENERS:
            depth.append(_OPENERS[punct])
        elif punct in (")", "]", "}"):
            if not depth or depth[-1] != punct:
                raise LexError(line, col, f"unmatched {punct!r}")
            depth.pop()
        tokens.append(SourceToken(Tok.PUNCT, punct, line, col))
        pos += len(punct)
        col += len(punct)

    if depth:
        raise LexError(line, col, f"unexpected end of input: missing {depth[-1]!r}")
    while len(indents) > 1:
        indents.pop()
        tokens.append(SourceToken(Tok.DEDENT, "", line, col))
    tokens.append(SourceToken(Tok.EOF, "", line, col))
    return tokens
