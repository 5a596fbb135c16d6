"""Tokenizer and event-expression grammar shared by the spec and binding parsers."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from tdss.frontends.errors import ParseError
from tdss.model import WILDCARD, Arg, EventPattern, Placeholder

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>//[^\n]*)
  | (?P<arrow>->)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<placeholder>\{[0-9]+\})
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}().,*])
  | (?P<fatarrow>=>)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, string, placeholder, punct, arrow, fatarrow, eof
    text: str
    line: int
    column: int


def tokenize(text: str, path: str, line: int = 1, column: int = 1) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise ParseError("unterminated string literal", path, line, column, text[pos : pos + 20])
            raise ParseError(f"unexpected character {text[pos]!r}", path, line, column, text[pos])
        kind = m.lastgroup
        value = m.group()
        if kind == "newline":
            line += 1
            column = 1
        else:
            if kind not in ("ws", "comment"):
                if kind == "punct":
                    kind = value
                tokens.append(Token(kind, value, line, column))
            column += len(value)
        pos = m.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token], path: str):
        self.tokens = tokens
        self.path = path
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.current
        return ParseError(message, self.path, tok.line, tok.column, tok.text or "<end of input>")

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.current.kind != kind:
            raise self.error(f"expected {what or kind}")
        return self.advance()

    def at_keyword(self, *words: str) -> bool:
        return self.current.kind == "ident" and self.current.text in words


def parse_event_expr(ts: TokenStream) -> EventPattern:
    """``(IDENT "->")? IDENT "." IDENT "(" arglist? ")"``; no sender means self-event."""
    if ts.current.kind != "ident":
        raise ts.error("expected event expression")
    first = ts.advance().text
    if ts.current.kind == "arrow":
        ts.advance()
        sender = first
        receiver = ts.expect("ident", "receiver name").text
    else:
        sender = receiver = first
    ts.expect(".", "'.'")
    message = ts.expect("ident", "message name").text
    ts.expect("(", "'('")
    args: list[Arg] = []
    if ts.current.kind != ")":
        args.append(_parse_arg(ts))
        while ts.current.kind == ",":
            ts.advance()
            args.append(_parse_arg(ts))
    ts.expect(")", "')'")
    return EventPattern(sender, receiver, message, tuple(args))


def _parse_arg(ts: TokenStream) -> Arg:
    tok = ts.current
    if tok.kind == "string":
        try:
            value = json.loads(tok.text)
        except json.JSONDecodeError:
            raise ts.error("invalid escape in string literal") from None
        ts.advance()
        return value
    if tok.kind == "*":
        ts.advance()
        return WILDCARD
    if tok.kind == "placeholder":
        ts.advance()
        return Placeholder(int(tok.text[1:-1]))
    raise ts.error("expected argument (string, '*' or '{n}')")
