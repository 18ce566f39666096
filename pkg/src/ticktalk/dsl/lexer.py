"""Lexer for the timing DSL.

Duration literals (``1us``, ``100ms``) and wall-time literals
(``@4:35PM``, ``@16:35:10``) are single tokens. ``//`` starts a line
comment. Tokens compare by kind/text/value only, never by span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..errors import LexError, SourceSpan
from .ast import NS_PER_UNIT, Duration, WallTime


class TokenKind(Enum):
    IDENT = "identifier"
    INT = "integer"
    DURATION = "duration"
    WALLTIME = "walltime"
    LBRACE = "{"
    RBRACE = "}"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    SEMI = ";"
    DOT = "."
    ASSIGN = "="
    KW_LOOP = "loop"
    KW_IF = "if"
    KW_ELSE = "else"
    KW_BREAK = "break"
    KW_SYNC = "withSynchronization"
    KW_SIMULTANEOUSLY = "simultaneously"
    KW_EVERY = "every"
    KW_WITHIN = "within"
    KW_AT = "at"
    KW_SELF = "self"
    EOF = "end of input"


KEYWORDS = {
    "loop": TokenKind.KW_LOOP,
    "if": TokenKind.KW_IF,
    "else": TokenKind.KW_ELSE,
    "break": TokenKind.KW_BREAK,
    "withSynchronization": TokenKind.KW_SYNC,
    "simultaneously": TokenKind.KW_SIMULTANEOUSLY,
    "every": TokenKind.KW_EVERY,
    "within": TokenKind.KW_WITHIN,
    "at": TokenKind.KW_AT,
    "self": TokenKind.KW_SELF,
}

PUNCT = {
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMI,
    ".": TokenKind.DOT,
    "=": TokenKind.ASSIGN,
}


@dataclass
class Token:
    kind: TokenKind
    text: str
    value: object = None
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))

    def __repr__(self):
        return f"Token({self.kind.name}, {self.text!r})"


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class _Scanner:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.line = 1
        self.col = 1

    def at_end(self) -> bool:
        return self.pos >= len(self.src)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.src[i] if i < len(self.src) else ""

    def advance(self) -> str:
        ch = self.src[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def span_from(self, line: int, col: int, length: int) -> SourceSpan:
        return SourceSpan(line, col, max(1, length))

    def take_digits(self) -> str:
        digits = ""
        while not self.at_end() and self.peek().isdigit():
            digits += self.advance()
        return digits


def tokenize(source: str) -> list[Token]:
    """Tokenize source text; the result always ends with an EOF token.

    Raises LexError on an unrecognized character or a malformed duration
    or wall-time literal.
    """
    sc = _Scanner(source)
    tokens: list[Token] = []

    while not sc.at_end():
        ch = sc.peek()
        line, col = sc.line, sc.col

        if ch in " \t\r\n":
            sc.advance()
            continue

        if ch == "/" and sc.peek(1) == "/":
            while not sc.at_end() and sc.peek() != "\n":
                sc.advance()
            continue

        if ch in PUNCT:
            sc.advance()
            tokens.append(Token(PUNCT[ch], ch, span=sc.span_from(line, col, 1)))
            continue

        if ch == "@":
            tokens.append(_lex_walltime(sc, line, col))
            continue

        if ch.isdigit():
            tokens.append(_lex_number(sc, line, col))
            continue

        if _is_ident_start(ch):
            text = ""
            while not sc.at_end() and _is_ident_char(sc.peek()):
                text += sc.advance()
            span = sc.span_from(line, col, len(text))
            kind = KEYWORDS.get(text, TokenKind.IDENT)
            tokens.append(Token(kind, text, span=span))
            continue

        raise LexError(sc.span_from(line, col, 1), f"unrecognized character {ch!r}")

    tokens.append(Token(TokenKind.EOF, "", span=sc.span_from(sc.line, sc.col, 1)))
    return tokens


def _lex_number(sc: _Scanner, line: int, col: int) -> Token:
    digits = sc.take_digits()
    # A letter directly after digits must form a duration unit.
    if not sc.at_end() and _is_ident_start(sc.peek()):
        unit = ""
        while not sc.at_end() and _is_ident_char(sc.peek()):
            unit += sc.advance()
        text = digits + unit
        span = sc.span_from(line, col, len(text))
        if unit not in NS_PER_UNIT:
            raise LexError(span, f"malformed duration literal {text!r}")
        try:
            dur = Duration(int(digits), unit)
        except ValueError as exc:
            raise LexError(span, str(exc)) from None
        return Token(TokenKind.DURATION, text, value=dur, span=span)
    span = sc.span_from(line, col, len(digits))
    return Token(TokenKind.INT, digits, value=int(digits), span=span)


def _lex_walltime(sc: _Scanner, line: int, col: int) -> Token:
    text = sc.advance()  # '@'

    def fail(msg: str):
        raise LexError(sc.span_from(line, col, max(1, len(text))), msg)

    hours_s = sc.take_digits()
    if not hours_s:
        fail("expected digits after '@'")
    text += hours_s
    if sc.peek() != ":":
        fail(f"malformed wall-time literal {text!r}")
    text += sc.advance()
    minutes_s = sc.take_digits()
    if not minutes_s:
        fail(f"malformed wall-time literal {text!r}")
    text += minutes_s

    seconds_s = "0"
    if sc.peek() == ":":
        text += sc.advance()
        seconds_s = sc.take_digits()
        if not seconds_s:
            fail(f"malformed wall-time literal {text!r}")
        text += seconds_s

    meridiem = ""
    if sc.peek() in "AP" and sc.peek(1) == "M":
        meridiem = sc.advance() + sc.advance()
        text += meridiem

    hours, minutes, seconds = int(hours_s), int(minutes_s), int(seconds_s)
    if minutes > 59 or seconds > 59:
        fail(f"minutes/seconds out of range in {text!r}")
    if meridiem:
        if not 1 <= hours <= 12:
            fail(f"hour out of range for {meridiem} time in {text!r}")
        hours = hours % 12 + (12 if meridiem == "PM" else 0)
    elif hours > 23:
        fail(f"hour out of range in {text!r}")

    ns = (hours * 3600 + minutes * 60 + seconds) * 1_000_000_000
    span = sc.span_from(line, col, len(text))
    return Token(TokenKind.WALLTIME, text, value=WallTime(ns), span=span)
