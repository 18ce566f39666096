"""Recursive-descent parser for the timing DSL.

Grammar (LL(1), no backtracking):

    program   := stmt* EOF
    stmt      := "loop" block
               | "if" "(" expr ")" block ("else" block)?
               | "break" ";"
               | "withSynchronization" "(" expr "," DURATION "," clockref ")" block
               | "every" "(" DURATION ")" block
               | "within" "(" DURATION ")" block
               | "at" "(" WALLTIME "," clockref ")" block
               | IDENT "=" expr ";"
               | IDENT "(" args ")" ";"
               | "simultaneously" "(" IDENT "." IDENT "(" ")" ")" ";"
    block     := "{" stmt* "}"
    expr      := IDENT "(" args ")" | IDENT | INT | DURATION
               | "simultaneously" "(" IDENT "." IDENT "(" ")" ")"
    args      := (expr ("," expr)*)?
    clockref  := "self" | IDENT
"""

from __future__ import annotations

from ..errors import ParseError
from .ast import (
    Assign,
    AtBlock,
    Break,
    Call,
    ClockRef,
    DurationLiteral,
    EveryBlock,
    ExprStmt,
    Ident,
    If,
    IntLiteral,
    Loop,
    Program,
    SimultaneousCall,
    SyncBlock,
    WithinBlock,
)
from .lexer import Token, TokenKind, tokenize


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def expect(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise ParseError(tok.span, kind.value, tok.text or tok.kind.value)
        return self.advance()

    # statements

    def program(self) -> Program:
        stmts = []
        while self.peek().kind is not TokenKind.EOF:
            stmts.append(self.statement())
        return Program(stmts)

    def block(self) -> list:
        self.expect(TokenKind.LBRACE)
        stmts = []
        while self.peek().kind not in (TokenKind.RBRACE, TokenKind.EOF):
            stmts.append(self.statement())
        self.expect(TokenKind.RBRACE)
        return stmts

    def statement(self):
        tok = self.peek()
        kind = tok.kind

        if kind is TokenKind.KW_LOOP:
            self.advance()
            return Loop(self.block(), span=tok.span)

        if kind is TokenKind.KW_IF:
            self.advance()
            self.expect(TokenKind.LPAREN)
            cond = self.expression()
            self.expect(TokenKind.RPAREN)
            then = self.block()
            orelse = None
            if self.peek().kind is TokenKind.KW_ELSE:
                self.advance()
                orelse = self.block()
            return If(cond, then, orelse, span=tok.span)

        if kind is TokenKind.KW_BREAK:
            self.advance()
            self.expect(TokenKind.SEMI)
            return Break(span=tok.span)

        if kind is TokenKind.KW_SYNC:
            self.advance()
            self.expect(TokenKind.LPAREN)
            sensor_set = self.expression()
            self.expect(TokenKind.COMMA)
            precision = self.expect(TokenKind.DURATION).value
            self.expect(TokenKind.COMMA)
            clock = self.clockref()
            self.expect(TokenKind.RPAREN)
            return SyncBlock(sensor_set, precision, clock, self.block(), span=tok.span)

        if kind is TokenKind.KW_EVERY:
            self.advance()
            self.expect(TokenKind.LPAREN)
            period = self.expect(TokenKind.DURATION).value
            self.expect(TokenKind.RPAREN)
            return EveryBlock(period, self.block(), span=tok.span)

        if kind is TokenKind.KW_WITHIN:
            self.advance()
            self.expect(TokenKind.LPAREN)
            bound = self.expect(TokenKind.DURATION).value
            self.expect(TokenKind.RPAREN)
            return WithinBlock(bound, self.block(), span=tok.span)

        if kind is TokenKind.KW_AT:
            self.advance()
            self.expect(TokenKind.LPAREN)
            instant = self.expect(TokenKind.WALLTIME).value
            self.expect(TokenKind.COMMA)
            clock = self.clockref()
            self.expect(TokenKind.RPAREN)
            return AtBlock(instant, clock, self.block(), span=tok.span)

        if kind is TokenKind.KW_SIMULTANEOUSLY:
            expr = self.simultaneous_call()
            self.expect(TokenKind.SEMI)
            return ExprStmt(expr, span=tok.span)

        if kind is TokenKind.IDENT:
            name = self.advance()
            nxt = self.peek()
            if nxt.kind is TokenKind.ASSIGN:
                self.advance()
                value = self.expression()
                self.expect(TokenKind.SEMI)
                return Assign(name.text, value, span=tok.span)
            if nxt.kind is TokenKind.LPAREN:
                call = self.call_tail(name)
                self.expect(TokenKind.SEMI)
                return ExprStmt(call, span=tok.span)
            raise ParseError(nxt.span, "'=' or '('", nxt.text or nxt.kind.value)

        raise ParseError(tok.span, "statement", tok.text or tok.kind.value)

    # expressions

    def expression(self):
        tok = self.peek()
        if tok.kind is TokenKind.KW_SIMULTANEOUSLY:
            return self.simultaneous_call()
        if tok.kind is TokenKind.IDENT:
            name = self.advance()
            if self.peek().kind is TokenKind.LPAREN:
                return self.call_tail(name)
            return Ident(name.text, span=name.span)
        if tok.kind is TokenKind.INT:
            self.advance()
            return IntLiteral(tok.value, span=tok.span)
        if tok.kind is TokenKind.DURATION:
            self.advance()
            return DurationLiteral(tok.value, span=tok.span)
        raise ParseError(tok.span, "expression", tok.text or tok.kind.value)

    def call_tail(self, name: Token) -> Call:
        self.expect(TokenKind.LPAREN)
        args = []
        if self.peek().kind is not TokenKind.RPAREN:
            args.append(self.expression())
            while self.peek().kind is TokenKind.COMMA:
                self.advance()
                args.append(self.expression())
        self.expect(TokenKind.RPAREN)
        return Call(name.text, args, span=name.span)

    def simultaneous_call(self) -> SimultaneousCall:
        kw = self.expect(TokenKind.KW_SIMULTANEOUSLY)
        self.expect(TokenKind.LPAREN)
        set_name = self.expect(TokenKind.IDENT).text
        self.expect(TokenKind.DOT)
        method = self.expect(TokenKind.IDENT).text
        self.expect(TokenKind.LPAREN)
        self.expect(TokenKind.RPAREN)
        self.expect(TokenKind.RPAREN)
        return SimultaneousCall(set_name, method, span=kw.span)

    def clockref(self) -> ClockRef:
        tok = self.peek()
        if tok.kind is TokenKind.KW_SELF:
            self.advance()
            return ClockRef()
        if tok.kind is TokenKind.IDENT:
            self.advance()
            return ClockRef(tok.text)
        raise ParseError(tok.span, "clock reference", tok.text or tok.kind.value)


def parse(tokens: list[Token]) -> Program:
    """Parse a token sequence (from tokenize) into a Program."""
    return _Parser(tokens).program()


def parse_source(source: str) -> Program:
    """Convenience: tokenize and parse in one step."""
    return parse(tokenize(source))
