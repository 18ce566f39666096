"""Frontend for the timing DSL: lexer, parser, validator, printer."""

from .ast import (
    Assign,
    AtBlock,
    Break,
    Call,
    ClockRef,
    Duration,
    EveryBlock,
    ExprStmt,
    Ident,
    If,
    IntLiteral,
    Loop,
    Program,
    SimultaneousCall,
    SyncBlock,
    ValidatedAst,
    WallTime,
    WithinBlock,
)
from .lexer import Token, TokenKind, tokenize
from .parser import parse, parse_source
from .pretty import pretty_print
from .validate import Diagnostic, check, validate

__all__ = [
    "Assign",
    "AtBlock",
    "Break",
    "Call",
    "ClockRef",
    "Diagnostic",
    "Duration",
    "EveryBlock",
    "ExprStmt",
    "Ident",
    "If",
    "IntLiteral",
    "Loop",
    "Program",
    "SimultaneousCall",
    "SyncBlock",
    "Token",
    "TokenKind",
    "ValidatedAst",
    "WallTime",
    "WithinBlock",
    "check",
    "parse",
    "parse_source",
    "pretty_print",
    "tokenize",
    "validate",
]
