"""Static checks on a parsed program.

check() returns the diagnostic list; validate() wraps a clean program in
ValidatedAst or raises ValidationFailed. Names must be assigned before
use in lexical order; call names are not resolved here because opaque
operations are declared per scenario, not in the source.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SourceSpan, ValidationFailed
from .ast import (
    Assign,
    AtBlock,
    Break,
    Call,
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
    ValidatedAst,
    WithinBlock,
)

NON_POSITIVE_PRECISION = "NonPositivePrecision"
NON_POSITIVE_PERIOD = "NonPositivePeriod"
NON_POSITIVE_BOUND = "NonPositiveBound"
SIMULTANEOUS_OUTSIDE_SYNC = "SimultaneousOutsideSync"
NEGATIVE_INSTANT = "NegativeInstant"
UNBOUND_NAME = "UnboundName"
BREAK_OUTSIDE_LOOP = "BreakOutsideLoop"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    span: SourceSpan
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.code}: {self.message}"


class _Checker:
    def __init__(self):
        self.diags: list[Diagnostic] = []
        self.bound: set[str] = set()

    def report(self, code: str, span: SourceSpan, message: str):
        self.diags.append(Diagnostic(code, span, message))

    def block(self, stmts, in_sync: bool, in_loop: bool):
        for stmt in stmts:
            self.statement(stmt, in_sync, in_loop)

    def statement(self, s, in_sync: bool, in_loop: bool):
        if isinstance(s, Assign):
            self.expression(s.value, in_sync)
            self.bound.add(s.target)
        elif isinstance(s, ExprStmt):
            self.expression(s.expr, in_sync)
        elif isinstance(s, Break):
            if not in_loop:
                self.report(BREAK_OUTSIDE_LOOP, s.span, "break outside of a loop")
        elif isinstance(s, Loop):
            self.block(s.body, in_sync, True)
        elif isinstance(s, If):
            self.expression(s.cond, in_sync)
            self.block(s.then, in_sync, in_loop)
            if s.orelse is not None:
                self.block(s.orelse, in_sync, in_loop)
        elif isinstance(s, SyncBlock):
            self.expression(s.sensor_set, in_sync)
            if s.precision.ns <= 0:
                self.report(
                    NON_POSITIVE_PRECISION,
                    s.span,
                    f"synchronization precision must be positive, got {s.precision}",
                )
            self.block(s.body, True, in_loop)
        elif isinstance(s, EveryBlock):
            if s.period.ns <= 0:
                self.report(
                    NON_POSITIVE_PERIOD, s.span, f"period must be positive, got {s.period}"
                )
            self.block(s.body, in_sync, in_loop)
        elif isinstance(s, WithinBlock):
            if s.bound.ns <= 0:
                self.report(
                    NON_POSITIVE_BOUND, s.span, f"latency bound must be positive, got {s.bound}"
                )
            self.block(s.body, in_sync, in_loop)
        elif isinstance(s, AtBlock):
            if s.instant.ns < 0:  # unreachable from the lexer, kept for built ASTs
                self.report(NEGATIVE_INSTANT, s.span, "instant before the scenario epoch")
            self.block(s.body, in_sync, in_loop)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def expression(self, e, in_sync: bool):
        if isinstance(e, Ident):
            if e.name not in self.bound:
                self.report(UNBOUND_NAME, e.span, f"name {e.name!r} used before assignment")
        elif isinstance(e, Call):
            for arg in e.args:
                self.expression(arg, in_sync)
        elif isinstance(e, SimultaneousCall):
            if not in_sync:
                self.report(
                    SIMULTANEOUS_OUTSIDE_SYNC,
                    e.span,
                    "simultaneously(...) is only meaningful inside withSynchronization",
                )
            if e.set_name not in self.bound:
                self.report(
                    UNBOUND_NAME, e.span, f"set {e.set_name!r} used before assignment"
                )
        elif isinstance(e, (IntLiteral, DurationLiteral)):
            pass
        else:
            raise TypeError(f"unknown expression {e!r}")


def check(program: Program) -> list[Diagnostic]:
    """Run all static checks; returns diagnostics in source order."""
    checker = _Checker()
    checker.block(program.statements, in_sync=False, in_loop=False)
    return checker.diags


def validate(program: Program) -> ValidatedAst:
    """Return a ValidatedAst or raise ValidationFailed with diagnostics."""
    diags = check(program)
    if diags:
        raise ValidationFailed(diags)
    return ValidatedAst(program)
