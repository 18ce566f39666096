"""Canonical printer; its output re-parses to a structurally equal AST."""

from __future__ import annotations

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
    WithinBlock,
)

_INDENT = "    "


def pretty_print(program: Program) -> str:
    lines: list[str] = []
    for stmt in program.statements:
        _stmt(stmt, 0, lines)
    return "\n".join(lines) + ("\n" if lines else "")


def _expr(e) -> str:
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, IntLiteral):
        return str(e.value)
    if isinstance(e, DurationLiteral):
        return str(e.value)
    if isinstance(e, Call):
        return f"{e.name}({', '.join(_expr(a) for a in e.args)})"
    if isinstance(e, SimultaneousCall):
        return f"simultaneously({e.set_name}.{e.method}())"
    raise TypeError(f"unprintable expression {e!r}")


def _block(body, depth: int, lines: list[str], header: str):
    lines.append(_INDENT * depth + header + " {")
    for stmt in body:
        _stmt(stmt, depth + 1, lines)
    lines.append(_INDENT * depth + "}")


def _stmt(s, depth: int, lines: list[str]):
    pad = _INDENT * depth
    if isinstance(s, Assign):
        lines.append(f"{pad}{s.target} = {_expr(s.value)};")
    elif isinstance(s, ExprStmt):
        lines.append(f"{pad}{_expr(s.expr)};")
    elif isinstance(s, Break):
        lines.append(f"{pad}break;")
    elif isinstance(s, Loop):
        _block(s.body, depth, lines, "loop")
    elif isinstance(s, If):
        _block(s.then, depth, lines, f"if ({_expr(s.cond)})")
        if s.orelse is not None:
            # fold "} else {" onto one line
            lines[-1] = lines[-1] + " else {"
            for stmt in s.orelse:
                _stmt(stmt, depth + 1, lines)
            lines.append(pad + "}")
    elif isinstance(s, SyncBlock):
        header = f"withSynchronization({_expr(s.sensor_set)}, {s.precision}, {s.clock})"
        _block(s.body, depth, lines, header)
    elif isinstance(s, EveryBlock):
        _block(s.body, depth, lines, f"every({s.period})")
    elif isinstance(s, WithinBlock):
        _block(s.body, depth, lines, f"within({s.bound})")
    elif isinstance(s, AtBlock):
        _block(s.body, depth, lines, f"at({s.instant}, {s.clock})")
    else:
        raise TypeError(f"unprintable statement {s!r}")
