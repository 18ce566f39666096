"""Typed AST for the timing DSL.

Every node carries a SourceSpan for diagnostics; spans never participate
in equality, so two parses of equivalent text compare structurally equal.
All times are integer nanoseconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SourceSpan

NS_PER_UNIT = {"ns": 1, "us": 1_000, "ms": 1_000_000, "s": 1_000_000_000}

# Highest representable duration: 10**18 ns (about 31 years).
MAX_DURATION_NS = 10**18


@dataclass(frozen=True)
class Duration:
    """A duration literal such as ``1us``; value kept in its source unit."""

    value: int
    unit: str

    def __post_init__(self):
        if self.unit not in NS_PER_UNIT:
            raise ValueError(f"unknown duration unit {self.unit!r}")
        if self.value < 0:
            raise ValueError("duration value must be non-negative")
        if self.ns > MAX_DURATION_NS:
            raise ValueError(f"duration exceeds {MAX_DURATION_NS} ns")

    @property
    def ns(self) -> int:
        return self.value * NS_PER_UNIT[self.unit]

    def __str__(self) -> str:
        return f"{self.value}{self.unit}"

    @staticmethod
    def from_ns(ns: int) -> "Duration":
        for unit in ("s", "ms", "us"):
            if ns and ns % NS_PER_UNIT[unit] == 0:
                return Duration(ns // NS_PER_UNIT[unit], unit)
        return Duration(ns, "ns")


@dataclass(frozen=True)
class WallTime:
    """Absolute instant, nanoseconds since the scenario epoch."""

    ns: int

    def __post_init__(self):
        if self.ns < 0:
            raise ValueError("wall time must be non-negative")

    def __str__(self) -> str:
        total_s, rem_ns = divmod(self.ns, 1_000_000_000)
        h, rem = divmod(total_s, 3600)
        m, s = divmod(rem, 60)
        base = f"@{h}:{m:02d}:{s:02d}"
        return base if rem_ns == 0 else f"{base}+{rem_ns}ns"


@dataclass(frozen=True)
class ClockRef:
    """Reference to a timebase: the submitter's own (`self`) or a named one."""

    name: str | None = None

    def __post_init__(self):
        if self.name is not None and not self.name:
            raise ValueError("named clock reference needs a nonempty name")

    @property
    def is_self(self) -> bool:
        return self.name is None

    def __str__(self) -> str:
        return "self" if self.name is None else self.name


SELF_CLOCK = ClockRef()


# --- expressions -----------------------------------------------------------


@dataclass
class Ident:
    name: str
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class IntLiteral:
    value: int
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class DurationLiteral:
    value: Duration
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class Call:
    name: str
    args: list
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class SimultaneousCall:
    """``simultaneously(S.method())``: fan a method over a recruited set."""

    set_name: str
    method: str
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


Expr = Ident | IntLiteral | DurationLiteral | Call | SimultaneousCall


# --- statements ------------------------------------------------------------


@dataclass
class Assign:
    target: str
    value: Expr
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class Loop:
    body: list
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class If:
    cond: Expr
    then: list
    orelse: list | None
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class Break:
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class SyncBlock:
    """``withSynchronization(set, precision, clock) { ... }``"""

    sensor_set: Expr
    precision: Duration
    clock: ClockRef
    body: list
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class EveryBlock:
    period: Duration
    body: list
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class WithinBlock:
    bound: Duration
    body: list
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class AtBlock:
    instant: WallTime
    clock: ClockRef
    body: list
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass
class ExprStmt:
    """A bare call (or simultaneously form) used for its effect."""

    expr: Expr
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


Statement = Assign | Loop | If | Break | SyncBlock | EveryBlock | WithinBlock | AtBlock | ExprStmt


@dataclass
class Program:
    statements: list

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return self.statements == other.statements


@dataclass(frozen=True)
class ValidatedAst:
    """Proof token that validate() ran clean on the wrapped program."""

    program: Program
