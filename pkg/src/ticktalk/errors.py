"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class TickTalkError(Exception):
    """Base class for all package errors."""


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a source fragment."""

    line: int
    column: int
    length: int = 1

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class LexError(TickTalkError):
    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


class ParseError(TickTalkError):
    def __init__(self, span: SourceSpan, expected: str, found: str):
        super().__init__(f"{span}: expected {expected}, found {found}")
        self.span = span
        self.expected = expected
        self.found = found


class ValidationFailed(TickTalkError):
    """Raised by validate() when the diagnostic list is nonempty."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


class LoweringError(TickTalkError):
    pass


class DeserializeError(TickTalkError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class UnachievablePrecision(TickTalkError):
    """Requested sync precision is below the link's error floor."""

    def __init__(self, floor_ns: int):
        super().__init__(f"target below achievable floor of {floor_ns} ns")
        self.floor_ns = floor_ns


class LinkDown(TickTalkError):
    def __init__(self, link_id: str, member: str | None = None):
        suffix = f" (member {member})" if member else ""
        super().__init__(f"link {link_id} is down{suffix}")
        self.link_id = link_id
        self.member = member


class PrecisionUnachievable(TickTalkError):
    """A sync-domain member cannot reach the requested precision."""

    def __init__(self, member: str, floor_ns: int):
        super().__init__(f"member {member}: floor is {floor_ns} ns")
        self.member = member
        self.floor_ns = floor_ns


class TooLate(TickTalkError):
    """The computed wake-up instant is already in the past."""


class OverlapError(TickTalkError):
    """Power-timeline intervals overlap."""


class PlacementCapabilityError(TickTalkError):
    def __init__(self, node_id: str, ensemble_id: str, op: str):
        super().__init__(f"node {node_id}: ensemble {ensemble_id} lacks capability {op}")
        self.node_id = node_id
        self.ensemble_id = ensemble_id
        self.op = op


class NoFeasiblePlacement(TickTalkError):
    def __init__(self, node_id: str, reason: str):
        super().__init__(f"node {node_id}: {reason}")
        self.node_id = node_id
        self.reason = reason


class SyncTokenExpired(TickTalkError):
    def __init__(self, node_id: str):
        super().__init__(f"sync token expired before node {node_id} reached its instant")
        self.node_id = node_id


class OverrunError(TickTalkError):
    def __init__(self, node_id: str, worst_ns: int, period_ns: int):
        super().__init__(
            f"node {node_id}: worst-case execution {worst_ns} ns exceeds period {period_ns} ns"
        )
        self.node_id = node_id
        self.worst_ns = worst_ns
        self.period_ns = period_ns


class IncompleteGroup(TickTalkError):
    def __init__(self, group_id: str, missing):
        super().__init__(f"group {group_id}: members never fired: {sorted(missing)}")
        self.group_id = group_id
        self.missing = set(missing)


class ScenarioError(TickTalkError):
    """Scenario file violates the schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
