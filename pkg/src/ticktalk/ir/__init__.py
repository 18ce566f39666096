"""Dataflow intermediate representation with clock-sync firing rules."""

from .firing import TokenState, firing_ready
from .lower import lower
from .model import (
    AtTime,
    CodeBlock,
    DataEdge,
    DataflowGraph,
    DurationParam,
    FiringRule,
    Frequency,
    GraphNode,
    IntParam,
    Latency,
    Simultaneous,
    SyncDep,
    SyncRequirement,
    Synchronize,
    simultaneity_groups,
)
from .serialize import deserialize, serialize

__all__ = [
    "AtTime",
    "CodeBlock",
    "DataEdge",
    "DataflowGraph",
    "DurationParam",
    "FiringRule",
    "Frequency",
    "GraphNode",
    "IntParam",
    "Latency",
    "Simultaneous",
    "SyncDep",
    "SyncRequirement",
    "Synchronize",
    "TokenState",
    "deserialize",
    "firing_ready",
    "lower",
    "serialize",
    "simultaneity_groups",
]
