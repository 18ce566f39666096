"""Graph types: code blocks, timing constraints, nodes, edges, groups.

A node is one instance of a code block; placement pins it to an ensemble.
Data edges carry value tokens; sync dependencies demand a live clock-sync
token at the stated precision before a node may fire. Back edges between
loop iterations are explicit (``loopback``); everything else must stay
acyclic, which the constructor enforces.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from ..dsl.ast import ClockRef
from ..errors import LoweringError

UNPLACED = None


# All IR durations/instants are integer nanoseconds; source-unit sugar
# stays in the frontend.


@dataclass(frozen=True)
class Frequency:
    period_ns: int


@dataclass(frozen=True)
class Synchronize:
    precision_ns: int
    clock: ClockRef
    # Node producing the member set this sync domain spans (None: the
    # node's own ensemble only).
    set_source: str | None = None


@dataclass(frozen=True)
class Simultaneous:
    group_id: str


@dataclass(frozen=True)
class Latency:
    bound_ns: int
    # Lowering-assigned scope tag; nodes sharing it came from one
    # within-block, which is how measurement recovers source/sink pairs.
    scope: str = ""


@dataclass(frozen=True)
class AtTime:
    instant_ns: int
    clock: ClockRef


TimingConstraint = Frequency | Synchronize | Simultaneous | Latency | AtTime


@dataclass(frozen=True)
class IntParam:
    value: int


@dataclass(frozen=True)
class DurationParam:
    ns: int


@dataclass(frozen=True)
class SyncRequirement:
    clock: ClockRef
    precision_ns: int


@dataclass(frozen=True)
class FiringRule:
    """Tokens a node needs to fire: one entry per data port, plus sync."""

    data_ports: tuple[str, ...]
    sync: tuple[SyncRequirement, ...] = ()


@dataclass
class CodeBlock:
    id: str
    op: str
    # Compile-time-constant inputs: (port, value) with value int or Duration.
    params: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    clock_binding: ClockRef = ClockRef()


@dataclass
class GraphNode:
    id: str
    code_block: CodeBlock
    placement: str | None = UNPLACED
    firing_rule: FiringRule = FiringRule(())
    # True when this node fans out over a recruited ensemble set.
    set_expand: bool = False
    set_source: str | None = None
    loop_id: str | None = None
    break_for: str | None = None
    break_negate: bool = False
    out_binding: str | None = None

    @property
    def op(self) -> str:
        return self.code_block.op


@dataclass(frozen=True)
class DataEdge:
    producer: str
    consumer: str
    port: str
    loopback: bool = False
    # Producer is set-expanded: the consumer port needs one token per
    # expanded instance rather than a single token.
    expands: bool = False


@dataclass(frozen=True)
class SyncDep:
    node: str
    clock: str  # "self" or a declared clock name
    precision_ns: int


class DataflowGraph:
    """Validated container; construction re-checks all invariants."""

    def __init__(self, nodes, data_edges, sync_deps, simultaneity_groups):
        self.nodes: list[GraphNode] = sorted(nodes, key=lambda n: n.id)
        self.data_edges: list[DataEdge] = sorted(
            data_edges, key=lambda e: (e.producer, e.consumer, e.port, e.loopback)
        )
        self.sync_deps: list[SyncDep] = sorted(
            sync_deps, key=lambda d: (d.node, d.clock, d.precision_ns)
        )
        self.simultaneity_groups: dict[str, set[str]] = {
            gid: set(members) for gid, members in simultaneity_groups.items()
        }
        self._by_id = {n.id: n for n in self.nodes}
        if len(self._by_id) != len(self.nodes):
            raise LoweringError("duplicate node ids")
        self._check()

    def node(self, node_id: str) -> GraphNode:
        return self._by_id[node_id]

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_id

    def successors(self, node_id: str, loopback: bool = False):
        return [e for e in self.data_edges if e.producer == node_id and e.loopback == loopback]

    def predecessors(self, node_id: str, loopback: bool = False):
        return [e for e in self.data_edges if e.consumer == node_id and e.loopback == loopback]

    def _check(self):
        for e in self.data_edges:
            if e.producer not in self._by_id or e.consumer not in self._by_id:
                raise LoweringError(f"edge {e} references unknown node")
        for d in self.sync_deps:
            if d.node not in self._by_id:
                raise LoweringError(f"sync dep {d} references unknown node")
            if d.precision_ns <= 0:
                raise LoweringError(f"sync dep {d} has non-positive precision")
        sync_nodes = {d.node for d in self.sync_deps}
        for gid, members in self.simultaneity_groups.items():
            if not members:
                raise LoweringError(f"simultaneity group {gid} is empty")
            for m in members:
                if m not in self._by_id:
                    raise LoweringError(f"group {gid} references unknown node {m}")
                if m not in sync_nodes:
                    raise LoweringError(f"group {gid} member {m} has no sync dependency")
        for n in self.nodes:
            inbound = sorted(
                {e.port for e in self.predecessors(n.id)}
                | {e.port for e in self.predecessors(n.id, loopback=True)}
            )
            listed = sorted(n.firing_rule.data_ports)
            if listed != inbound or len(n.firing_rule.data_ports) != len(set(listed)):
                raise LoweringError(
                    f"node {n.id}: firing rule ports {listed} must list each "
                    f"inbound edge port exactly once (inbound: {inbound})"
                )
        self._check_acyclic()

    def _check_acyclic(self):
        indeg = {n.id: 0 for n in self.nodes}
        adj: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.data_edges:
            if e.loopback:
                continue
            adj[e.producer].append(e.consumer)
            indeg[e.consumer] += 1
        queue = sorted(nid for nid, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            nid = queue.pop(0)
            seen += 1
            for nxt in adj[nid]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    queue.append(nxt)
        if seen != len(self.nodes):
            raise LoweringError("data edges contain a cycle outside loopback edges")

    def topo_order(self) -> list[str]:
        """Node ids in dependency order (loopback edges ignored), ties by id."""
        indeg = {n.id: 0 for n in self.nodes}
        adj: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.data_edges:
            if e.loopback:
                continue
            adj[e.producer].append(e.consumer)
            indeg[e.consumer] += 1
        heap = [nid for nid, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            nid = heapq.heappop(heap)
            order.append(nid)
            for nxt in sorted(adj[nid]):
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    heapq.heappush(heap, nxt)
        return order

    def structurally_equal(self, other: "DataflowGraph") -> bool:
        return (
            [_node_key(n) for n in self.nodes] == [_node_key(n) for n in other.nodes]
            and self.data_edges == other.data_edges
            and self.sync_deps == other.sync_deps
            and self.simultaneity_groups == other.simultaneity_groups
        )


def _node_key(n: GraphNode):
    return (
        n.id,
        n.code_block.op,
        tuple((p, v) for p, v in n.code_block.params),
        tuple(n.code_block.constraints),
        n.code_block.clock_binding,
        n.placement,
        n.firing_rule,
        n.set_expand,
        n.set_source,
        n.loop_id,
        n.break_for,
        n.break_negate,
        n.out_binding,
    )


def simultaneity_groups(graph: DataflowGraph) -> dict[str, set[str]]:
    """The groups created at lowering, group id to member node ids."""
    return {gid: set(members) for gid, members in graph.simultaneity_groups.items()}
