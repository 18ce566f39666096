"""Token state and the firing rule.

A node is ready exactly when every data port holds its required token
count and every sync requirement is backed by a present token whose
achieved precision is at least as tight as required. Tokens are consumed
once per firing; the owner (the simulation engine) is responsible for
expiring sync tokens before asking about readiness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import GraphNode


@dataclass
class _PortState:
    required: int = 1
    tokens: list = field(default_factory=list)  # payloads, FIFO


class TokenState:
    """Mutable token bookkeeping for one graph, owned by a single engine."""

    def __init__(self):
        self._ports: dict[tuple[str, str], _PortState] = {}
        self._sync: dict[str, int] = {}  # node id -> achieved precision ns

    def _port(self, node_id: str, port: str) -> _PortState:
        return self._ports.setdefault((node_id, port), _PortState())

    def require(self, node_id: str, port: str, count: int):
        """Set the token multiplicity a port needs (set expansion)."""
        if count < 1:
            raise ValueError("port multiplicity must be at least 1")
        self._port(node_id, port).required = count

    def required(self, node_id: str, port: str) -> int:
        return self._port(node_id, port).required

    def add_data(self, node_id: str, port: str, payload=None):
        self._port(node_id, port).tokens.append(payload)

    def data_count(self, node_id: str, port: str) -> int:
        return len(self._port(node_id, port).tokens)

    def set_sync(self, node_id: str, achieved_precision_ns: int):
        self._sync[node_id] = achieved_precision_ns

    def clear_sync(self, node_id: str):
        self._sync.pop(node_id, None)

    def sync_precision(self, node_id: str) -> int | None:
        return self._sync.get(node_id)

    def consume(self, node: GraphNode) -> dict[str, list]:
        """Remove one firing's worth of tokens; returns payloads per port.

        Raises RuntimeError if called when the node is not ready, so a
        token can never be consumed twice.
        """
        if not firing_ready(node, self):
            raise RuntimeError(f"node {node.id} fired without a full token set")
        taken: dict[str, list] = {}
        for port in node.firing_rule.data_ports:
            ps = self._port(node.id, port)
            taken[port] = ps.tokens[: ps.required]
            del ps.tokens[: ps.required]
        return taken


def firing_ready(node: GraphNode, state: TokenState) -> bool:
    """True iff all data tokens are present and sync tokens are tight enough."""
    for port in node.firing_rule.data_ports:
        if state.data_count(node.id, port) < state.required(node.id, port):
            return False
    for req in node.firing_rule.sync:
        achieved = state.sync_precision(node.id)
        if achieved is None or achieved > req.precision_ns:
            return False
    return True
