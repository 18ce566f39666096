"""Canonical graph file format (.ttg).

Top-level keys are exactly {"nodes", "data_edges", "sync_deps",
"simultaneity_groups", "version"}. Output is byte-stable: nodes sorted
by id, edges and deps sorted, compact separators, one trailing newline.
All durations are integer nanoseconds. deserialize(serialize(g)) is
structurally equal to g.

deserialize optionally enforces that sync dependencies name known clocks
("self" plus the scenario's clock ids), since the graph file alone does
not carry the clock registry.
"""

from __future__ import annotations

import json

from ..dsl.ast import ClockRef
from ..errors import DeserializeError
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
)

FORMAT_VERSION = 1

_TOP_KEYS = ("nodes", "data_edges", "sync_deps", "simultaneity_groups", "version")


def _clock_str(c: ClockRef) -> str:
    return "self" if c.is_self else c.name


def _clock_ref(s: str, path: str) -> ClockRef:
    if not isinstance(s, str) or not s:
        raise DeserializeError(path, "clock must be a nonempty string")
    return ClockRef() if s == "self" else ClockRef(s)


def _constraint_json(c) -> dict:
    if isinstance(c, Frequency):
        return {"kind": "frequency", "period_ns": c.period_ns}
    if isinstance(c, Synchronize):
        return {
            "kind": "synchronize",
            "precision_ns": c.precision_ns,
            "clock": _clock_str(c.clock),
            "set_source": c.set_source,
        }
    if isinstance(c, Simultaneous):
        return {"kind": "simultaneous", "group": c.group_id}
    if isinstance(c, Latency):
        return {"kind": "latency", "bound_ns": c.bound_ns, "scope": c.scope}
    if isinstance(c, AtTime):
        return {"kind": "at", "instant_ns": c.instant_ns, "clock": _clock_str(c.clock)}
    raise TypeError(f"unknown constraint {c!r}")


def _param_json(value) -> dict:
    if isinstance(value, IntParam):
        return {"int": value.value}
    if isinstance(value, DurationParam):
        return {"duration_ns": value.ns}
    raise TypeError(f"unknown param value {value!r}")


def _node_json(n: GraphNode) -> dict:
    return {
        "id": n.id,
        "op": n.code_block.op,
        "params": [[p, _param_json(v)] for p, v in n.code_block.params],
        "constraints": [_constraint_json(c) for c in n.code_block.constraints],
        "clock": _clock_str(n.code_block.clock_binding),
        "placement": n.placement,
        "firing": {
            "data_ports": list(n.firing_rule.data_ports),
            "sync": [
                {"clock": _clock_str(r.clock), "precision_ns": r.precision_ns}
                for r in n.firing_rule.sync
            ],
        },
        "set_expand": n.set_expand,
        "set_source": n.set_source,
        "loop": n.loop_id,
        "break_for": n.break_for,
        "break_negate": n.break_negate,
        "out_binding": n.out_binding,
    }


def serialize(graph: DataflowGraph) -> str:
    doc = {
        "nodes": [_node_json(n) for n in graph.nodes],
        "data_edges": [
            {
                "producer": e.producer,
                "consumer": e.consumer,
                "port": e.port,
                "loopback": e.loopback,
                "expands": e.expands,
            }
            for e in graph.data_edges
        ],
        "sync_deps": [
            {"node": d.node, "clock": d.clock, "precision_ns": d.precision_ns}
            for d in graph.sync_deps
        ],
        "simultaneity_groups": {
            gid: sorted(members) for gid, members in sorted(graph.simultaneity_groups.items())
        },
        "version": FORMAT_VERSION,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _expect(doc: dict, key: str, types, path: str):
    if key not in doc:
        raise DeserializeError(f"{path}.{key}", "missing key")
    value = doc[key]
    if not isinstance(value, types):
        raise DeserializeError(f"{path}.{key}", f"expected {types}, got {type(value).__name__}")
    return value


def _parse_constraint(d: dict, path: str):
    kind = _expect(d, "kind", str, path)
    if kind == "frequency":
        return Frequency(_expect(d, "period_ns", int, path))
    if kind == "synchronize":
        set_source = d.get("set_source")
        if set_source is not None and not isinstance(set_source, str):
            raise DeserializeError(f"{path}.set_source", "expected string or null")
        return Synchronize(
            _expect(d, "precision_ns", int, path),
            _clock_ref(_expect(d, "clock", str, path), path),
            set_source,
        )
    if kind == "simultaneous":
        return Simultaneous(_expect(d, "group", str, path))
    if kind == "latency":
        return Latency(_expect(d, "bound_ns", int, path), _expect(d, "scope", str, path))
    if kind == "at":
        return AtTime(
            _expect(d, "instant_ns", int, path),
            _clock_ref(_expect(d, "clock", str, path), path),
        )
    raise DeserializeError(f"{path}.kind", f"unknown constraint kind {kind!r}")


def _parse_param(entry, path: str):
    if (
        not isinstance(entry, list)
        or len(entry) != 2
        or not isinstance(entry[0], str)
        or not isinstance(entry[1], dict)
    ):
        raise DeserializeError(path, "param entries are [port, value] pairs")
    port, value = entry
    if set(value) == {"int"} and isinstance(value["int"], int):
        return port, IntParam(value["int"])
    if set(value) == {"duration_ns"} and isinstance(value["duration_ns"], int):
        return port, DurationParam(value["duration_ns"])
    raise DeserializeError(path, f"bad param value {value!r}")


def _parse_node(d: dict, path: str) -> GraphNode:
    if not isinstance(d, dict):
        raise DeserializeError(path, "node must be an object")
    nid = _expect(d, "id", str, path)
    op = _expect(d, "op", str, path)
    params = [_parse_param(p, f"{path}.params") for p in _expect(d, "params", list, path)]
    constraints = [
        _parse_constraint(c, f"{path}.constraints")
        for c in _expect(d, "constraints", list, path)
    ]
    firing = _expect(d, "firing", dict, path)
    ports = _expect(firing, "data_ports", list, f"{path}.firing")
    sync = [
        SyncRequirement(
            _clock_ref(_expect(r, "clock", str, f"{path}.firing.sync"), f"{path}.firing.sync"),
            _expect(r, "precision_ns", int, f"{path}.firing.sync"),
        )
        for r in _expect(firing, "sync", list, f"{path}.firing")
    ]
    placement = d.get("placement")
    if placement is not None and not isinstance(placement, str):
        raise DeserializeError(f"{path}.placement", "expected string or null")
    block = CodeBlock(
        id=nid,
        op=op,
        params=params,
        constraints=constraints,
        clock_binding=_clock_ref(_expect(d, "clock", str, path), path),
    )
    return GraphNode(
        id=nid,
        code_block=block,
        placement=placement,
        firing_rule=FiringRule(tuple(ports), tuple(sync)),
        set_expand=bool(d.get("set_expand", False)),
        set_source=d.get("set_source"),
        loop_id=d.get("loop"),
        break_for=d.get("break_for"),
        break_negate=bool(d.get("break_negate", False)),
        out_binding=d.get("out_binding"),
    )


def deserialize(text: str, known_clocks=None) -> DataflowGraph:
    """Parse a .ttg document; raises DeserializeError on schema violations.

    known_clocks: optional iterable of declared clock names; when given,
    sync dependencies naming anything else (besides "self") are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeserializeError("$", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DeserializeError("$", "top level must be an object")
    unknown = set(doc) - set(_TOP_KEYS)
    if unknown:
        raise DeserializeError("$", f"unknown top-level keys {sorted(unknown)}")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise DeserializeError("$.version", f"unsupported version {version!r}")

    nodes = [
        _parse_node(n, f"$.nodes[{i}]")
        for i, n in enumerate(_expect(doc, "nodes", list, "$"))
    ]
    edges = []
    for i, e in enumerate(_expect(doc, "data_edges", list, "$")):
        path = f"$.data_edges[{i}]"
        if not isinstance(e, dict):
            raise DeserializeError(path, "edge must be an object")
        edges.append(
            DataEdge(
                _expect(e, "producer", str, path),
                _expect(e, "consumer", str, path),
                _expect(e, "port", str, path),
                loopback=bool(e.get("loopback", False)),
                expands=bool(e.get("expands", False)),
            )
        )
    deps = []
    allowed = None if known_clocks is None else set(known_clocks) | {"self"}
    for i, dep in enumerate(_expect(doc, "sync_deps", list, "$")):
        path = f"$.sync_deps[{i}]"
        if not isinstance(dep, dict):
            raise DeserializeError(path, "sync dep must be an object")
        clock = _expect(dep, "clock", str, path)
        if allowed is not None and clock not in allowed:
            raise DeserializeError(f"{path}.clock", f"unknown clock {clock!r}")
        deps.append(
            SyncDep(_expect(dep, "node", str, path), clock, _expect(dep, "precision_ns", int, path))
        )
    groups_doc = _expect(doc, "simultaneity_groups", dict, "$")
    groups = {}
    for gid, members in groups_doc.items():
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            raise DeserializeError(f"$.simultaneity_groups.{gid}", "members must be a string list")
        groups[gid] = set(members)

    try:
        return DataflowGraph(nodes, edges, deps, groups)
    except Exception as exc:
        raise DeserializeError("$", f"invariant violation: {exc}") from None
