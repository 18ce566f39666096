"""Post-hoc measurements over traces.

Both checks work purely on trace records so they can audit a stored
JSONL file as easily as a live run. Fire records carry the firing's
token lineage ({origin node: firing index}) in their detail, which is
what ties a sink firing back to the source firing that caused it.
"""

from __future__ import annotations

from ..errors import IncompleteGroup


def _fires(trace, node_id: str):
    return [r for r in trace if r["action"] == "fire" and r["detail"].get("of", r["node"]) == node_id]


def measure_simultaneity(trace, group_members):
    """Spread and per-member deviations for one simultaneity group.

    group_members: instance ids expected to act together (one per
    ensemble). When members fired in several rounds (loop epochs), each
    round is measured separately; returns (spreads, deviations) where
    spreads is a list of integer ns per complete round and deviations
    maps member -> deviation from the round mean for the last round.
    Raises IncompleteGroup when a member never fired at all.
    """
    members = sorted(group_members)
    by_member = {}
    for m in members:
        times = [r["t_true_ns"] for r in trace if r["action"] == "fire" and r["node"] == m]
        if not times:
            raise IncompleteGroup("group", {m})
        by_member[m] = times
    rounds = min(len(t) for t in by_member.values())
    spreads = []
    deviations = {}
    for i in range(rounds):
        times = {m: by_member[m][i] for m in members}
        spread = max(times.values()) - min(times.values())
        spreads.append(spread)
        mean = sum(times.values()) / len(times)
        deviations = {m: times[m] - mean for m in members}
    return spreads, deviations


def check_latency(trace, source: str, sink: str, bound_ns):
    """Match source firings to consequent sink firings by token lineage.

    Returns (violations, unmatched): a violation per matched pair whose
    latency strictly exceeds the bound (the bound itself is allowed); an
    unmatched entry per sink firing with no source in its lineage and per
    source firing that never reached the sink.
    """
    source_fires = _fires(trace, source)
    sink_fires = _fires(trace, sink)
    violations = []
    unmatched = []
    matched_sources = set()
    for r in sink_fires:
        lineage = r["detail"].get("lineage", {})
        if source not in lineage:
            unmatched.append({"kind": "sink_without_source", "sink_t_ns": r["t_true_ns"]})
            continue
        k = lineage[source]
        if k >= len(source_fires):
            unmatched.append({"kind": "missing_source_firing", "index": k})
            continue
        matched_sources.add(k)
        latency = r["t_true_ns"] - source_fires[k]["t_true_ns"]
        if bound_ns is not None and latency > bound_ns:
            violations.append(
                {
                    "source": source,
                    "sink": sink,
                    "source_t_ns": source_fires[k]["t_true_ns"],
                    "sink_t_ns": r["t_true_ns"],
                    "latency_ns": latency,
                    "bound_ns": bound_ns,
                }
            )
    for k in range(len(source_fires)):
        if k not in matched_sources:
            unmatched.append({"kind": "source_without_sink", "index": k})
    return violations, unmatched
