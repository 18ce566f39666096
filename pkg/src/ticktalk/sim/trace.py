"""Trace records and output encoding.

A trace is a list of dicts with a fixed key order:
{"t_true_ns", "t_clock_ns", "ensemble", "node", "action", "detail"}.
Encoding is compact JSON, one record per line, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json


def record(t_true_ns: int, t_clock_ns: int, ensemble, node, action: str, detail=None) -> dict:
    return {
        "t_true_ns": t_true_ns,
        "t_clock_ns": t_clock_ns,
        "ensemble": ensemble,
        "node": node,
        "action": action,
        "detail": detail if detail is not None else {},
    }


def trace_to_jsonl(trace) -> str:
    lines = [json.dumps(rec, separators=(",", ":")) for rec in trace]
    return "\n".join(lines) + ("\n" if lines else "")


def metrics_to_json(metrics: dict) -> str:
    return json.dumps(metrics, separators=(",", ":"), sort_keys=False) + "\n"
