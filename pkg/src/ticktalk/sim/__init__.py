"""Deterministic discrete-event simulation of placed dataflow graphs."""

from .checks import check_latency, measure_simultaneity
from .engine import Engine, run
from .trace import metrics_to_json, trace_to_jsonl

__all__ = [
    "Engine",
    "check_latency",
    "measure_simultaneity",
    "metrics_to_json",
    "run",
    "trace_to_jsonl",
]
