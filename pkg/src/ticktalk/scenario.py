"""Scenario files: the world a graph runs in.

JSON with "version": 1 and strictly checked keys (unknown keys are
rejected so typos in timing-critical configs cannot pass silently).
Durations accept either integer nanoseconds or the DSL literal forms
("1us", "100ms"); they normalize to integer ns on load.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .clocks import (
    DEFAULT_GUARD_BAND_NS,
    DEFAULT_HIGH_PRECISION_FACTOR,
    DEFAULT_MAX_ROUNDS,
    LocalClock,
    NetworkLink,
    PowerModel,
    ReferenceClock,
)
from .dsl.ast import NS_PER_UNIT, ClockRef
from .errors import ScenarioError
from .rtm import DEFAULT_EWMA_ALPHA, DEFAULT_GRID_DIVISIONS, Ensemble, Registry

_DURATION_RE = re.compile(r"^(\d+)(ns|us|ms|s)$")


@dataclass
class Defaults:
    guard_band_ns: int = DEFAULT_GUARD_BAND_NS
    max_rounds: int = DEFAULT_MAX_ROUNDS
    ewma_alpha: float = DEFAULT_EWMA_ALPHA
    phase_grid_divisions: int = DEFAULT_GRID_DIVISIONS
    high_precision_factor: float = DEFAULT_HIGH_PRECISION_FACTOR
    capture_lead_ns: int = 5_000_000
    sync_enabled: bool = True


@dataclass(frozen=True)
class OpDecl:
    exec_bounds: tuple  # (best_ns, worst_ns)
    truthy_after: int | None = None


@dataclass(frozen=True)
class ResidentTenant:
    id: str
    ensemble: str
    op: str
    period_ns: int
    clock: str


@dataclass
class Scenario:
    registry: Registry
    defaults: Defaults
    epoch_label: str = ""
    trajectory: list = field(default_factory=list)  # (t_ns, x, y), strictly increasing t
    opaque_ops: dict = field(default_factory=dict)  # op -> OpDecl
    self_binding: str = ""
    named_clocks: dict = field(default_factory=dict)
    residents: list = field(default_factory=list)

    def position_at(self, t_ns: int) -> tuple[float, float]:
        """Target position, piecewise-linear between waypoints, clamped."""
        tr = self.trajectory
        if not tr:
            return (0.0, 0.0)
        if t_ns <= tr[0][0]:
            return (tr[0][1], tr[0][2])
        for (t0, x0, y0), (t1, x1, y1) in zip(tr, tr[1:]):
            if t_ns <= t1:
                f = (t_ns - t0) / (t1 - t0)
                return (x0 + f * (x1 - x0), y0 + f * (y1 - y0))
        return (tr[-1][1], tr[-1][2])

    def resolve_clock_id(self, ref: ClockRef) -> str:
        if ref.is_self:
            if not self.self_binding:
                raise ScenarioError("$.self_binding", "program uses `self` but none is bound")
            return self.self_binding
        name = ref.name
        if name in self.named_clocks:
            return self.named_clocks[name]
        if name in self.registry.clocks:
            return name
        raise ScenarioError("$.named_clocks", f"unknown clock reference {name!r}")

    def exec_bounds(self, ensemble: Ensemble, op: str) -> tuple:
        bounds = ensemble.exec_time_bounds.get(op)
        if bounds is not None:
            return bounds
        decl = self.opaque_ops.get(op)
        if decl is not None:
            return decl.exec_bounds
        raise ScenarioError(
            "$.ensembles", f"no execution bounds for op {op!r} on ensemble {ensemble.id}"
        )


def parse_duration_ns(value, path: str) -> int:
    if isinstance(value, bool):
        raise ScenarioError(path, "booleans are not durations")
    if isinstance(value, int):
        if value < 0:
            raise ScenarioError(path, "durations must be non-negative")
        return value
    if isinstance(value, str):
        m = _DURATION_RE.match(value)
        if not m:
            raise ScenarioError(path, f"bad duration literal {value!r}")
        return int(m.group(1)) * NS_PER_UNIT[m.group(2)]
    raise ScenarioError(path, f"bad duration {value!r}")


class _Reader:
    """Typed key extraction with unknown-key rejection."""

    def __init__(self, obj, path: str):
        if not isinstance(obj, dict):
            raise ScenarioError(path, "expected an object")
        self.obj = obj
        self.path = path
        self.seen: set = set()

    def get(self, key, types, default=None, required=False):
        self.seen.add(key)
        if key not in self.obj:
            if required:
                raise ScenarioError(f"{self.path}.{key}", "missing required key")
            return default
        value = self.obj[key]
        if types is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, types) or (types is not bool and isinstance(value, bool)):
            raise ScenarioError(f"{self.path}.{key}", f"bad type {type(value).__name__}")
        return value

    def duration(self, key, default=None, required=False):
        self.seen.add(key)
        if key not in self.obj:
            if required:
                raise ScenarioError(f"{self.path}.{key}", "missing required key")
            return default
        return parse_duration_ns(self.obj[key], f"{self.path}.{key}")

    def finish(self):
        unknown = set(self.obj) - self.seen
        if unknown:
            raise ScenarioError(self.path, f"unknown keys {sorted(unknown)}")


def _parse_defaults(obj, path) -> Defaults:
    r = _Reader(obj or {}, path)
    d = Defaults(
        guard_band_ns=r.duration("guard_band", DEFAULT_GUARD_BAND_NS),
        max_rounds=r.get("max_rounds", int, DEFAULT_MAX_ROUNDS),
        ewma_alpha=r.get("ewma_alpha", float, DEFAULT_EWMA_ALPHA),
        phase_grid_divisions=r.get("phase_grid_divisions", int, DEFAULT_GRID_DIVISIONS),
        high_precision_factor=r.get("high_precision_factor", float, DEFAULT_HIGH_PRECISION_FACTOR),
        capture_lead_ns=r.duration("capture_lead", 5_000_000),
        sync_enabled=r.get("sync_enabled", bool, True),
    )
    r.finish()
    if d.max_rounds < 1 or d.phase_grid_divisions < 1:
        raise ScenarioError(path, "max_rounds and phase_grid_divisions must be >= 1")
    if not 0 < d.ewma_alpha <= 1:
        raise ScenarioError(path, "ewma_alpha must be in (0, 1]")
    return d


def _parse_exec_bounds(obj, path) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ScenarioError(path, "expected op -> [best, worst] map")
    bounds = {}
    for op, pair in obj.items():
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScenarioError(f"{path}.{op}", "expected [best, worst]")
        best = parse_duration_ns(pair[0], f"{path}.{op}[0]")
        worst = parse_duration_ns(pair[1], f"{path}.{op}[1]")
        if worst < best:
            raise ScenarioError(f"{path}.{op}", "worst must be >= best")
        bounds[op] = (best, worst)
    return bounds


def load_scenario(text: str, path_label: str = "$") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(path_label, f"not valid JSON: {exc}") from None
    r = _Reader(doc, path_label)

    version = r.get("version", int, required=True)
    if version != 1:
        raise ScenarioError(f"{path_label}.version", f"unsupported version {version}")
    epoch_label = r.get("epoch_label", str, "")
    defaults = _parse_defaults(r.get("defaults", dict, {}), f"{path_label}.defaults")

    registry = Registry()

    for i, c in enumerate(r.get("reference_clocks", list, []) or []):
        cr = _Reader(c, f"{path_label}.reference_clocks[{i}]")
        clock = ReferenceClock(
            id=cr.get("id", str, required=True),
            freq_error_ppm=cr.get("freq_error_ppm", float, 0.0),
            phase_offset_ns=cr.get("phase_offset_ns", int, 0),
            epoch_ns=cr.get("epoch_ns", int, 0),
            jitter_std_ns=cr.get("jitter_std_ns", float, 0.0),
        )
        cr.finish()
        if clock.id in registry.clocks:
            raise ScenarioError(cr.path, f"duplicate clock id {clock.id}")
        registry.clocks[clock.id] = clock

    for i, c in enumerate(r.get("local_clocks", list, []) or []):
        cr = _Reader(c, f"{path_label}.local_clocks[{i}]")
        clock = LocalClock(
            id=cr.get("id", str, required=True),
            owner=cr.get("owner", str, ""),
            drift_ppm=cr.get("drift_ppm", float, 0.0),
            init_offset_ns=cr.get("init_offset_ns", int, 0),
            jitter_std_ns=cr.get("jitter_std_ns", float, 0.0),
            epoch_ns=cr.get("epoch_ns", int, 0),
            bound_reference=cr.get("bound_reference", str),
            high_precision_factor=defaults.high_precision_factor,
        )
        cr.finish()
        if clock.id in registry.clocks:
            raise ScenarioError(cr.path, f"duplicate clock id {clock.id}")
        registry.clocks[clock.id] = clock

    for i, l in enumerate(r.get("links", list, []) or []):
        lr = _Reader(l, f"{path_label}.links[{i}]")
        try:
            link = NetworkLink(
                id=lr.get("id", str, required=True),
                latency_min_ns=lr.duration("latency_min", 0),
                latency_mode_ns=lr.duration("latency_mode", 0),
                latency_jitter_std_ns=float(lr.duration("latency_jitter_std", 0)),
                asymmetry_ns=lr.duration("asymmetry", 0),
                up=lr.get("up", bool, True),
            )
        except ValueError as exc:
            raise ScenarioError(lr.path, str(exc)) from None
        lr.finish()
        if link.id in registry.links:
            raise ScenarioError(lr.path, f"duplicate link id {link.id}")
        registry.links[link.id] = link

    for i, p in enumerate(r.get("power_models", list, []) or []):
        pr = _Reader(p, f"{path_label}.power_models[{i}]")
        try:
            model = PowerModel(
                id=pr.get("id", str, required=True),
                p_sleep_nw=pr.get("p_sleep_nw", int, 0),
                p_idle_nw=pr.get("p_idle_nw", int, 0),
                p_highclock_extra_nw=pr.get("p_highclock_extra_nw", int, 0),
                e_exchange_nj=pr.get("e_exchange_nj", int, 0),
                e_radio_wake_nj=pr.get("e_radio_wake_nj", int, 0),
            )
        except ValueError as exc:
            raise ScenarioError(pr.path, str(exc)) from None
        pr.finish()
        registry.power_models[model.id] = model

    for i, e in enumerate(r.get("ensembles", list, []) or []):
        er = _Reader(e, f"{path_label}.ensembles[{i}]")
        position = er.get("position", list, [0, 0])
        if len(position) != 2 or not all(isinstance(v, (int, float)) for v in position):
            raise ScenarioError(f"{er.path}.position", "expected [x, y]")
        caps = er.get("capabilities", list, required=True)
        try:
            ensemble = Ensemble(
                id=er.get("id", str, required=True),
                position=(float(position[0]), float(position[1])),
                capabilities=set(caps),
                local_clock=er.get("local_clock", str, required=True),
                power=er.get("power", str, ""),
                link=er.get("link", str, required=True),
                exec_time_bounds=_parse_exec_bounds(
                    er.get("exec_time_bounds", dict, {}), f"{er.path}.exec_time_bounds"
                ),
                role=er.get("role", str),
                admin_domain=er.get("admin_domain", str),
            )
        except ValueError as exc:
            raise ScenarioError(er.path, str(exc)) from None
        er.finish()
        if ensemble.id in registry.ensembles:
            raise ScenarioError(er.path, f"duplicate ensemble id {ensemble.id}")
        registry.ensembles[ensemble.id] = ensemble
        if ensemble.admin_domain:
            registry.admin_domain[ensemble.id] = ensemble.admin_domain

    for i, pair in enumerate(r.get("syntonizable", list, []) or []):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScenarioError(f"{path_label}.syntonizable[{i}]", "expected [clockA, clockB]")
        registry.syntonizable.add(frozenset(pair))

    self_binding = r.get("self_binding", str, "")
    named_clocks = r.get("named_clocks", dict, {}) or {}
    for name, cid in named_clocks.items():
        if cid not in registry.clocks:
            raise ScenarioError(f"{path_label}.named_clocks.{name}", f"unknown clock {cid!r}")
    if self_binding and self_binding not in registry.clocks:
        raise ScenarioError(f"{path_label}.self_binding", f"unknown clock {self_binding!r}")

    trajectory = []
    for i, w in enumerate(r.get("target_trajectory", list, []) or []):
        wr = _Reader(w, f"{path_label}.target_trajectory[{i}]")
        t = wr.duration("t", required=True)
        x = wr.get("x", float, required=True)
        y = wr.get("y", float, required=True)
        wr.finish()
        trajectory.append((t, x, y))
    for (t0, _, _), (t1, _, _) in zip(trajectory, trajectory[1:]):
        if t1 <= t0:
            raise ScenarioError(
                f"{path_label}.target_trajectory", "timestamps must strictly increase"
            )

    opaque_ops = {}
    for op, decl in (r.get("opaque_ops", dict, {}) or {}).items():
        dr = _Reader(decl, f"{path_label}.opaque_ops.{op}")
        pair = dr.get("exec_bounds", list, required=True)
        if len(pair) != 2:
            raise ScenarioError(dr.path, "exec_bounds must be [best, worst]")
        best = parse_duration_ns(pair[0], f"{dr.path}.exec_bounds[0]")
        worst = parse_duration_ns(pair[1], f"{dr.path}.exec_bounds[1]")
        if worst < best:
            raise ScenarioError(dr.path, "worst must be >= best")
        truthy_after = dr.get("truthy_after", int)
        dr.finish()
        opaque_ops[op] = OpDecl((best, worst), truthy_after)

    residents = []
    for i, t in enumerate(r.get("resident_tenants", list, []) or []):
        tr = _Reader(t, f"{path_label}.resident_tenants[{i}]")
        residents.append(
            ResidentTenant(
                id=tr.get("id", str, required=True),
                ensemble=tr.get("ensemble", str, required=True),
                op=tr.get("op", str, required=True),
                period_ns=tr.duration("period", required=True),
                clock=tr.get("clock", str, required=True),
            )
        )
        tr.finish()

    r.finish()
    try:
        registry.check()
    except ValueError as exc:
        raise ScenarioError(path_label, str(exc)) from None

    for resident in residents:
        if resident.ensemble not in registry.ensembles:
            raise ScenarioError(
                f"{path_label}.resident_tenants", f"unknown ensemble {resident.ensemble!r}"
            )
        if resident.clock not in registry.clocks:
            raise ScenarioError(
                f"{path_label}.resident_tenants", f"unknown clock {resident.clock!r}"
            )

    scenario = Scenario(
        registry=registry,
        defaults=defaults,
        epoch_label=epoch_label,
        trajectory=trajectory,
        opaque_ops=opaque_ops,
        self_binding=self_binding,
        named_clocks=named_clocks,
        residents=residents,
    )
    for clock in registry.clocks.values():
        if isinstance(clock, LocalClock):
            clock.high_precision_factor = defaults.high_precision_factor
    return scenario


def load_scenario_file(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read(), path_label=path)
