"""Run-time manager: recruitment, placement, sync domains, multi-tenant
harmonization, and latency feedback.

All query operations here are pure functions over the registry; admission
and sync-domain establishment return decisions/results that the caller
(the simulation engine) commits. That keeps rejected requests free of
side effects, so one tenant's admission attempt can never perturb
another tenant's clocks or trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .clocks import (
    UNBOUNDED,
    Clock,
    LocalClock,
    NetworkLink,
    PowerModel,
    SyncResult,
    Unbounded,
    required_resync_interval,
    sync,
    sync_floor_ns,
)
from .errors import LinkDown, NoFeasiblePlacement, PrecisionUnachievable, UnachievablePrecision
from .ir.model import CodeBlock, DataflowGraph, Frequency

# placement marker for set-expanding nodes resolved per recruitment
RECRUITED = "*recruited*"

DEFAULT_GRID_DIVISIONS = 100
DEFAULT_EWMA_ALPHA = 0.2


@dataclass
class Ensemble:
    """A node that accepts code blocks: position, capabilities, timing."""

    id: str
    position: tuple[float, float] = (0.0, 0.0)
    capabilities: set = field(default_factory=set)
    local_clock: str = ""
    power: str = ""
    link: str = ""
    exec_time_bounds: dict = field(default_factory=dict)  # op -> (best_ns, worst_ns)
    role: str | None = None
    admin_domain: str | None = None

    def __post_init__(self):
        if not self.capabilities:
            raise ValueError(f"ensemble {self.id}: capabilities must be nonempty")
        for op, (best, worst) in self.exec_time_bounds.items():
            if worst < best or best < 0:
                raise ValueError(f"ensemble {self.id}: bad exec bounds for {op}")


@dataclass
class Registry:
    ensembles: dict = field(default_factory=dict)
    clocks: dict = field(default_factory=dict)  # id -> ReferenceClock | LocalClock
    links: dict = field(default_factory=dict)
    power_models: dict = field(default_factory=dict)
    syntonizable: set = field(default_factory=set)  # frozenset pairs of clock ids
    admin_domain: dict = field(default_factory=dict)

    def check(self):
        for e in self.ensembles.values():
            if e.local_clock not in self.clocks:
                raise ValueError(f"ensemble {e.id}: unknown clock {e.local_clock}")
            if e.link not in self.links:
                raise ValueError(f"ensemble {e.id}: unknown link {e.link}")
            if e.power and e.power not in self.power_models:
                raise ValueError(f"ensemble {e.id}: unknown power model {e.power}")
        for pair in self.syntonizable:
            for cid in pair:
                if cid not in self.clocks:
                    raise ValueError(f"syntonizable pair names unknown clock {cid}")
        for eid in self.admin_domain:
            if eid not in self.ensembles:
                raise ValueError(f"admin domain maps unknown ensemble {eid}")

    @property
    def leader(self) -> str | None:
        leaders = sorted(e.id for e in self.ensembles.values() if e.role == "leader")
        return leaders[0] if leaders else None

    def syntonizable_pair(self, a: str, b: str) -> bool:
        return a == b or frozenset((a, b)) in self.syntonizable


# --- recruitment -------------------------------------------------------------


def get_sensors(registry: Registry, center, radius_m: float, required_capability=None):
    """Ensemble ids within the closed ball of radius_m around center,
    filtered by capability, sorted by id."""
    if radius_m <= 0:
        raise ValueError("radius must be positive")
    cx, cy = center
    found = []
    for e in registry.ensembles.values():
        if required_capability is not None and required_capability not in e.capabilities:
            continue
        dx = e.position[0] - cx
        dy = e.position[1] - cy
        if math.hypot(dx, dy) <= radius_m:
            found.append(e.id)
    return sorted(found)


def re_recruit(previous, center, radius_m: float, registry: Registry, required_capability=None):
    """Recompute membership at a new center: (joined, departed, retained)."""
    current = set(get_sensors(registry, center, radius_m, required_capability))
    prev = set(previous)
    return sorted(current - prev), sorted(prev - current), sorted(current & prev)


# --- placement ---------------------------------------------------------------


def place(graph: DataflowGraph, registry: Registry, tenancy=None) -> dict:
    """Assign every node to a capable ensemble.

    Set-expanding nodes get the RECRUITED marker and are resolved per
    recruitment round. Everything else prefers the leader when capable,
    otherwise the lowest-id capable ensemble.
    """
    placement: dict[str, str] = {}
    leader = registry.leader
    for node in graph.nodes:
        if node.set_expand:
            placement[node.id] = RECRUITED
            continue
        capable = sorted(
            e.id for e in registry.ensembles.values() if node.op in e.capabilities
        )
        if not capable:
            raise NoFeasiblePlacement(node.id, f"no ensemble offers capability {node.op!r}")
        placement[node.id] = leader if leader in capable else capable[0]
    return placement


# --- sync domains --------------------------------------------------------------


@dataclass(frozen=True)
class SyncToken:
    ensemble: str
    achieved_precision_ns: int
    established_at_true_ns: int
    validity_ns: object  # int or UNBOUNDED

    def valid_at(self, true_ns: int) -> bool:
        if isinstance(self.validity_ns, Unbounded):
            return True
        return true_ns <= self.established_at_true_ns + self.validity_ns


@dataclass(frozen=True)
class SyncDomain:
    id: str
    members: tuple
    reference: str
    precision_ns: int
    established_at_true_ns: int
    validity_ns: object  # int or UNBOUNDED


def establish_sync_domain(
    domain_id: str,
    members,
    reference: Clock,
    precision_ns: int,
    clock_of,
    link_of,
    power_of,
    noise_of,
    at_true_ns: int = 0,
    max_rounds: int = 32,
    enabled: bool = True,
):
    """Sync every member against the reference and issue tokens.

    clock_of/link_of/power_of/noise_of map an ensemble id to its virtual
    LocalClock, NetworkLink, PowerModel and NoiseStream. Returns
    (SyncDomain, tokens dict, results dict); raises PrecisionUnachievable
    or LinkDown on any member, in which case nothing is issued.

    With ``enabled`` false the exchange is skipped entirely: tokens are
    issued pro forma (no corrections, unlimited validity) so downstream
    firing rules still pass. That models an application that assumes
    synchronization without actually performing it.
    """
    members = sorted(members)
    if not members:
        raise ValueError("sync domain needs at least one member")

    if not enabled:
        tokens = {
            m: SyncToken(m, 0, at_true_ns, UNBOUNDED) for m in members
        }
        domain = SyncDomain(domain_id, tuple(members), reference.id, precision_ns,
                            at_true_ns, UNBOUNDED)
        return domain, tokens, {}

    results: dict[str, SyncResult] = {}
    validity = UNBOUNDED
    for member in members:
        clock = clock_of(member)
        if clock.id == reference.id:
            results[member] = SyncResult(0, 0, 1, clock.correction)
            clock.last_sync_true_ns = at_true_ns
            clock.last_sync_bound_ns = 0
        else:
            link = link_of(member)
            try:
                results[member] = sync(
                    clock,
                    reference,
                    precision_ns,
                    link,
                    power_of(member),
                    noise_of(member),
                    at_true_ns=at_true_ns,
                    max_rounds=max_rounds,
                )
            except UnachievablePrecision as exc:
                raise PrecisionUnachievable(member, exc.floor_ns) from None
            except LinkDown as exc:
                raise LinkDown(exc.link_id, member=member) from None
        interval = required_resync_interval(clock.drift_ppm, precision_ns)
        if not isinstance(interval, Unbounded):
            validity = interval if isinstance(validity, Unbounded) else min(validity, interval)

    tokens = {
        m: SyncToken(m, results[m].achieved_precision_ns, at_true_ns, validity)
        for m in members
    }
    domain = SyncDomain(domain_id, tuple(members), reference.id, precision_ns,
                        at_true_ns, validity)
    return domain, tokens, results


# --- multi-tenant harmonization -------------------------------------------------


@dataclass(frozen=True)
class ReservedWindow:
    phase_ns: int
    width_ns: int
    period_ns: int


@dataclass(frozen=True)
class TenantEntry:
    block_id: str
    clock: str  # resolved clock id
    window: ReservedWindow | None = None


@dataclass
class Tenancy:
    """Admitted blocks per ensemble; windows on one ensemble are exclusive."""

    entries: dict = field(default_factory=dict)  # ensemble id -> list[TenantEntry]

    def on(self, ensemble_id: str):
        return self.entries.get(ensemble_id, [])

    def admit(self, ensemble_id: str, entry: TenantEntry):
        self.entries.setdefault(ensemble_id, []).append(entry)


@dataclass(frozen=True)
class Accept:
    block_id: str
    clock: str
    window: ReservedWindow | None


@dataclass(frozen=True)
class ConflictReport:
    kind: str  # ClockIncompatible | WindowInfeasible | CapabilityMissing | PrecisionUnachievable
    blocks: tuple
    explanation: str

    def __post_init__(self):
        if not self.explanation:
            raise ValueError("conflict report needs an explanation")


def _windows_overlap(a: ReservedWindow, b: ReservedWindow, hyperperiod: int) -> bool:
    for i in range(hyperperiod // a.period_ns):
        a0 = a.phase_ns + i * a.period_ns
        a1 = a0 + a.width_ns
        for j in range(hyperperiod // b.period_ns):
            b0 = b.phase_ns + j * b.period_ns
            if a0 < b0 + b.width_ns and b0 < a1:
                return True
    return False


def harmonize(
    tenancy: Tenancy,
    new_block: CodeBlock,
    ensemble: Ensemble,
    registry: Registry,
    resolved_clock: str,
    grid_divisions: int = DEFAULT_GRID_DIVISIONS,
):
    """Admission decision for one block on one ensemble.

    Clock compatibility: bindings are compatible when they resolve to the
    same clock or the pair is declared syntonizable. For blocks with a
    Frequency constraint, a reservation phase is searched on a grid of
    gcd(periods)/grid_divisions; the first overlap-free phase wins.
    Returns Accept or ConflictReport; the caller commits an Accept via
    tenancy.admit.
    """
    if new_block.op not in ensemble.capabilities:
        return ConflictReport(
            "CapabilityMissing",
            (new_block.id,),
            f"ensemble {ensemble.id} lacks capability {new_block.op!r}",
        )

    for tenant in tenancy.on(ensemble.id):
        if not registry.syntonizable_pair(tenant.clock, resolved_clock):
            return ConflictReport(
                "ClockIncompatible",
                (tenant.block_id, new_block.id),
                f"clock {resolved_clock} is not syntonizable with {tenant.clock}",
            )

    periods = [c.period_ns for c in new_block.constraints if isinstance(c, Frequency)]
    if not periods:
        return Accept(new_block.id, resolved_clock, None)
    period = min(periods)
    width = ensemble.exec_time_bounds[new_block.op][1]

    existing = [t.window for t in tenancy.on(ensemble.id) if t.window is not None]
    all_periods = [w.period_ns for w in existing] + [period]
    step = math.gcd(*all_periods) // grid_divisions
    step = max(1, step)
    hyper = math.lcm(*all_periods)

    phase = 0
    while phase < period:
        candidate = ReservedWindow(phase, width, period)
        if not any(_windows_overlap(candidate, w, hyper) for w in existing):
            return Accept(new_block.id, resolved_clock, candidate)
        phase += step
    return ConflictReport(
        "WindowInfeasible",
        tuple(sorted({t.block_id for t in tenancy.on(ensemble.id)} | {new_block.id})),
        f"no phase on the {step} ns grid fits width {width} ns every {period} ns",
    )


# --- latency feedback ------------------------------------------------------------


@dataclass(frozen=True)
class LinkEstimate:
    mode_ns: float
    jitter_ns: float


def feedback_update(estimates: dict, samples: dict, alpha: float = DEFAULT_EWMA_ALPHA) -> dict:
    """Fold observed per-link latencies into EWMA estimates.

    Links without samples keep their estimate object untouched. Returns a
    new dict; inputs are not mutated.
    """
    updated = dict(estimates)
    for link_id in sorted(samples):
        if not samples[link_id]:
            continue
        est = updated[link_id]
        mode, jitter = est.mode_ns, est.jitter_ns
        for s in samples[link_id]:
            deviation = abs(s - mode)
            mode = (1.0 - alpha) * mode + alpha * s
            jitter = (1.0 - alpha) * jitter + alpha * deviation
        updated[link_id] = LinkEstimate(mode, jitter)
    return updated


def suggested_guard_band_ns(estimate: LinkEstimate, base_guard_ns: int) -> int:
    """Guard band sized to the current link jitter estimate (3 sigma)."""
    return max(base_guard_ns, int(math.ceil(3.0 * estimate.jitter_ns)))
