"""Timebases, the two-way sync exchange, and the energy model.

Clock model: an affine map from true time plus Gaussian read jitter,

    reading(t) = epoch + (1 + (drift_ppm + rate_corr_ppm) * 1e-6) * t
               + init_offset + offset_corr + jitter

with truncation of the rate term to whole nanoseconds. Precision bounds
quoted anywhere in this module cover the deterministic part only; read
jitter is unbounded by nature and reported separately in traces.

The sync exchange is the classic two-way timestamp protocol: each round
estimates the local-vs-reference offset with an error of half the link's
path asymmetry plus a jitter term; averaging n rounds shrinks the jitter
term like 1/sqrt(n) but never the asymmetry half, which is therefore the
achievable floor. A frequency (rate) correction is estimated from the
residual offset accumulated since the previous sync.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ._kernels import round_half_away
from .errors import LinkDown, OverlapError, TooLate, UnachievablePrecision
from .streams import NoiseStream

PPM = 1_000_000
NW_NS_PER_NJ = 1_000_000_000  # nanowatt-nanoseconds per nanojoule

DEFAULT_MAX_ROUNDS = 32
DEFAULT_GUARD_BAND_NS = 1_000_000
DEFAULT_HIGH_PRECISION_FACTOR = 10.0


class Unbounded:
    """Singleton marker for intervals/uncertainties without a finite bound."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unbounded"


UNBOUNDED = Unbounded()


@dataclass(frozen=True)
class ReferenceClock:
    id: str
    freq_error_ppm: float = 0.0
    phase_offset_ns: int = 0
    epoch_ns: int = 0
    jitter_std_ns: float = 0.0

    def __post_init__(self):
        if abs(self.freq_error_ppm) > 10_000:
            raise ValueError(f"clock {self.id}: |freq_error_ppm| above 10^4")
        if self.jitter_std_ns < 0:
            raise ValueError(f"clock {self.id}: negative jitter")


@dataclass(frozen=True)
class Correction:
    applied_at_true_ns: int = 0
    offset_correction_ns: int = 0
    rate_correction_ppm: float = 0.0


@dataclass
class LocalClock:
    id: str
    owner: str = ""
    drift_ppm: float = 0.0
    init_offset_ns: int = 0
    jitter_std_ns: float = 0.0
    epoch_ns: int = 0
    bound_reference: str | None = None
    precision_mode: str = "low"  # "low" | "high"
    high_precision_factor: float = DEFAULT_HIGH_PRECISION_FACTOR
    correction: Correction = field(default_factory=Correction)
    # set by sync(): (true time, achieved bound, measured offset)
    last_sync_true_ns: int | None = None
    last_sync_bound_ns: int | None = None
    read_count: int = 0

    def __post_init__(self):
        if abs(self.drift_ppm) > 10_000:
            raise ValueError(f"clock {self.id}: |drift_ppm| above 10^4")
        if self.jitter_std_ns < 0:
            raise ValueError(f"clock {self.id}: negative jitter")
        if self.high_precision_factor < 1:
            raise ValueError(f"clock {self.id}: high_precision_factor below 1")

    def clone(self) -> "LocalClock":
        return replace(self)


Clock = ReferenceClock | LocalClock


@dataclass(frozen=True)
class PowerModel:
    id: str = "default"
    p_sleep_nw: int = 0
    p_idle_nw: int = 0
    p_highclock_extra_nw: int = 0
    e_exchange_nj: int = 0
    e_radio_wake_nj: int = 0

    def __post_init__(self):
        for name in ("p_sleep_nw", "p_idle_nw", "p_highclock_extra_nw",
                     "e_exchange_nj", "e_radio_wake_nj"):
            if getattr(self, name) < 0:
                raise ValueError(f"power model {self.id}: {name} negative")


@dataclass(frozen=True)
class NetworkLink:
    id: str
    latency_min_ns: int = 0
    latency_mode_ns: int = 0
    latency_jitter_std_ns: float = 0.0
    asymmetry_ns: int = 0
    up: bool = True

    def __post_init__(self):
        if self.latency_min_ns < 0 or self.latency_mode_ns < self.latency_min_ns:
            raise ValueError(f"link {self.id}: need mode >= min >= 0")
        if self.latency_jitter_std_ns < 0:
            raise ValueError(f"link {self.id}: negative jitter")


@dataclass(frozen=True)
class SyncResult:
    achieved_precision_ns: int
    energy_nj: int
    rounds: int
    correction: Correction


# --- reading ---------------------------------------------------------------


def _rate_ppm(clock: Clock) -> float:
    if isinstance(clock, ReferenceClock):
        return clock.freq_error_ppm
    return clock.drift_ppm + clock.correction.rate_correction_ppm


def _static_offset_ns(clock: Clock) -> int:
    if isinstance(clock, ReferenceClock):
        return clock.phase_offset_ns
    return clock.init_offset_ns + clock.correction.offset_correction_ns


def read_deterministic(clock: Clock, true_time_ns: int) -> int:
    """The jitter-free part of a reading."""
    rate = _rate_ppm(clock)
    skew = round_half_away(rate * true_time_ns / PPM) if rate else 0
    return clock.epoch_ns + true_time_ns + skew + _static_offset_ns(clock)


def _effective_jitter_std(clock: Clock) -> float:
    if isinstance(clock, ReferenceClock):
        return clock.jitter_std_ns
    if clock.precision_mode == "high":
        return clock.jitter_std_ns / clock.high_precision_factor
    return clock.jitter_std_ns


def read(clock: Clock, true_time_ns: int, noise: NoiseStream | None = None) -> int:
    """Read the clock at a true instant; jitter drawn from the stream.

    The stream is keyed per clock by the caller; the draw index is the
    read count, so repeated runs reproduce identical readings.
    """
    det = read_deterministic(clock, true_time_ns)
    if noise is None:
        return det
    jitter = noise.gauss_scaled_int(_effective_jitter_std(clock))
    if isinstance(clock, LocalClock):
        clock.read_count += 1
    return det + jitter


def invert_reading(clock: Clock, clock_time_ns: int) -> Fraction:
    """True instant at which the jitter-free reading equals clock_time_ns.

    Uses the exact affine model (no nanosecond truncation), so the
    deterministic reading at the rounded result can differ from the
    target by at most one nanosecond.
    """
    rate = Fraction(1) + Fraction(_rate_ppm(clock)) / PPM
    return (clock_time_ns - clock.epoch_ns - _static_offset_ns(clock)) / rate


def true_time_of_reading(clock: Clock, clock_time_ns: int) -> int:
    return round_half_away_fraction(invert_reading(clock, clock_time_ns))


def round_half_away_fraction(x: Fraction) -> int:
    if x >= 0:
        return int(math.floor(x + Fraction(1, 2)))
    return int(math.ceil(x - Fraction(1, 2)))


def uncertainty_ns(clock: Clock, at_true_ns: int):
    """Bound on |reading - true timeline| drift since the last sync.

    References define their own timeline (0). A never-synced local clock
    is unbounded.
    """
    if isinstance(clock, ReferenceClock):
        return 0
    if clock.last_sync_true_ns is None or clock.last_sync_bound_ns is None:
        return UNBOUNDED
    residual = abs(Fraction(_rate_ppm(clock))) / PPM
    growth = residual * max(0, at_true_ns - clock.last_sync_true_ns)
    return clock.last_sync_bound_ns + int(math.ceil(growth))


# --- synchronization --------------------------------------------------------


def sync_floor_ns(link: NetworkLink) -> int:
    """Best achievable offset bound on this link: half the asymmetry."""
    return abs(link.asymmetry_ns) // 2


def rounds_for_target(link: NetworkLink, target_precision_ns: int,
                      max_rounds: int = DEFAULT_MAX_ROUNDS) -> int:
    """Exchange rounds needed before the a-priori error bound fits the target.

    Bound model: floor + sigma_round / sqrt(n), where sigma_round is the
    per-round jitter error std (link jitter / sqrt(2)). Returns max_rounds
    when the target is never met (best effort).
    """
    sigma_round = link.latency_jitter_std_ns / math.sqrt(2.0)
    if sigma_round == 0.0:
        return 1
    margin = target_precision_ns - sync_floor_ns(link)
    if margin <= 0:
        return max_rounds
    need = math.ceil((sigma_round / margin) ** 2)
    return max(1, min(max_rounds, int(need)))


def sync(
    local: LocalClock,
    reference: Clock,
    target_precision_ns: int,
    link: NetworkLink,
    power: PowerModel,
    noise: NoiseStream,
    at_true_ns: int = 0,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> SyncResult:
    """Two-way exchange sync of a local clock against a reference.

    Applies an offset correction (and, from the second sync on, a rate
    correction) so that immediately afterwards the deterministic parts
    satisfy |local - reference| <= achieved_precision_ns. Raises
    UnachievablePrecision when the target is below the asymmetry floor,
    LinkDown when the link is unavailable.
    """
    if target_precision_ns <= 0:
        raise ValueError("target precision must be positive")
    if not link.up:
        raise LinkDown(link.id)
    floor_ns = sync_floor_ns(link)
    if target_precision_ns < floor_ns:
        raise UnachievablePrecision(floor_ns)

    rounds = rounds_for_target(link, target_precision_ns, max_rounds)
    sigma_round = link.latency_jitter_std_ns / math.sqrt(2.0)
    jitter_mean = noise.gauss_mean(rounds) * sigma_round if sigma_round else 0.0
    est_error_ns = round_half_away(link.asymmetry_ns / 2.0 + jitter_mean)

    offset_true = read_deterministic(local, at_true_ns) - read_deterministic(
        reference, at_true_ns
    )
    measured = offset_true + est_error_ns

    # rate estimate from the offset accumulated since the previous sync
    rate_corr = local.correction.rate_correction_ppm
    if local.last_sync_true_ns is not None and at_true_ns > local.last_sync_true_ns:
        est_ppm = measured * PPM / (at_true_ns - local.last_sync_true_ns)
        est_ppm = max(-1000.0, min(1000.0, est_ppm))
        rate_corr = rate_corr - est_ppm

    # choose the offset correction so the corrected reading at at_true_ns
    # lands exactly measured-offset below the old one
    target_reading = read_deterministic(local, at_true_ns) - measured
    new_rate_total = local.drift_ppm + rate_corr
    skew = round_half_away(new_rate_total * at_true_ns / PPM) if new_rate_total else 0
    offset_corr = (
        target_reading - local.epoch_ns - at_true_ns - skew - local.init_offset_ns
    )

    achieved = max(floor_ns, abs(est_error_ns))
    local.correction = Correction(at_true_ns, offset_corr, rate_corr)
    local.last_sync_true_ns = at_true_ns
    local.last_sync_bound_ns = achieved
    energy = rounds * power.e_exchange_nj + power.e_radio_wake_nj
    return SyncResult(achieved, energy, rounds, local.correction)


def required_resync_interval(drift_ppm: float, precision_ns: int):
    """How long until |drift| alone eats the whole precision budget.

    Exact rational arithmetic, floored to whole nanoseconds; Unbounded
    for a drift-free clock.
    """
    if precision_ns <= 0:
        raise ValueError("precision must be positive")
    if drift_ppm == 0:
        return UNBOUNDED
    interval = Fraction(precision_ns) * PPM / abs(Fraction(drift_ppm))
    return int(math.floor(interval))


def wakeup_plan(
    scheduled_clock_time_ns: int,
    sync_overhead_ns: int,
    current_uncertainty_ns: int,
    guard_band_ns: int = DEFAULT_GUARD_BAND_NS,
    now_clock_time_ns: int = 0,
) -> int:
    """Clock time to wake so resync and the action both land before the
    scheduled instant: scheduled - overhead - uncertainty - guard band.

    Raises TooLate when that instant is already past.
    """
    wake = (
        scheduled_clock_time_ns
        - sync_overhead_ns
        - current_uncertainty_ns
        - guard_band_ns
    )
    if wake < now_clock_time_ns:
        raise TooLate(
            f"wake time {wake} is before current reading {now_clock_time_ns}"
        )
    return wake


# --- energy ------------------------------------------------------------------


_MODE_KEYS = ("sleep", "idle", "high")


def mode_power_nw(power: PowerModel, mode: str) -> int:
    if mode == "sleep":
        return power.p_sleep_nw
    if mode == "idle":
        return power.p_idle_nw
    if mode == "high":
        # awake with the high-precision clock running
        return power.p_idle_nw + power.p_highclock_extra_nw
    raise ValueError(f"unknown mode {mode!r}")


def energy_of_schedule(power: PowerModel, horizon_ns: int, intervals, sync_events=()) -> int:
    """Total energy in whole nanojoules (floored) for one node's timeline.

    intervals: (mode, start_ns, end_ns) with mode in {sleep, idle, high};
    they must not overlap. Time not covered by any interval is charged at
    sleep power. sync_events: iterable of round counts, each costing one
    radio wake plus rounds exchanges.
    """
    spans = sorted((start, end, mode) for mode, start, end in intervals)
    acc_nw_ns = 0
    covered = 0
    prev_end = None
    for start, end, mode in spans:
        if not 0 <= start <= end <= horizon_ns:
            raise ValueError(f"interval ({mode}, {start}, {end}) outside [0, {horizon_ns}]")
        if prev_end is not None and start < prev_end:
            raise OverlapError(f"interval starting at {start} overlaps previous")
        acc_nw_ns += mode_power_nw(power, mode) * (end - start)
        covered += end - start
        prev_end = end
    acc_nw_ns += power.p_sleep_nw * (horizon_ns - covered)
    event_nj = sum(
        power.e_radio_wake_nj + rounds * power.e_exchange_nj for rounds in sync_events
    )
    return acc_nw_ns // NW_NS_PER_NJ + event_nj


# --- cross-domain conversion --------------------------------------------------


def convert(timestamp_ns: int, from_clock: Clock, to_clock: Clock, at_true_ns: int):
    """Map a reading between clock domains through true time.

    Returns (converted reading, uncertainty) where the uncertainty is the
    sum of both clocks' current bounds at at_true_ns (Unbounded if either
    clock has never synchronized). Same-domain conversion is the identity
    with zero uncertainty.
    """
    if from_clock.id == to_clock.id:
        return timestamp_ns, 0
    t_true = invert_reading(from_clock, timestamp_ns)
    rate = Fraction(1) + Fraction(_rate_ppm(to_clock)) / PPM
    reading = (
        to_clock.epoch_ns + t_true * rate + _static_offset_ns(to_clock)
    )
    u_from = uncertainty_ns(from_clock, at_true_ns)
    u_to = uncertainty_ns(to_clock, at_true_ns)
    if u_from is UNBOUNDED or u_to is UNBOUNDED:
        uncertainty = UNBOUNDED
    else:
        uncertainty = u_from + u_to
    return round_half_away_fraction(reading), uncertainty
