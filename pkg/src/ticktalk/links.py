"""Link latency sampling.

One-way latency is min + a lognormal excess whose mode sits at
(mode - min): excess = (mode - min) * exp(sigma * z) with sigma chosen as
the coefficient of variation jitter_std / (mode - min). The draw is
deterministic per (seed, link, index) and never dips below the link's
minimum. With zero jitter the sample is exactly the mode. A degenerate
link (mode == min) with jitter uses a half-normal excess instead.
"""

from __future__ import annotations

import math

from ._kernels import round_half_away
from .clocks import NetworkLink
from .errors import LinkDown
from .streams import NoiseStream


def sample_latency_ns(link: NetworkLink, noise: NoiseStream) -> int:
    """One deterministic one-way latency draw for this link."""
    if not link.up:
        raise LinkDown(link.id)
    if link.latency_jitter_std_ns == 0.0:
        noise.idx += 1  # keep indices aligned with the jittery path
        return link.latency_mode_ns
    spread = link.latency_mode_ns - link.latency_min_ns
    z = noise.gauss()
    if spread == 0:
        return link.latency_min_ns + abs(round_half_away(z * link.latency_jitter_std_ns))
    sigma = link.latency_jitter_std_ns / spread
    excess = spread * math.exp(sigma * z)
    return link.latency_min_ns + round_half_away(excess)
