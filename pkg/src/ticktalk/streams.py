"""Per-entity deterministic random streams.

Every stochastic quantity in a run is drawn from a stream keyed by
(run seed, entity name); the draw index is the counter. Streams are
independent: adding draws on one entity never shifts another entity's
values, which keeps traces comparable across scenario variations.
"""

from __future__ import annotations

from . import _kernels as K


class NoiseStream:
    def __init__(self, seed: int, name: str):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self.key = K.fnv1a_64(name)
        self.idx = 0

    def uniform(self) -> float:
        v = K.uniform01(self.seed, self.key, self.idx)
        self.idx += 1
        return v

    def gauss(self) -> float:
        v = K.gauss(self.seed, self.key, self.idx)
        self.idx += 1
        return v

    def gauss_scaled_int(self, std: float) -> int:
        """One Gaussian draw scaled by std, rounded to integer ns.

        Always consumes exactly one index so call sites stay aligned
        whether or not the std is zero.
        """
        if std == 0.0:
            self.idx += 1
            return 0
        v = K.gauss(self.seed, self.key, self.idx)
        self.idx += 1
        return K.round_half_away(v * std)

    def gauss_mean(self, n: int) -> float:
        """Mean of the next n standard normal draws."""
        v = K.gauss_mean(self.seed, self.key, self.idx, n)
        self.idx += n
        return v

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        if hi == lo:
            self.idx += 1
            return lo
        u = K.uniform01(self.seed, self.key, self.idx)
        self.idx += 1
        return lo + min(hi - lo, int(u * (hi - lo + 1)))


class StreamPool:
    """Lazily creates one NoiseStream per entity name for a fixed seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._streams: dict[str, NoiseStream] = {}

    def get(self, name: str) -> NoiseStream:
        st = self._streams.get(name)
        if st is None:
            st = NoiseStream(self.seed, name)
            self._streams[name] = st
        return st
