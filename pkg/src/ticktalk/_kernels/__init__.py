"""Deterministic numeric kernels with a compiled fast path.

The simulator draws every random quantity from a counter-based generator
keyed by (seed, entity key, draw index), so identical inputs reproduce
identical runs regardless of event interleaving. These draws sit on the
hot path of seed sweeps, hence the Cython backend. The pure-Python
backend is the reference; the compiled one must match it bit for bit
(asserted by the test suite) so a run is byte-reproducible under either.

Set TICKTALK_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import pykernels

if os.environ.get("TICKTALK_PURE_PYTHON"):
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

mix3_u64 = _impl.mix3_u64
uniform01 = _impl.uniform01
gauss = _impl.gauss
gauss_mean = _impl.gauss_mean
round_half_away = _impl.round_half_away

fnv1a_64 = pykernels.fnv1a_64

__all__ = [
    "BACKEND",
    "mix3_u64",
    "uniform01",
    "gauss",
    "gauss_mean",
    "round_half_away",
    "fnv1a_64",
    "pykernels",
]
