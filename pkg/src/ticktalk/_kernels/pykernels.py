"""Pure-Python reference implementation of the deterministic kernels.

Numeric contract (shared verbatim with the Cython backend):

* ``mix3_u64`` chains a splitmix64-style finalizer over the three inputs.
  It is stateless: the value for (seed, key, index) never depends on
  earlier draws, which is what makes per-entity streams independent.
* ``uniform01`` maps the top 53 bits of the hash to ((k + 0.5) * 2**-53),
  strictly inside (0, 1) so the normal inverse CDF is always finite.
* ``gauss`` is the inverse normal CDF of that uniform, evaluated with the
  standard Acklam rational approximation (|rel err| < 1.15e-9). Only
  +, -, *, /, sqrt and log are used; with the same libm both backends
  produce identical doubles.
* ``round_half_away`` rounds halves away from zero (llround semantics),
  pinned here because Python's round() is half-to-even.
"""

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0

# Acklam inverse-normal-CDF coefficients.
_A0 = -3.969683028665376e+01
_A1 = 2.209460984245205e+02
_A2 = -2.759285104469687e+02
_A3 = 1.383577518672690e+02
_A4 = -3.066479806614716e+01
_A5 = 2.506628277459239e+00
_B0 = -5.447609879822406e+01
_B1 = 1.615858368580409e+02
_B2 = -1.556989798598866e+02
_B3 = 6.680131188771972e+01
_B4 = -1.328068155288572e+01
_C0 = -7.784894002430293e-03
_C1 = -3.223964580411365e-01
_C2 = -2.400758277161838e+00
_C3 = -2.549732539343734e+00
_C4 = 4.374664141464968e+00
_C5 = 2.938163982698783e+00
_D0 = 7.784695709041462e-03
_D1 = 3.224671290700398e-01
_D2 = 2.445134137142996e+00
_D3 = 3.754408661907416e+00
_P_LOW = 0.02425


def _splitmix(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix3_u64(a: int, b: int, c: int) -> int:
    """Counter-based 64-bit hash of (a, b, c); inputs taken mod 2**64."""
    h = _splitmix(a & _MASK)
    h = _splitmix(h ^ (b & _MASK))
    h = _splitmix(h ^ (c & _MASK))
    return h


def uniform01(a: int, b: int, c: int) -> float:
    """Deterministic uniform draw in the open interval (0, 1)."""
    return ((mix3_u64(a, b, c) >> 11) + 0.5) * _INV_2_53


def _norminv(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C0 * q + _C1) * q + _C2) * q + _C3) * q + _C4) * q + _C5) / (
            (((_D0 * q + _D1) * q + _D2) * q + _D3) * q + 1.0
        )
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((_C0 * q + _C1) * q + _C2) * q + _C3) * q + _C4) * q + _C5) / (
            (((_D0 * q + _D1) * q + _D2) * q + _D3) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    return (((((_A0 * r + _A1) * r + _A2) * r + _A3) * r + _A4) * r + _A5) * q / (
        ((((_B0 * r + _B1) * r + _B2) * r + _B3) * r + _B4) * r + 1.0
    )


def gauss(a: int, b: int, c: int) -> float:
    """Standard normal draw for counter (a, b, c)."""
    return _norminv(uniform01(a, b, c))


def gauss_mean(a: int, b: int, start: int, n: int) -> float:
    """Mean of the n standard normal draws at indices start..start+n-1.

    Summation order is fixed (ascending index) so both backends agree.
    """
    total = 0.0
    for i in range(n):
        total = total + _norminv(uniform01(a, b, start + i))
    return total / n


def round_half_away(x: float) -> int:
    """Round to nearest integer, halves away from zero."""
    if x >= 0.0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


def fnv1a_64(s: str) -> int:
    """FNV-1a 64-bit hash of a string; stable entity key for streams."""
    h = 0xCBF29CE484222325
    for byte in s.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h
