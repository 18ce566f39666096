# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython backend for the deterministic kernels.

Must stay bit-identical to pykernels: same operations, same order, same
libm calls. Do not enable -ffast-math or reassociate expressions.
"""

from libc.math cimport ceil, floor, log, sqrt

cdef extern from *:
    ctypedef unsigned long long u64 "unsigned long long"

cdef u64 _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0

cdef double _A0 = -3.969683028665376e+01
cdef double _A1 = 2.209460984245205e+02
cdef double _A2 = -2.759285104469687e+02
cdef double _A3 = 1.383577518672690e+02
cdef double _A4 = -3.066479806614716e+01
cdef double _A5 = 2.506628277459239e+00
cdef double _B0 = -5.447609879822406e+01
cdef double _B1 = 1.615858368580409e+02
cdef double _B2 = -1.556989798598866e+02
cdef double _B3 = 6.680131188771972e+01
cdef double _B4 = -1.328068155288572e+01
cdef double _C0 = -7.784894002430293e-03
cdef double _C1 = -3.223964580411365e-01
cdef double _C2 = -2.400758277161838e+00
cdef double _C3 = -2.549732539343734e+00
cdef double _C4 = 4.374664141464968e+00
cdef double _C5 = 2.938163982698783e+00
cdef double _D0 = 7.784695709041462e-03
cdef double _D1 = 3.224671290700398e-01
cdef double _D2 = 2.445134137142996e+00
cdef double _D3 = 3.754408661907416e+00
cdef double _P_LOW = 0.02425


cdef inline u64 _splitmix(u64 z) nogil:
    z = z + _GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline u64 _mix3(u64 a, u64 b, u64 c) nogil:
    cdef u64 h = _splitmix(a)
    h = _splitmix(h ^ b)
    h = _splitmix(h ^ c)
    return h


cdef inline double _u01(u64 a, u64 b, u64 c) nogil:
    return (<double> (_mix3(a, b, c) >> 11) + 0.5) * _INV_2_53


cdef inline double _norminv(double p) nogil:
    cdef double q, r
    if p < _P_LOW:
        q = sqrt(-2.0 * log(p))
        return (((((_C0 * q + _C1) * q + _C2) * q + _C3) * q + _C4) * q + _C5) / (
            (((_D0 * q + _D1) * q + _D2) * q + _D3) * q + 1.0
        )
    if p > 1.0 - _P_LOW:
        q = sqrt(-2.0 * log(1.0 - p))
        return -(((((_C0 * q + _C1) * q + _C2) * q + _C3) * q + _C4) * q + _C5) / (
            (((_D0 * q + _D1) * q + _D2) * q + _D3) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    return (((((_A0 * r + _A1) * r + _A2) * r + _A3) * r + _A4) * r + _A5) * q / (
        ((((_B0 * r + _B1) * r + _B2) * r + _B3) * r + _B4) * r + 1.0
    )


def mix3_u64(a, b, c):
    """Counter-based 64-bit hash of (a, b, c); inputs taken mod 2**64."""
    return _mix3(<u64> (a & 0xFFFFFFFFFFFFFFFF), <u64> (b & 0xFFFFFFFFFFFFFFFF), <u64> (c & 0xFFFFFFFFFFFFFFFF))


def uniform01(a, b, c):
    """Deterministic uniform draw in the open interval (0, 1)."""
    return _u01(<u64> (a & 0xFFFFFFFFFFFFFFFF), <u64> (b & 0xFFFFFFFFFFFFFFFF), <u64> (c & 0xFFFFFFFFFFFFFFFF))


def gauss(a, b, c):
    """Standard normal draw for counter (a, b, c)."""
    return _norminv(_u01(<u64> (a & 0xFFFFFFFFFFFFFFFF), <u64> (b & 0xFFFFFFFFFFFFFFFF), <u64> (c & 0xFFFFFFFFFFFFFFFF)))


def gauss_mean(a, b, start, n):
    """Mean of the n standard normal draws at indices start..start+n-1."""
    cdef u64 ua = <u64> (a & 0xFFFFFFFFFFFFFFFF)
    cdef u64 ub = <u64> (b & 0xFFFFFFFFFFFFFFFF)
    cdef u64 us = <u64> (start & 0xFFFFFFFFFFFFFFFF)
    cdef long long nn = <long long> n
    cdef double total = 0.0
    cdef long long i
    for i in range(nn):
        total = total + _norminv(_u01(ua, ub, us + <u64> i))
    return total / nn


def round_half_away(double x):
    """Round to nearest integer, halves away from zero."""
    if x >= 0.0:
        return <long long> floor(x + 0.5)
    return <long long> ceil(x - 0.5)
