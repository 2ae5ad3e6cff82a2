# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the renewal simulator.

Every function here has a drop-in twin in :mod:`mcaoi._fallback`; the two
must return identical integers and agree on floats to rounding.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef extern from *:
    """
    typedef unsigned __int128 mcaoi_u128;
    static inline unsigned long long mcaoi_hi(mcaoi_u128 x) { return (unsigned long long)(x >> 64); }
    static inline unsigned long long mcaoi_lo(mcaoi_u128 x) { return (unsigned long long)x; }
    """
    ctypedef unsigned long long mcaoi_u128
    unsigned long long mcaoi_hi(mcaoi_u128 x) nogil
    unsigned long long mcaoi_lo(mcaoi_u128 x) nogil


cdef object _u128_to_int(mcaoi_u128 x):
    return (int(mcaoi_hi(x)) << 64) | int(mcaoi_lo(x))


def power_sums(const cnp.int64_t[::1] hist):
    """Exact ``(sum c, sum c k, sum c k^2, sum c k^3)`` for ``hist[k-1] = c``."""
    cdef Py_ssize_t i, n = hist.shape[0]
    cdef mcaoi_u128 s0 = 0, s1 = 0, s2 = 0, s3 = 0, c, k
    with nogil:
        for i in range(n):
            c = <mcaoi_u128>hist[i]
            if c:
                k = <mcaoi_u128>(i + 1)
                s0 += c
                s1 += c * k
                s2 += c * k * k
                s3 += c * k * k * k
    return _u128_to_int(s0), _u128_to_int(s1), _u128_to_int(s2), _u128_to_int(s3)


cdef inline Py_ssize_t _count_ge_desc(const double[::1] thr, double u) noexcept nogil:
    # number of leading entries of the descending table with thr[i] >= u
    cdef Py_ssize_t lo = 0, hi = thr.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if thr[mid] >= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


def cycles_from_uniforms(const double[::1] u, const double[::1] thresholds):
    cdef Py_ssize_t n = u.shape[0], i
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] x = out
    with nogil:
        for i in range(n):
            x[i] = 1 + _count_ge_desc(thresholds, u[i])
    return out


def histogram_from_sorted(const double[::1] u_sorted, const double[::1] thresholds):
    """Cycle-count histogram (index k-1 holds #X==k) read off sorted uniforms."""
    cdef Py_ssize_t n = u_sorted.shape[0], kmax = thresholds.shape[0], k
    cdef Py_ssize_t lo, hi, mid
    cdef double t
    ge = np.empty(kmax + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] g = ge
    g[0] = n
    with nogil:
        for k in range(kmax):
            t = thresholds[k]
            lo = 0
            hi = n
            while lo < hi:
                mid = (lo + hi) >> 1
                if u_sorted[mid] <= t:
                    lo = mid + 1
                else:
                    hi = mid
            g[k + 1] = lo
    counts = ge[:-1] - ge[1:]
    return counts


def cycle_histogram(const cnp.int64_t[::1] cycles):
    cdef Py_ssize_t n = cycles.shape[0], i
    cdef cnp.int64_t xmax = 0
    with nogil:
        for i in range(n):
            if cycles[i] > xmax:
                xmax = cycles[i]
    out = np.zeros(xmax, dtype=np.int64)
    cdef cnp.int64_t[::1] h = out
    with nogil:
        for i in range(n):
            h[cycles[i] - 1] += 1
    return out


def slot_scan(const double[::1] u, double success_prob, cnp.int64_t carry):
    """Walk a Bernoulli round stream; return completed cycles and the new carry.

    ``carry`` is the number of rounds since the last success, or -1 before the
    first success has been seen.
    """
    cdef Py_ssize_t n = u.shape[0], i, m = 0
    buf = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] b = buf
    cdef cnp.int64_t c = carry
    with nogil:
        for i in range(n):
            if c >= 0:
                c += 1
            if u[i] < success_prob:
                if c > 0:
                    b[m] = c
                    m += 1
                c = 0
    return buf[:m].copy(), c


def discretized_moments(const cnp.int64_t[::1] cycles, double slot, double round_len,
                        cnp.int64_t steps_per_slot):
    """Midpoint-rule time averages of the sawtooth and its square."""
    cdef Py_ssize_t n = cycles.shape[0], i
    cdef cnp.int64_t j, nsteps
    cdef cnp.int64_t per_round = <cnp.int64_t>(round_len / slot * steps_per_slot + 0.5)
    cdef double dt = slot / steps_per_slot
    cdef double s1 = 0.0, s2 = 0.0, c1 = 0.0, c2 = 0.0, a, y, t
    cdef double total = 0.0
    with nogil:
        for i in range(n):
            nsteps = cycles[i] * per_round
            for j in range(nsteps):
                a = slot + (j + 0.5) * dt
                y = a * dt
                t = s1 + y
                if fabs(s1) >= fabs(y):
                    c1 += (s1 - t) + y
                else:
                    c1 += (y - t) + s1
                s1 = t
                y = a * a * dt
                t = s2 + y
                if fabs(s2) >= fabs(y):
                    c2 += (s2 - t) + y
                else:
                    c2 += (y - t) + s2
                s2 = t
            total += nsteps * dt
    return (s1 + c1) / total, (s2 + c2) / total


def fraction_below_direct(const cnp.int64_t[::1] cycles, double slot, double round_len,
                          double threshold):
    cdef Py_ssize_t n = cycles.shape[0], i
    cdef double head = threshold - slot
    cdef double s = 0.0, c = 0.0, d, y, t, total = 0.0
    if head < 0.0:
        head = 0.0
    with nogil:
        for i in range(n):
            d = cycles[i] * round_len
            total += d
            y = head if head < d else d
            t = s + y
            if fabs(s) >= fabs(y):
                c += (s - t) + y
            else:
                c += (y - t) + s
            s = t
    return (s + c) / total
