# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels: Sierpinski atom enumeration, base-b orbits of
rationals and the extreme-discrepancy sweep."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


def atom_numerators(int b, int n, int d, int m):
    """Sorted values Q = sum q_j b^(n-j) of strings whose digit-d frequency
    deviates from 1/b by at least 1/m."""
    cdef int c, k, pos
    cdef int64_t total = 1, q, found = 0
    cdef int digits[64]
    cdef char ok[65]
    cdef bint any_ok = False
    if n > 63:
        raise ValueError("string length too large for the compiled kernel")
    for c in range(n + 1):
        ok[c] = m * abs(b * c - n) >= n * b
        any_ok = any_ok or ok[c]
    if not any_ok:
        return []
    for k in range(n):
        total *= b
        digits[k] = 0
    cdef cnp.ndarray[int64_t, ndim=1] buf = np.empty(total, dtype=np.int64)
    cdef int64_t[::1] out = buf
    # odometer over all strings, keeping the running count of digit d
    c = n if d == 0 else 0
    for q in range(total):
        if ok[c]:
            out[found] = q
            found += 1
        pos = n - 1
        while pos >= 0:
            if digits[pos] == d:
                c -= 1
            if digits[pos] == b - 1:
                digits[pos] = 0
                if d == 0:
                    c += 1
                pos -= 1
            else:
                digits[pos] += 1
                if digits[pos] == d:
                    c += 1
                break
    return buf[:found].tolist()


def orbit_numerators(int64_t p, int64_t q, int b, Py_ssize_t count):
    """Numerators of {b^(j-1) p/q} over q for j = 1..count."""
    if q <= 0 or q > (2 ** 62) // b:
        raise OverflowError("denominator too large for the compiled kernel")
    cdef cnp.ndarray[int64_t, ndim=1] buf = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] out = buf
    cdef int64_t u = p % q
    cdef Py_ssize_t j
    for j in range(count):
        out[j] = u
        u = (u * b) % q
    return buf


def discrepancy_scan(const int64_t[::1] sorted_u, int64_t q, int64_t count):
    """Extreme discrepancy of sorted points u/q, scaled by count*q."""
    if q > 0 and count > (2 ** 62) // q:
        raise OverflowError("count*q too large for the compiled kernel")
    cdef Py_ssize_t i = 0, j, total = sorted_u.shape[0]
    cdef int64_t nq = count * q
    cdef int64_t rise = 0, fall = 0, low = 0, high = 0, below = 0, u, v
    while i < total:
        u = sorted_u[i]
        j = i
        while j < total and sorted_u[j] == u:
            j += 1
        v = below * q - u * count
        if v - low > rise: rise = v - low
        if high - v > fall: fall = high - v
        if v < low: low = v
        if v > high: high = v
        below += j - i
        v = below * q - u * count
        if v - low > rise: rise = v - low
        if high - v > fall: fall = high - v
        if v < low: low = v
        if v > high: high = v
        i = j
    v = below * q - nq
    if v - low > rise: rise = v - low
    if high - v > fall: fall = high - v
    return rise if rise > fall else fall
