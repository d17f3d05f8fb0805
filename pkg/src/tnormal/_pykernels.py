"""Pure-Python versions of the integer kernels.

Same signatures and results as the compiled module; used when the
extension is not built or when TNORMAL_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np


def _qualifies(b: int, n: int, m: int) -> list[bool]:
    # |c/n - 1/b| >= 1/m  <=>  m|bc - n| >= nb
    return [m * abs(b * c - n) >= n * b for c in range(n + 1)]


def _digit_counts(b: int, k: int, d: int) -> list[int]:
    counts = [0]
    for _ in range(k):
        counts = [c + (q == d) for c in counts for q in range(b)]
    return counts


def atom_numerators(b: int, n: int, d: int, m: int) -> list[int]:
    """Sorted values Q = sum q_j b^(n-j) of strings whose digit-d frequency
    deviates from 1/b by at least 1/m."""
    ok = _qualifies(b, n, m)
    if not any(ok):
        return []
    lo_len = min(n, 12 if b == 2 else 8 if b <= 4 else 5)
    hi_len = n - lo_len
    lo_counts = _digit_counts(b, lo_len, d)
    hi_counts = _digit_counts(b, hi_len, d)
    step = b ** lo_len
    sel = [[v for v, c in enumerate(lo_counts) if ok[ch + c]] for ch in range(hi_len + 1)]
    out: list[int] = []
    for prefix, ch in enumerate(hi_counts):
        base = prefix * step
        out.extend([base + v for v in sel[ch]])
    return out


def orbit_numerators(p: int, q: int, b: int, count: int) -> np.ndarray:
    """Numerators of {b^(j-1) p/q} over q for j = 1..count."""
    out = []
    u = p % q
    for _ in range(count):
        out.append(u)
        u = (u * b) % q
    return np.array(out, dtype=np.int64)


def discrepancy_scan(sorted_u, q: int, count: int) -> int:
    """Extreme discrepancy of sorted points u/q, scaled by count*q.

    The deviation g(t) = #{u < tq}/count - t is tracked at every point from
    the left and from the right; the answer is the largest rise or fall of g
    between an earlier and a later position.
    """
    nq = count * q
    best_rise = best_fall = 0
    low = high = 0  # running min and max of g*count*q, starting at t = 0
    below = 0
    i = 0
    total = len(sorted_u)
    while i < total:
        u = int(sorted_u[i])
        j = i
        while j < total and sorted_u[j] == u:
            j += 1
        left = below * q - u * count
        best_rise = max(best_rise, left - low)
        best_fall = max(best_fall, high - left)
        low, high = min(low, left), max(high, left)
        below += j - i
        right = below * q - u * count
        best_rise = max(best_rise, right - low)
        best_fall = max(best_fall, high - right)
        low, high = min(low, right), max(high, right)
        i = j
    end = below * q - nq  # value at t = 1
    best_rise = max(best_rise, end - low)
    best_fall = max(best_fall, high - end)
    return max(best_rise, best_fall)
