"""Discrepancy, law-of-the-iterated-logarithm constants and cover bookkeeping.

Everything returned is an exact rational or a certified rational enclosure.
Random-walk thresholds and tails are rounded up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .enclose import (Enclosure, exp_bounds, loglog_bounds, phi_bounds, power_bounds,
                      root_lower, sqrt_bounds)
from .errors import BudgetExceeded
from .exactset import IntervalUnion, RationalLike, as_fraction, pad_translate
from .sierpinski import default_ceiling

C_P = 100
_INT64_SAFE = 2 ** 62


# --- orbits and discrepancy --------------------------------------------------

@dataclass(frozen=True)
class OrbitPoints:
    """Fractional parts {b^(j-1) x} for j = 1..N, stored as numerators over den."""

    numerators: np.ndarray
    den: int
    base: int
    source: Fraction | None = None

    @classmethod
    def of(cls, x: RationalLike, b: int, count: int) -> "OrbitPoints":
        x = as_fraction(x)
        u = kernels.orbit_numerators(x.numerator % x.denominator, x.denominator, b, count)
        return cls(u, x.denominator, b, x)

    @classmethod
    def from_points(cls, points: Iterable[RationalLike], base: int = 0) -> "OrbitPoints":
        pts = [as_fraction(p) for p in points]
        if any(not 0 <= p < 1 for p in pts):
            raise ValueError("points must lie in [0, 1)")
        den = lcm(*(p.denominator for p in pts)) if pts else 1
        nums = [p.numerator * (den // p.denominator) for p in pts]
        dtype = np.int64 if den * max(len(pts), 1) <= _INT64_SAFE else object
        return cls(np.array(nums, dtype=dtype), den, base)

    def __len__(self) -> int:
        return len(self.numerators)

    @property
    def points(self) -> list[Fraction]:
        return [Fraction(int(u), self.den) for u in self.numerators]


def _as_orbit(pts) -> OrbitPoints:
    return pts if isinstance(pts, OrbitPoints) else OrbitPoints.from_points(pts)


def extreme_discrepancy(pts, N: int | None = None) -> Fraction:
    """sup over half-open [α, β) ⊆ [0, 1] of |#{j <= N : x_j in [α, β)}/N - (β - α)|."""
    orbit = _as_orbit(pts)
    N = len(orbit) if N is None else N
    if not 1 <= N <= len(orbit):
        raise ValueError("need 1 <= N <= number of points")
    u = np.sort(orbit.numerators[:N])
    if u.dtype == object:
        u = sorted(int(v) for v in u)
    return Fraction(kernels.discrepancy_scan(u, orbit.den, N), N * orbit.den)


def discrepancy_series(x: RationalLike, b: int, checkpoints: Sequence[int]) -> list[tuple[int, Fraction]]:
    """D_N of the base-b orbit of x at each checkpoint N."""
    orbit = OrbitPoints.of(x, b, max(checkpoints))
    return [(n, extreme_discrepancy(orbit, n)) for n in checkpoints]


def lil_ratio(N: int, D: Fraction) -> float:
    """sqrt(N) D / sqrt(log log N), as a float for reporting."""
    ll = loglog_bounds(N)
    return float(D) * (N ** 0.5) / float((ll.lo + ll.hi) / 2) ** 0.5


@dataclass(frozen=True)
class BadicPair:
    level: int
    qa: int
    qa2: int
    base: int

    def __post_init__(self):
        if self.level < 1 or self.base < 2:
            raise ValueError("need L >= 1 and b >= 2")
        if not 0 <= self.qa < self.qa2 <= self.base ** self.level:
            raise ValueError("need 0 <= qa < qa' <= b^L")

    @property
    def a(self) -> Fraction:
        return Fraction(self.qa, self.base ** self.level)

    @property
    def a2(self) -> Fraction:
        return Fraction(self.qa2, self.base ** self.level)

    @property
    def length(self) -> Fraction:
        return self.a2 - self.a


def restricted_discrepancy(pts, N: int, pair: BadicPair) -> Fraction:
    orbit = _as_orbit(pts)
    a, a2 = pair.a, pair.a2
    hits = sum(1 for p in orbit.points[:N] if a <= p < a2)
    return abs(Fraction(hits, N) - pair.length)


# --- constants ---------------------------------------------------------------

def lil_constant_squared(b: int) -> Fraction:
    if b < 2:
        raise ValueError("base must be at least 2")
    if b == 2:
        return Fraction(84, 81)
    if b % 2:
        return Fraction(b + 1, 2 * (b - 1))
    return Fraction(b * (b + 1) * (b - 2), 2 * (b - 1) ** 3)


def lil_constant(b: int, bits: int = 40) -> Enclosure:
    """Enclosure of L_b of width at most 2^-bits (exact when L_b is rational)."""
    return sqrt_bounds(lil_constant_squared(b), bits)


def _window_hits(pair: BadicPair, j: int) -> int:
    """Strings of length L+j whose first and (j+1)-th windows lie in [qa, qa')."""
    b, L = pair.base, pair.level
    s = np.arange(b ** (L + j), dtype=np.int64)
    first = s // b ** j
    later = s % b ** L
    return int(np.count_nonzero((first >= pair.qa) & (first < pair.qa2)
                                & (later >= pair.qa) & (later < pair.qa2)))


def correlations(pair: BadicPair) -> list[Fraction]:
    """∫ψ(x)ψ(b^j x)dx for j = 0..L-1, with ψ the centered indicator of [a, a')."""
    b, L = pair.base, pair.level
    sq = pair.length ** 2
    return [Fraction(_window_hits(pair, j), b ** (L + j)) - sq for j in range(L)]


def sigma_exact(pair: BadicPair, M: int | None = None) -> Fraction:
    """σ_M² for block length LM, or the limit σ² when M is None."""
    I = correlations(pair)
    L = pair.level
    if M is None:
        return I[0] + 2 * sum(I[1:], Fraction(0))
    if M < 1:
        raise ValueError("M must be positive")
    n = L * M
    return (n * I[0] + sum(((2 * n - 2 * j) * I[j] for j in range(1, L)), Fraction(0))) / n


# --- random-walk bounds ------------------------------------------------------

@dataclass(frozen=True)
class RWParams:
    delta: Fraction
    sigma_sq: Fraction
    bound_K: Fraction
    N0: int = 1

    def __post_init__(self):
        for name in ("delta", "sigma_sq", "bound_K"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.delta <= 1:
            raise ValueError("need 0 < delta <= 1")
        if self.sigma_sq <= 0 or self.bound_K <= 0:
            raise ValueError("need sigma^2 > 0 and K > 0")


@dataclass(frozen=True)
class RWThresholds:
    q: Enclosure
    A: Fraction
    A_prime: Fraction


def _A_upper(delta: Fraction, sigma_sq: Fraction, K: Fraction) -> tuple[Enclosure, Fraction]:
    t = 2 * delta ** 2 * sigma_sq / K ** 4  # q = exp(-t), so log q = -t exactly
    q = exp_bounds(-t)
    one_minus_q = 1 - q.hi
    denom = delta ** 2 * t ** 2 * power_bounds(one_minus_q, delta).lo
    return q, 1 / denom


def rw_thresholds(params: RWParams) -> RWThresholds:
    """q = exp(-2δ²σ²/K⁴), A_δ = 1/((δ log q)²(1-q)^δ) and
    A'_δ = max(A_{1/2}, (2/δ)^(2/δ)), rounded up."""
    q, A = _A_upper(params.delta, params.sigma_sq, params.bound_K)
    _, A_half = _A_upper(Fraction(1, 2), params.sigma_sq, params.bound_K)
    ratio = 2 / params.delta
    A_prime = max(A_half, power_bounds(ratio, ratio).hi)
    return RWThresholds(q, A, A_prime)


@dataclass(frozen=True)
class RWTails:
    up: Fraction
    low: Fraction
    up_valid: bool
    low_valid: bool


def up_tail(delta: RationalLike, N0: int) -> Fraction:
    """8/(δ N0^δ), rounded up."""
    delta = as_fraction(delta)
    return 8 / (delta * power_bounds(N0, delta).lo)


def low_tail(N0: int) -> Fraction:
    """80/sqrt(N0), rounded up and clipped at 1."""
    return min(Fraction(1), 80 / root_lower(N0, 2))


def rw_tails(params: RWParams, thresholds: RWThresholds | None = None) -> RWTails:
    th = thresholds or rw_thresholds(params)
    return RWTails(up_tail(params.delta, params.N0), low_tail(params.N0),
                   params.N0 >= th.A, params.N0 >= th.A_prime)


def _pow2_upper(N: int) -> Fraction:
    # 2^-N, replaced by a larger number once the exponent gets unwieldy
    return Fraction(1, 1 << min(N, 4096))


@dataclass(frozen=True)
class NMReport:
    N: int
    bound: Fraction
    target: Fraction


def find_N_M(r: RationalLike, M: int, pair: BadicPair, max_exponent: int = 4096) -> int:
    return solve_N_M(r, M, pair, max_exponent).N


def solve_N_M(r: RationalLike, M: int, pair: BadicPair, max_exponent: int = 4096) -> NMReport:
    """Smallest power of two N whose three block-set bounds sum below 2^-M r."""
    r = as_fraction(r)
    L = pair.level
    target = r / 2 ** M
    sig_M = sigma_exact(pair, M)
    sig_1 = sigma_exact(pair, 1)
    y_need = z_need = low_need = Fraction(0)
    if sig_M > 0:
        y_var, y_K = L * M * sig_M, Fraction(L * M)
        y_need = rw_thresholds(RWParams(Fraction(1, M), y_var, y_K)).A
        if M >= 2:
            low_need = rw_thresholds(RWParams(Fraction(1, M), y_var, y_K)).A_prime
    if sig_1 > 0:
        z_need = rw_thresholds(RWParams(Fraction(1), L * sig_1, Fraction(L))).A
    for e in range(1, max_exponent + 1):
        N = 1 << e
        if N < y_need or N < z_need or N < low_need:
            continue
        pad = _pow2_upper(N)
        total = 3 * pad
        if sig_M > 0:
            total += up_tail(Fraction(1, M), N)
            if M >= 2:
                total += low_tail(N)
        if sig_1 > 0:
            total += up_tail(1, N)
        if total < target:
            return NMReport(N, total, target)
    raise BudgetExceeded(f"no N <= 2^{max_exponent} meets the target")


# --- toy block sets ----------------------------------------------------------

@dataclass(frozen=True)
class BlockSets:
    y_up: IntervalUnion
    y_low: IntervalUnion | None
    z_up: IntervalUnion
    y_up_event: IntervalUnion
    z_up_event: IntervalUnion
    y_up_pad: Fraction
    z_up_pad: Fraction


def _runs(indices: np.ndarray, den: int) -> IntervalUnion:
    """Union of the half-open cells [s/den, (s+1)/den), as open runs."""
    if len(indices) == 0:
        return IntervalUnion()
    idx = np.asarray(indices, dtype=np.int64)
    breaks = np.nonzero(np.diff(idx) != 1)[0]
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks], [idx[-1]])) + 1
    return IntervalUnion.from_sorted_grid(den, starts.tolist(), ends.tolist())


def _exceeds(dev: Fraction, coef_sq: Fraction, N: int, strict_above: bool) -> bool:
    """Decide dev > sqrt(coef_sq) φ_N (or dev < ... when strict_above is False)."""
    if coef_sq == 0 or N <= 2:
        return dev > 0 if strict_above else False
    # dev² vs coef_sq * 2N log log N
    bits = 64
    while True:
        ll = loglog_bounds(N, bits)
        lo, hi = coef_sq * 2 * N * ll.lo, coef_sq * 2 * N * ll.hi
        d2 = dev * dev
        if d2 > hi:
            return strict_above
        if d2 < lo:
            return not strict_above
        bits *= 2
        if bits > 4096:
            raise ArithmeticError("threshold comparison did not separate")


def _block_sums(pair: BadicPair, M: int, blocks: int, ceiling: int):
    """Per-string partial sums of Y and Z over the first `blocks` blocks."""
    b, L = pair.base, pair.level
    period = L * M + L
    digits = blocks * period + L - 1
    size = b ** digits
    if size > ceiling:
        raise BudgetExceeded(f"{b}^{digits} strings exceed the ceiling {ceiling}")
    s = np.arange(size, dtype=np.int64)
    y = np.zeros(size, dtype=np.int64)
    z = np.zeros(size, dtype=np.int64)
    for k in range(blocks):
        for off in range(period):
            j = k * period + off + 1  # 1-based index of X_j
            w = (s // b ** (digits - j - L + 1)) % b ** L
            hit = ((w >= pair.qa) & (w < pair.qa2)).astype(np.int64)
            if off < L * M:
                y += hit
            else:
                z += hit
    return s, y, z, b ** digits


def _deviation_event(s, sums, center: Fraction, coef_sq: Fraction, N: int, above: bool, den: int):
    verdict = {}
    for v in np.unique(sums).tolist():
        verdict[v] = _exceeds(abs(v - center), coef_sq, N, above)
    keep = np.array([verdict[v] for v in sums.tolist()], dtype=bool) if len(sums) else np.zeros(0, bool)
    return _runs(s[keep], den)


def build_block_sets_toy(pair: BadicPair, M: int, N: int, scale: RationalLike = 1,
                         with_low: bool = True, ceiling: int | None = None) -> BlockSets:
    """The N-th terms of the three block-deviation families, built over all
    digit strings, then padded.

    ``scale`` multiplies every threshold (1 gives the defined sets).  The
    lower family intersects the events at N^k blocks for k = 2..N and needs
    N^N blocks of digits, so it is only built when that fits.
    """
    scale = as_fraction(scale)
    ceiling = default_ceiling() if ceiling is None else ceiling
    b, L = pair.base, pair.level
    sig_M, sig_1 = sigma_exact(pair, M), sigma_exact(pair, 1)
    s, y, z, den = _block_sums(pair, M, N, ceiling)
    y_coef = (1 + Fraction(1, M)) ** 2 * L * M * sig_M * scale ** 2
    z_coef = 4 * L * sig_1 * scale ** 2
    y_event = _deviation_event(s, y, L * M * N * pair.length, y_coef, N, True, den)
    z_event = _deviation_event(s, z, L * N * pair.length, z_coef, N, True, den)
    y_pad = Fraction(1, 2 ** N * b ** ((M * N + 1) * L))
    z_pad = Fraction(1, 2 ** N * b ** ((N + 1) * L))
    y_low = None
    if with_low:
        low_coef = (1 - Fraction(1, M)) ** 2 * L * M * sig_M * scale ** 2
        y_low = None
        for k in range(2, N + 1):
            blocks = N ** k
            sk, yk, _, dk = _block_sums(pair, M, blocks, ceiling)
            ev = _deviation_event(sk, yk, L * M * blocks * pair.length, low_coef, blocks, False, dk)
            pad = Fraction(1, 2 ** blocks * b ** ((M * blocks + 1) * L) * N)
            padded = pad_translate(ev, 0, pad)
            y_low = padded if y_low is None else y_low.intersection(padded)
        if y_low is None:
            y_low = IntervalUnion()
    return BlockSets(pad_translate(y_event, 0, y_pad), y_low, pad_translate(z_event, 0, z_pad),
                     y_event, z_event, y_pad, z_pad)


# --- Philipp-type functions --------------------------------------------------

def philipp_H(N: int) -> int:
    """floor(log N / log 4) + 1."""
    if N < 1:
        raise ValueError("N must be positive")
    t = 0
    while 4 ** (t + 1) <= N:
        t += 1
    return t + 1


def philipp_interval(h: int, eps: Sequence[int], L: int, K: int, H: int) -> tuple[Fraction, Fraction]:
    """The dyadic piece [lo, hi) of level h determined by the bits eps_{L+1..}."""
    if not L <= h <= H:
        raise ValueError("need L <= h <= H")
    if len(eps) < H:
        raise ValueError("bit string shorter than H")
    lo = Fraction(K, 2 ** L) + sum((Fraction(eps[j - 1], 2 ** j) for j in range(L + 1, h + 1)), Fraction(0))
    if h < H:
        return lo, lo + Fraction(eps[h], 2 ** (h + 1))
    return lo, lo + Fraction(1, 2 ** H)


def philipp_rho(x: RationalLike, h: int, eps: Sequence[int], L: int, K: int, H: int) -> Fraction:
    """Indicator of the level-h piece at {x}, minus the length of the piece."""
    lo, hi = philipp_interval(h, eps, L, K, H)
    frac = as_fraction(x) % 1
    return (1 if lo <= frac < hi else 0) - (hi - lo)


def philipp_eval(x: RationalLike, M: int, N: int, h: int, eps: Sequence[int], L: int, K: int, b: int,
                 H: int | None = None) -> Fraction:
    """|Σ_{k=M+1}^{M+N} ρ(b^k x)|, by direct summation."""
    x = as_fraction(x)
    H = philipp_H(N) if H is None else H
    return abs(sum((philipp_rho(b ** k * x, h, eps, L, K, H) for k in range(M + 1, M + N + 1)),
                   Fraction(0)))


@dataclass(frozen=True)
class PhilippConstants:
    C_P: int
    H: int
    delta_n: Fraction
    delta_hat_n: Fraction
    n_L: int
    E_bound: Fraction


def philipp_n_L(L: int, r: RationalLike) -> int:
    """max(10^6, 200 * 4^L / r) + 1, rounded so it exceeds the maximum."""
    r = as_fraction(r)
    return max(10 ** 6, (200 * 4 ** L * r.denominator) // r.numerator) + 1


def philipp_constants(b: int, L: int, r: RationalLike, N: int, n: int = 1) -> PhilippConstants:
    n0 = philipp_n_L(L, r)
    return PhilippConstants(
        C_P=C_P,
        H=philipp_H(N),
        delta_n=Fraction(1, (4 * b) ** (n + 1)),
        delta_hat_n=Fraction(1, (8 * b) ** (n + 1)),
        n_L=n0,
        E_bound=Fraction(C_P, n0) + _pow2_upper(n0),
    )


# --- radius plan -------------------------------------------------------------

@dataclass(frozen=True)
class LilRadiusPlan:
    base: int
    r: Fraction
    base_share: Fraction
    entries: tuple[tuple[tuple, Fraction], ...]
    tail: Fraction

    @property
    def total(self) -> Fraction:
        return sum((rad for _, rad in self.entries), Fraction(0)) + self.tail

    @property
    def certified(self) -> bool:
        return self.total < self.r and self.base_share < self.r


def assemble_lil_radii(b: int, r: RationalLike, L_max: int) -> LilRadiusPlan:
    """Radii inside the base-b LIL cover of radius r: r/2 for the D-part and
    2^-(L+1) b^-2L r for each pair 0 <= k < k' <= b^L, plus a bound for
    levels above L_max.  base_share is the radius 2^-b r that base b gets
    in the all-bases cover of radius r."""
    r = as_fraction(r)
    entries: list[tuple[tuple, Fraction]] = [(("D",), r / 2)]
    for L in range(1, L_max + 1):
        share = r / (2 ** (L + 1) * b ** (2 * L))
        top = b ** L
        for k in range(top):
            for k2 in range(k + 1, top + 1):
                entries.append((("L", L, k, k2), share))
    # level L has (b^L + 1) b^L / 2 <= b^2L pairs, so it adds at most r 2^-(L+1)
    tail = r / 2 ** (L_max + 1)
    return LilRadiusPlan(b, r, r / 2 ** b, tuple(entries), tail)


# --- parameter bundle --------------------------------------------------------

@dataclass(frozen=True)
class LILParams:
    base: int
    L_b: Enclosure
    philipp: PhilippConstants

    def phi(self, N: int) -> Enclosure:
        return phi_bounds(N)


def lil_params(b: int, r: RationalLike = Fraction(1, 2), L: int = 1, N: int = 16) -> LILParams:
    return LILParams(b, lil_constant(b), philipp_constants(b, L, r, N))
