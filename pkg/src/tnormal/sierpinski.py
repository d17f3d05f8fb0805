"""Sierpinski-type covers of the non-normal numbers and their truncations.

The atom U_{b,m,n,d} is the union over base-b strings q_1..q_n whose
frequency of digit d is at least 1/m away from 1/b of the translates
0.q_1..q_n + (b^-n, 2 b^-n).  Writing Q for the integer value of the string,
that translate is ((Q+1)/b^n, (Q+2)/b^n).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from . import kernels
from .enclose import Enclosure
from .errors import UNKNOWN, BudgetExceeded, Unknown
from .exactset import IntervalUnion, RationalLike, as_fraction, pad_translate, union_all
from .polyalg import (IntPolynomial, enumerate_P, lipschitz, range_bounds, stretch_bound,
                      stretch_radius)

DEFAULT_CEILING = 1 << 24
CEILING_ENV = "TNORMAL_BUDGET_CEILING"
PI_SQ_OVER_6_UPPER = Fraction(823, 500)


def default_ceiling() -> int:
    raw = os.environ.get(CEILING_ENV)
    return int(raw) if raw else DEFAULT_CEILING


@dataclass(frozen=True)
class CoverAtomParams:
    base: int
    fluct: int
    length: int
    digit: int

    def __post_init__(self):
        if self.base < 2 or self.fluct < 1 or self.length < 1:
            raise ValueError(f"bad atom indices {self}")
        if not 0 <= self.digit < self.base:
            raise ValueError(f"digit {self.digit} out of range for base {self.base}")


def n_mb(m: int, b: int, r: RationalLike) -> int:
    """Cutoff floor(24 m^6 b^2 / r) + 2 for string lengths in U(r)."""
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if m < 1 or b < 2:
        raise ValueError("need m >= 1 and b >= 2")
    return (24 * m ** 6 * b * b * r.denominator) // r.numerator + 2


def qualifying_counts(b: int, n: int, m: int) -> list[bool]:
    """ok[c]: a string with c copies of the digit deviates enough."""
    return [m * abs(b * c - n) >= n * b for c in range(n + 1)]


def atom_count(params: CoverAtomParams) -> int:
    """Number of qualifying strings, by counting digit multiplicities."""
    b, m, n = params.base, params.fluct, params.length
    ok = qualifying_counts(b, n, m)
    return sum(comb(n, c) * (b - 1) ** (n - c) for c in range(n + 1) if ok[c])


def atom_measure(params: CoverAtomParams) -> Fraction:
    return Fraction(atom_count(params), params.base ** params.length)


def build_U_bmnd(params: CoverAtomParams, ceiling: int | None = None) -> IntervalUnion:
    b, m, n, d = params.base, params.fluct, params.length, params.digit
    ceiling = default_ceiling() if ceiling is None else ceiling
    size = b ** n
    if size > ceiling:
        raise BudgetExceeded(f"{b}^{n} strings exceed the ceiling {ceiling}",
                             bound=min(Fraction(1), bound_atom(b, m, n)))
    qs = kernels.atom_numerators(b, n, d, m)
    return IntervalUnion.from_sorted_grid(size, [q + 1 for q in qs], [q + 2 for q in qs])


# --- atom and tail bounds ---------------------------------------------------

def bound_atom(b: int, m: int, n: int) -> Fraction:
    """12 m^4 / (b n^2), unclipped."""
    return Fraction(12 * m ** 4, b * n * n)


def tail_over_n(m: int, N: int) -> Fraction:
    """Bound on sum over d and n >= N of the atom measures: 12 m^4/(N-1)."""
    if N < 2:
        raise ValueError("need N >= 2")
    return Fraction(12 * m ** 4, N - 1)


def tail_over_m(b: int, M: int, r: RationalLike) -> Fraction:
    """Bound on the part of U(r) with base b and m >= M."""
    r = as_fraction(r)
    factor = PI_SQ_OVER_6_UPPER if M <= 1 else min(PI_SQ_OVER_6_UPPER, Fraction(1, M - 1))
    return r / (2 * b * b) * factor


def tail_over_b(B: int, r: RationalLike) -> Fraction:
    """Bound on the part of U(r) with bases b >= B."""
    if B < 2:
        raise ValueError("need B >= 2")
    return as_fraction(r) / (B - 1)


def cover_tails(*, r: RationalLike | None = None, b: int | None = None, m: int | None = None,
                N: int | None = None, M: int | None = None, B: int | None = None) -> Fraction:
    """Dispatch to the tail over n (m, N), over m (b, M, r) or over b (B, r)."""
    if N is not None:
        return tail_over_n(m, N)
    if M is not None:
        return tail_over_m(b, M, r)
    if B is not None:
        return tail_over_b(B, r)
    raise ValueError("specify N, M or B")


def truncation_constants(k: int) -> tuple[int, int, int]:
    if k < 1:
        raise ValueError("k starts at 1")
    return 2 ** (k + 1), 2 ** (k + 2) + 1, 12 * 2 ** (7 * k + 12)


# --- truncated covers --------------------------------------------------------

@dataclass(frozen=True)
class TruncationBudget:
    """What to build.

    ``n_max`` caps string lengths, either as one integer or per (b, m).
    ``n_min`` optionally replaces the true cutoff n_{m,b}(r) for built atoms
    (a toy cover, larger than the true one); tails always refer to the true
    cover.
    """

    b_max: int = 2
    m_max: int = 2
    n_max: int | Callable[[int, int], int] = 24
    k_max: int = 4
    ceiling: int | None = None
    n_min: Callable[[int, int, Fraction], int] | None = None

    def n_max_map(self, b: int, m: int) -> int:
        return self.n_max(b, m) if callable(self.n_max) else self.n_max

    def ceiling_value(self) -> int:
        return default_ceiling() if self.ceiling is None else self.ceiling


@dataclass(frozen=True)
class CoverChunk:
    poly: IntPolynomial
    set: IntervalUnion
    radius: Fraction
    tail_bound: Fraction
    index: int = 0
    z_range: tuple[int, int] = (0, 0)
    atoms_built: int = 0

    def measure_bound(self) -> Fraction:
        """Bound on the range-space measure this chunk stands for."""
        return self.set.measure() + self.tail_bound

    def preimage_bound(self) -> Fraction:
        return stretch_bound(self.poly, self.measure_bound())


def _max_length(b: int, ceiling: int) -> int:
    n, size = 0, 1
    while size * b <= ceiling:
        size *= b
        n += 1
    return n


def truncated_U(s: RationalLike, budget: TruncationBudget) -> tuple[IntervalUnion, Fraction, int]:
    """Built part of U(s) within the budget, a bound on the rest, and the
    number of atoms built."""
    s = as_fraction(s)
    ceiling = budget.ceiling_value()
    pieces: list[IntervalUnion] = []
    tail = tail_over_b(budget.b_max + 1, s)
    built = 0
    for b in range(2, budget.b_max + 1):
        tail += tail_over_m(b, budget.m_max + 1, s)
        n_cap = min(budget.n_max_map(b, 1), _max_length(b, ceiling))
        for m in range(2, budget.m_max + 1):  # m = 1 atoms are empty
            true_lo = n_mb(m, b, s)
            n_lo = true_lo if budget.n_min is None else budget.n_min(b, m, s)
            n_hi = min(budget.n_max_map(b, m), n_cap)
            for n in range(max(n_lo, 1), n_hi + 1):
                for d in range(b):
                    pieces.append(build_U_bmnd(CoverAtomParams(b, m, n, d), ceiling))
                    built += 1
            tail += tail_over_n(m, max(n_hi + 1, true_lo))
    return union_all(pieces), tail, built


def assemble_truncated_UP(r: RationalLike, k_max: int, budget: TruncationBudget | None = None) -> list[CoverChunk]:
    """Chunks k = 1..k_max of the polynomial cover: p_k paired with the
    truncated U^+(rho_k), rho_k = (2^-k r / K_d)^d, translates |z| <= L_p + 1."""
    r = as_fraction(r)
    if not 0 < r < 1:
        raise ValueError("need 0 < r < 1")
    budget = budget or TruncationBudget(k_max=k_max)
    chunks = []
    for k in range(1, k_max + 1):
        p = enumerate_P(k)
        rho = stretch_radius(p, r / 2 ** k)
        reach = lipschitz(p) + 1
        sets, tail, built = [], Fraction(0), 0
        if rho > 0:
            for z in range(-reach, reach + 1):
                inner, inner_tail, inner_built = truncated_U(rho / 2 ** (abs(z) + 2), budget)
                sets.append(pad_translate(inner, z))
                tail += inner_tail
                built += inner_built
        chunks.append(CoverChunk(p, union_all(sets), rho, tail, k, (-reach, reach), built))
    return chunks


@dataclass(frozen=True)
class ChunkCertificate:
    chunk_total: Fraction
    remaining_polys: Fraction
    total: Fraction
    r: Fraction

    @property
    def certified(self) -> bool:
        return self.total < self.r


def certify_chunks(chunks: Sequence[CoverChunk], r: RationalLike) -> ChunkCertificate:
    """Sum of stretch bounds over the chunks plus 2^-k_max r for the
    polynomials not assembled."""
    r = as_fraction(r)
    chunk_total = sum((c.preimage_bound() for c in chunks), Fraction(0))
    k_max = max((c.index for c in chunks), default=0)
    rest = r / 2 ** k_max
    return ChunkCertificate(chunk_total, rest, chunk_total + rest, r)


# --- truncated minima --------------------------------------------------------

def _covers_halfopen(p: IntPolynomial, S: IntervalUnion, s: Fraction, t: Fraction) -> bool:
    """Whether (s, t] maps into a single part of S under p."""
    rlo, rhi = range_bounds(p, s, t)
    if S.find_part(rlo, rhi) is not None:
        return True
    dlo, dhi = range_bounds(p.derivative(), s, t)
    if dlo >= 0 or dhi <= 0:
        ps, pt = p(s), p(t)
        if ps == pt:
            return False
        i = S.part_index(pt)
        if i is None:
            return False
        lo, hi = S.part(i)
        # increasing: image (p(s), p(t)]; decreasing: image [p(t), p(s))
        return lo <= ps if ps < pt else ps <= hi
    return False


def in_truncated_cover(chunks: Sequence[tuple[IntPolynomial, IntervalUnion]], x: RationalLike) -> bool:
    x = as_fraction(x)
    return any(S.contains(p(x)) for p, S in chunks)


def sierpinski_min_enclosure(chunks: Sequence[tuple[IntPolynomial, IntervalUnion]], m: int,
                             budget: int = 100_000) -> Enclosure | Unknown:
    """Enclosure of width <= 2^-m of inf{x in (0,1] : x not in U_K}, where
    U_K is the union of the preimages p^{-1}(S) over the chunks.

    The point 0 is ignored: every p vanishes there, so it is covered only
    when some set contains 0, and the quantity wanted is the first gap
    after it.  The lower end comes from half-open dyadic cells (c, c+w]
    proven to lie in U_K; the upper end is a rational point checked to lie
    outside U_K.
    """
    chunks = [(p, S) for p, S in chunks if S]
    step = Fraction(1, 2 ** m)
    c, w = Fraction(0), Fraction(1, 2)
    for _ in range(budget):
        if c >= 1:
            return UNKNOWN
        t = c + w
        if any(_covers_halfopen(p, S, c, t) for p, S in chunks):
            c = t
            while w < Fraction(1, 2) and (c / (2 * w)).denominator == 1:
                w *= 2
            continue
        if w <= step and not in_truncated_cover(chunks, t):
            return Enclosure(c, t)
        w /= 2
    return UNKNOWN
