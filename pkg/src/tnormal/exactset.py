"""Finite unions of open intervals with exact rational endpoints.

A union is stored over a single common denominator: ``los[i]/den`` and
``his[i]/den`` are the endpoints of the i-th part.  The denominator is the
least one that works, so two unions are equal exactly when their
``(den, los, his)`` triples agree.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from fractions import Fraction
from itertools import accumulate
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Iterator, Sequence, Union

RationalLike = Union[int, Fraction, str]


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class Interval:
    """Open interval (lo, hi) with lo < hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: RationalLike, hi: RationalLike):
        lo, hi = as_fraction(lo), as_fraction(hi)
        if not lo < hi:
            raise ValueError(f"empty interval ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo < x < self.hi

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self) -> str:
        return f"Interval({self.lo}, {self.hi})"


def _pair(raw) -> tuple[Fraction, Fraction]:
    if isinstance(raw, Interval):
        return raw.lo, raw.hi
    lo, hi = raw
    return as_fraction(lo), as_fraction(hi)


class IntervalUnion:
    """Normalized union of disjoint open intervals, sorted by left endpoint.

    Touching parts such as (0, 1/2) and (1/2, 1) stay separate because the
    shared point is not in the set.
    """

    __slots__ = ("den", "los", "his", "_prefix", "_measure")

    def __init__(self, den: int = 1, los: Sequence[int] = (), his: Sequence[int] = ()):
        # Trusted constructor: parts already sorted, disjoint and non-overlapping.
        # Use normalize() or from_sorted_grid() for anything else.
        self.den = den
        self.los = tuple(los)
        self.his = tuple(his)
        self._prefix = None
        self._measure = None

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls()

    @classmethod
    def from_sorted_grid(cls, den: int, los: Sequence[int], his: Sequence[int]) -> "IntervalUnion":
        """Build from sorted, non-overlapping integer numerators over ``den``.

        Overlaps are not checked; the result is reduced to its least
        denominator.
        """
        if not los:
            return cls()
        g = gcd(den, gcd(*los), gcd(*his))
        if g > 1:
            den //= g
            los = [v // g for v in los]
            his = [v // g for v in his]
        return cls(den, los, his)

    def __len__(self) -> int:
        return len(self.los)

    def __bool__(self) -> bool:
        return bool(self.los)

    def __iter__(self) -> Iterator[Interval]:
        den = self.den
        for a, b in zip(self.los, self.his):
            yield Interval(Fraction(a, den), Fraction(b, den))

    @property
    def parts(self) -> tuple[Interval, ...]:
        return tuple(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        if not self.los and not other.los:
            return True
        return self.den == other.den and self.los == other.los and self.his == other.his

    def __hash__(self) -> int:
        if not self.los:
            return hash(())
        return hash((self.den, self.los, self.his))

    def __repr__(self) -> str:
        shown = ", ".join(f"({p.lo}, {p.hi})" for p in list(self)[:6])
        more = f", ... {len(self) - 6} more" if len(self) > 6 else ""
        return f"IntervalUnion[{shown}{more}]"

    def hull(self) -> Interval | None:
        if not self.los:
            return None
        return Interval(Fraction(self.los[0], self.den), Fraction(self.his[-1], self.den))

    def measure(self) -> Fraction:
        if self._measure is None:
            self._measure = Fraction(sum(self.his) - sum(self.los), self.den)
        return self._measure

    def _lengths_prefix(self) -> list[int]:
        if self._prefix is None:
            self._prefix = [0, *accumulate(b - a for a, b in zip(self.los, self.his))]
        return self._prefix

    def measure_within(self, J) -> Fraction:
        return measure_within(self, J)

    def contains(self, x: RationalLike) -> bool:
        if not self.los:
            return False
        t = as_fraction(x) * self.den
        i = bisect_left(self.los, t) - 1
        return i >= 0 and t < self.his[i]

    __contains__ = contains

    def part_index(self, x: RationalLike) -> int | None:
        """Index of the part containing x, or None."""
        if not self.los:
            return None
        t = as_fraction(x) * self.den
        i = bisect_left(self.los, t) - 1
        return i if i >= 0 and t < self.his[i] else None

    def part(self, i: int) -> tuple[Fraction, Fraction]:
        return Fraction(self.los[i], self.den), Fraction(self.his[i], self.den)

    def find_part(self, lo: Fraction, hi: Fraction) -> int | None:
        """Index of a part containing the closed interval [lo, hi], if any."""
        if not self.los:
            return None
        a, b = lo * self.den, hi * self.den
        i = bisect_right(self.los, a) - 1
        if i >= 0 and self.los[i] < a and b < self.his[i]:
            return i
        return None

    def intersects(self, lo: Fraction, hi: Fraction) -> bool:
        """Whether the closed interval [lo, hi] meets the union."""
        if not self.los:
            return False
        a, b = lo * self.den, hi * self.den
        i = bisect_right(self.his, a)
        return i < len(self.los) and self.los[i] < b

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return union_all((self, other))

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        if not self.los or not other.los:
            return IntervalUnion()
        den = lcm(self.den, other.den)
        s, t = den // self.den, den // other.den
        a_lo = [v * s for v in self.los]
        a_hi = [v * s for v in self.his]
        b_lo = [v * t for v in other.los]
        b_hi = [v * t for v in other.his]
        los, his = [], []
        i = j = 0
        while i < len(a_lo) and j < len(b_lo):
            lo = max(a_lo[i], b_lo[j])
            hi = min(a_hi[i], b_hi[j])
            if lo < hi:
                los.append(lo)
                his.append(hi)
            if a_hi[i] <= b_hi[j]:
                i += 1
            else:
                j += 1
        return IntervalUnion.from_sorted_grid(den, los, his)

    def symmetric_difference_measure(self, other: "IntervalUnion") -> Fraction:
        return self.measure() + other.measure() - 2 * self.intersection(other).measure()

    def pad_translate(self, shift: RationalLike, pad: RationalLike = 0) -> "IntervalUnion":
        return pad_translate(self, shift, pad)

    def to_json(self) -> str:
        return json.dumps(self.to_quads())

    def to_quads(self) -> list[list[int]]:
        out = []
        for p in self:
            out.append([p.lo.numerator, p.lo.denominator, p.hi.numerator, p.hi.denominator])
        return out

    @classmethod
    def from_quads(cls, quads: Iterable[Sequence[int]]) -> "IntervalUnion":
        return normalize([(Fraction(a, b), Fraction(c, d)) for a, b, c, d in quads])

    @classmethod
    def from_json(cls, text: str) -> "IntervalUnion":
        return cls.from_quads(json.loads(text))


def normalize(raw: Iterable) -> IntervalUnion:
    """Canonical union of the given open intervals.

    Accepts Interval objects or (lo, hi) pairs; pairs with lo >= hi are empty
    and dropped.
    """
    pairs = [pr for pr in map(_pair, raw) if pr[0] < pr[1]]
    if not pairs:
        return IntervalUnion()
    den = lcm(*(x.denominator for pr in pairs for x in pr))
    ints = sorted((lo.numerator * (den // lo.denominator), hi.numerator * (den // hi.denominator))
                  for lo, hi in pairs)
    los, his = [ints[0][0]], [ints[0][1]]
    for lo, hi in ints[1:]:
        if lo < his[-1]:
            if hi > his[-1]:
                his[-1] = hi
        else:
            los.append(lo)
            his.append(hi)
    return IntervalUnion.from_sorted_grid(den, los, his)


def measure_within(U: IntervalUnion, J) -> Fraction:
    """Exact measure of U ∩ J."""
    if not U.los:
        return Fraction(0)
    lo, hi = _pair(J)
    if not lo < hi:
        return Fraction(0)
    a, b = lo * U.den, hi * U.den
    i0 = bisect_right(U.his, a)
    i1 = bisect_left(U.los, b)
    if i0 >= i1:
        return Fraction(0)
    prefix = U._lengths_prefix()
    total = Fraction(prefix[i1] - prefix[i0])
    if U.los[i0] < a:
        total -= a - U.los[i0]
    if U.his[i1 - 1] > b:
        total -= U.his[i1 - 1] - b
    return total / U.den


def pad_translate(U: IntervalUnion, shift: RationalLike, pad: RationalLike = 0) -> IntervalUnion:
    """Translate U by ``shift`` and take the Minkowski sum with (-pad, pad)."""
    shift, pad = as_fraction(shift), as_fraction(pad)
    if pad < 0:
        raise ValueError("pad must be non-negative")
    if not U.los:
        return IntervalUnion()
    den = lcm(U.den, shift.denominator, pad.denominator)
    k = den // U.den
    s = shift.numerator * (den // shift.denominator)
    w = pad.numerator * (den // pad.denominator)
    los, his = [U.los[0] * k + s - w], [U.his[0] * k + s + w]
    for a, b in zip(U.los[1:], U.his[1:]):
        lo, hi = a * k + s - w, b * k + s + w
        if lo < his[-1]:
            his[-1] = hi
        else:
            los.append(lo)
            his.append(hi)
    return IntervalUnion.from_sorted_grid(den, los, his)


def union_all(unions: Iterable[IntervalUnion]) -> IntervalUnion:
    unions = [u for u in unions if u.los]
    if not unions:
        return IntervalUnion()
    if len(unions) == 1:
        return unions[0]
    den = lcm(*(u.den for u in unions))
    ints = []
    for u in unions:
        k = den // u.den
        ints.extend(zip((v * k for v in u.los), (v * k for v in u.his)))
    ints.sort()
    los, his = [ints[0][0]], [ints[0][1]]
    for lo, hi in ints[1:]:
        if lo < his[-1]:
            if hi > his[-1]:
                his[-1] = hi
        else:
            los.append(lo)
            his.append(hi)
    return IntervalUnion.from_sorted_grid(den, los, his)
