"""Certified rational bounds for roots, powers, exp and log.

Roots are done with integer arithmetic.  exp and log go through mpmath's
interval context, whose endpoints are rounded outward, and are converted to
exact fractions.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from mpmath import iv
from mpmath.libmp import to_rational

from .exactset import RationalLike, as_fraction


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval [lo, hi] known to contain a real number."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("inverted enclosure")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def to_json(self) -> dict:
        return {"lo": [self.lo.numerator, self.lo.denominator],
                "hi": [self.hi.numerator, self.hi.denominator]}


def iroot_floor(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0:
        raise ValueError("negative radicand")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return isqrt(n)
    r = 1 << -(-n.bit_length() // k)  # r**k > n
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def iroot_ceil(n: int, k: int) -> int:
    r = iroot_floor(n, k)
    return r if r ** k == n else r + 1


def root_bounds(x: RationalLike, k: int, bits: int = 64) -> Enclosure:
    """Enclosure of x**(1/k) for rational x >= 0, exact when x is a perfect power."""
    x = as_fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    u, v = x.numerator, x.denominator
    # x^(1/k) = (u v^(k-1))^(1/k) / v
    radicand = u * v ** (k - 1)
    r = iroot_floor(radicand, k)
    if r ** k == radicand:
        val = Fraction(r, v)
        return Enclosure(val, val)
    scale = 1 << bits
    r = iroot_floor(radicand * scale ** k, k)
    return Enclosure(Fraction(r, v * scale), Fraction(r + 1, v * scale))


def root_upper(x: RationalLike, k: int, bits: int = 64) -> Fraction:
    return root_bounds(x, k, bits).hi


def root_lower(x: RationalLike, k: int, bits: int = 64) -> Fraction:
    return root_bounds(x, k, bits).lo


def sqrt_bounds(x: RationalLike, bits: int = 64) -> Enclosure:
    return root_bounds(x, 2, bits)


def power_bounds(x: RationalLike, e: RationalLike, bits: int = 64) -> Enclosure:
    """Enclosure of x**e for rational x > 0 and rational e >= 0."""
    x, e = as_fraction(x), as_fraction(e)
    if e < 0:
        raise ValueError("negative exponent")
    return root_bounds(x ** e.numerator, e.denominator, bits)


def _to_fraction(raw) -> Fraction:
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


def _interval(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


@contextmanager
def _precision(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def exp_bounds(x: RationalLike, bits: int = 96) -> Enclosure:
    x = as_fraction(x)
    if x == 0:
        return Enclosure(Fraction(1), Fraction(1))
    with _precision(bits):
        y = iv.exp(_interval(x))
    return Enclosure(_to_fraction(y._mpi_[0]), _to_fraction(y._mpi_[1]))


def log_bounds(x: RationalLike, bits: int = 96) -> Enclosure:
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("log of non-positive number")
    if x == 1:
        return Enclosure(Fraction(0), Fraction(0))
    with _precision(bits):
        y = iv.log(_interval(x))
    return Enclosure(_to_fraction(y._mpi_[0]), _to_fraction(y._mpi_[1]))


def loglog_bounds(n: int, bits: int = 96) -> Enclosure:
    """Enclosure of log log n for n >= 2."""
    if n < 2:
        raise ValueError("log log needs n >= 2")
    with _precision(bits):
        y = iv.log(iv.log(iv.mpf(n)))
    return Enclosure(_to_fraction(y._mpi_[0]), _to_fraction(y._mpi_[1]))


def phi_bounds(n: int, bits: int = 96) -> Enclosure:
    """Enclosure of sqrt(2 n log log n), with log log n clamped at 0 for n <= 2."""
    if n <= 2:
        return Enclosure(Fraction(0), Fraction(0))
    ll = loglog_bounds(n, bits)
    lo = max(ll.lo, Fraction(0))
    return Enclosure(root_lower(2 * n * lo, 2, bits // 2), root_upper(2 * n * ll.hi, 2, bits // 2))
