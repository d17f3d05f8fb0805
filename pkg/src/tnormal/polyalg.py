"""Integer polynomials vanishing at 0: ordering, constants, range enclosures
and dyadic preimages."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Iterator, Sequence

import numpy as np

from .enclose import Enclosure, root_lower, root_upper
from .exactset import Interval, IntervalUnion, RationalLike, as_fraction, normalize


@dataclass(frozen=True)
class IntPolynomial:
    """a_1 x + ... + a_d x^d + offset, with integer a_k and rational offset."""

    coeffs: tuple[int, ...]
    offset: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        cs = [int(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "offset", as_fraction(self.offset))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def in_family(self) -> bool:
        """Member of the family: nonzero, no constant term."""
        return self.degree >= 1 and self.offset == 0

    def __call__(self, x: RationalLike) -> Fraction:
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = (acc + c) * x
        return acc + self.offset

    def shifted(self, a: RationalLike) -> "IntPolynomial":
        """p - a."""
        return IntPolynomial(self.coeffs, self.offset - as_fraction(a))

    def derivative(self) -> "IntPolynomial":
        if not self.coeffs:
            return IntPolynomial(())
        return IntPolynomial(tuple(k * c for k, c in enumerate(self.coeffs[1:], start=2)),
                             Fraction(self.coeffs[0]))

    def __str__(self) -> str:
        terms = []
        for k in range(self.degree, 0, -1):
            c = self.coeffs[k - 1]
            if c == 0:
                continue
            mono = "x" if k == 1 else f"x^{k}"
            mag = "" if abs(c) == 1 else str(abs(c))
            sign = "-" if c < 0 else "+"
            terms.append((sign, mag + mono))
        if self.offset:
            terms.append(("-" if self.offset < 0 else "+", str(abs(self.offset))))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return " ".join([head, *(f"{s} {t}" for s, t in terms[1:])])

    def to_json(self) -> dict:
        out: dict = {"coeffs": list(self.coeffs)}
        if self.offset:
            out["offset"] = [self.offset.numerator, self.offset.denominator]
        return out

    @classmethod
    def from_json(cls, obj) -> "IntPolynomial":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls(tuple(obj))
        off = obj.get("offset", [0, 1])
        return cls(tuple(obj["coeffs"]), Fraction(off[0], off[1]))


def poly(*coeffs: int) -> IntPolynomial:
    """Shorthand: poly(0, 1) is x^2, poly(-1, 0, 2) is 2x^3 - x."""
    return IntPolynomial(tuple(coeffs))


@dataclass(frozen=True)
class PolyConstants:
    degree: int
    pnorm: int
    lipschitz: int
    stretch_K: int
    singular_C: int


def pnorm(p: IntPolynomial) -> int:
    return sum(abs(c) << k for k, c in enumerate(p.coeffs, start=1))


def lipschitz(p: IntPolynomial) -> int:
    return sum(k * abs(c) for k, c in enumerate(p.coeffs, start=1))


def stretch_K(d: int) -> int:
    return 4 * d ** 4 * (d + 1) ** (d + 1)


def singular_C(d: int) -> int:
    return (d + 1) ** (d * (d + 1))


def poly_constants(p: IntPolynomial) -> PolyConstants:
    d = p.degree
    if d < 1:
        raise ValueError("degree-0 polynomial has no stretch constants")
    return PolyConstants(d, pnorm(p), lipschitz(p), stretch_K(d), singular_C(d))


# --- enumeration ---------------------------------------------------------

def _shell(norm: int, k: int = 1) -> Iterator[tuple[int, ...]]:
    """Coefficient tuples (a_k, a_{k+1}, ...) with sum 2^j |a_j| = norm and
    no trailing zeros."""
    if norm == 0:
        yield ()
        return
    w = 1 << k
    if w > norm:
        return
    for tail in _shell(norm, k + 1):
        yield (0, *tail)
    for mag in range(1, norm // w + 1):
        for tail in _shell(norm - mag * w, k + 1):
            yield (mag, *tail)
            yield (-mag, *tail)


def _norm_shell(norm: int) -> list[tuple[int, ...]]:
    vecs = list(_shell(norm))
    width = max(len(v) for v in vecs)
    # equal norm: larger coefficient at the first differing index comes first
    vecs.sort(key=lambda v: tuple(-c for c in v) + (0,) * (width - len(v)))
    return vecs


_ORDER: list[tuple[int, ...]] = []
_INDEX: dict[tuple[int, ...], int] = {}
_NEXT_NORM = [2]


def _extend_order(k: int) -> None:
    while len(_ORDER) < k:
        for v in _norm_shell(_NEXT_NORM[0]):
            _INDEX[v] = len(_ORDER) + 1
            _ORDER.append(v)
        _NEXT_NORM[0] += 2


def enumerate_P(k: int) -> IntPolynomial:
    """The k-th polynomial (1-based) in the order: smaller norm first, then
    larger coefficient at the lowest differing index."""
    if k < 1:
        raise ValueError("index starts at 1")
    _extend_order(k)
    return IntPolynomial(_ORDER[k - 1])


def index_of(p: IntPolynomial) -> int:
    """Inverse of enumerate_P."""
    if not p.in_family:
        raise ValueError("not a member of the family")
    target = pnorm(p)
    while _NEXT_NORM[0] <= target:
        _extend_order(len(_ORDER) + 1)
    return _INDEX[p.coeffs]


def precedes(p: IntPolynomial, q: IntPolynomial) -> bool:
    """Strict order test straight from the definition."""
    np_, nq = pnorm(p), pnorm(q)
    if np_ != nq:
        return np_ < nq
    width = max(p.degree, q.degree)
    a = p.coeffs + (0,) * (width - p.degree)
    b = q.coeffs + (0,) * (width - q.degree)
    for x, y in zip(a, b):
        if x != y:
            return x > y
    return False


# --- stretch bound ---------------------------------------------------------

def stretch_bound(p: IntPolynomial, delta: RationalLike, bits: int = 64) -> Fraction:
    """Certified upper bound min(1, K_d delta^(1/d)) on the measure of
    p^{-1}(A) in [0,1] over all A of measure at most delta."""
    delta = as_fraction(delta)
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if delta == 0:
        return Fraction(0)
    d = p.degree
    if d < 1:
        raise ValueError("constant polynomial")
    return min(Fraction(1), stretch_K(d) * root_upper(delta, d, bits))


def stretch_radius(p: IntPolynomial, target: RationalLike) -> Fraction:
    """Exact radius rho with K_d rho^(1/d) = target, i.e. (target/K_d)^d."""
    d = p.degree
    return (as_fraction(target) / stretch_K(d)) ** d


# --- range enclosures ------------------------------------------------------

def _power_range(lo: Fraction, hi: Fraction, k: int) -> tuple[Fraction, Fraction]:
    a, b = lo ** k, hi ** k
    if k % 2:
        return a, b
    if lo >= 0:
        return a, b
    if hi <= 0:
        return b, a
    return Fraction(0), max(a, b)


def _natural_range(p: IntPolynomial, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    rlo = rhi = p.offset
    for k, c in enumerate(p.coeffs, start=1):
        if c == 0:
            continue
        a, b = _power_range(lo, hi, k)
        if c > 0:
            rlo += c * a
            rhi += c * b
        else:
            rlo += c * b
            rhi += c * a
    return rlo, rhi


def range_bounds(p: IntPolynomial, lo: RationalLike, hi: RationalLike) -> tuple[Fraction, Fraction]:
    """Closed bounds on p over [lo, hi]: the intersection of the term-wise
    interval extension and the mean-value form."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    nlo, nhi = _natural_range(p, lo, hi)
    if p.degree <= 1:
        return nlo, nhi
    dlo, dhi = _natural_range(p.derivative(), lo, hi)
    mid = (lo + hi) / 2
    center = p(mid)
    slope = max(abs(dlo), abs(dhi))
    r = slope * (hi - lo) / 2
    return max(nlo, center - r), min(nhi, center + r)


def eval_on_interval(p: IntPolynomial, D) -> Enclosure:
    """Closed enclosure of {p(x) : x in D}."""
    lo, hi = (D.lo, D.hi) if isinstance(D, Interval) else map(as_fraction, D)
    rlo, rhi = range_bounds(p, lo, hi)
    return Enclosure(rlo, rhi)


# --- dyadic preimages ------------------------------------------------------

def grid_depth(p: IntPolynomial, m: int, parts: int = 1) -> int:
    """Dyadic depth H for a 2^-m preimage approximation.

    Takes the larger of the published choice K_d 2^{-(H-3)/d} <= 2^-m and the
    depth at which the boundary layers, 2*parts intervals of width
    2 L_p 2^-H, provably carry preimage measure at most 2^-m.
    """
    d = p.degree
    K = stretch_K(d)
    published = 3 + ((K ** d << (m * d)) - 1).bit_length()
    needed = 4 * parts * max(lipschitz(p), 1) * K ** d << (m * d)
    certified = (needed - 1).bit_length()
    return max(published, certified)


def _as_target(I) -> IntervalUnion:
    if isinstance(I, IntervalUnion):
        return I
    if isinstance(I, Interval):
        return normalize([I])
    return normalize([I])


def _cell_test(p: IntPolynomial, target: IntervalUnion, lo: Fraction, hi: Fraction):
    """True: every point of [lo, hi] maps into one part; False: no point maps
    into the target; None: undecided."""
    rlo, rhi = range_bounds(p, lo, hi)
    if target.find_part(rlo, rhi) is not None:
        return True
    if not target.intersects(rlo, rhi):
        return False
    return None


def preimage_dyadic(p: IntPolynomial, I, m: int, max_cells: int | None = None) -> IntervalUnion:
    """Dyadic approximation V of p^{-1}(I) ∩ [0,1] with μ(V Δ p^{-1}(I)) <= 2^-m.

    A cell of the depth-H grid belongs to V when both endpoints map into the
    same part of I.  Instead of visiting all 2^H cells, coarse cells whose
    range enclosure lies inside one part (or misses I entirely) are decided
    at once; this gives the same set as the exhaustive scan.
    """
    if m < 1:
        raise ValueError("precision exponent must be positive")
    target = _as_target(I)
    if not target:
        return IntervalUnion()
    H = grid_depth(p, m, len(target))
    scale = 1 << H
    cells: list[tuple[int, int]] = []
    stack = [(0, 0)]  # (depth, index); popped left to right
    visited = 0
    while stack:
        t, j = stack.pop()
        visited += 1
        if max_cells is not None and visited > max_cells:
            raise ResourceWarning(f"preimage refinement exceeded {max_cells} cells")
        lo, hi = Fraction(j, 1 << t), Fraction(j + 1, 1 << t)
        verdict = _cell_test(p, target, lo, hi)
        if verdict is None and t == H:
            a, b = p(lo), p(hi)
            verdict = target.find_part(min(a, b), max(a, b)) is not None
        if verdict is None:
            stack.append((t + 1, 2 * j + 1))
            stack.append((t + 1, 2 * j))
        elif verdict:
            s = H - t
            lo_n, hi_n = j << s, (j + 1) << s
            if cells and cells[-1][1] == lo_n:
                cells[-1] = (cells[-1][0], hi_n)
            else:
                cells.append((lo_n, hi_n))
    return IntervalUnion.from_sorted_grid(scale, [c[0] for c in cells], [c[1] for c in cells])


# --- least singular value ---------------------------------------------------

def vandermonde(d: int) -> list[list[int]]:
    return [[i ** (j - 1) for j in range(1, d + 2)] for i in range(1, d + 2)]


def singular_lower_bound(d: int) -> Fraction:
    """Certified lower bound |det A| ((n-1)/||A||_F^2)^((n-1)/2) on the least
    singular value of the (d+1)x(d+1) matrix A_ij = i^(j-1)."""
    n = d + 1
    A = vandermonde(d)
    det = prod(j - i for i in range(1, n + 1) for j in range(i + 1, n + 1))
    frob = sum(v * v for row in A for v in row)
    ratio = Fraction(n - 1, frob)
    return det * root_lower(ratio ** (n - 1), 2)


def singular_floor_check(d: int, margin: Fraction = Fraction(1, 1 << 20)) -> bool:
    """Numerical least singular value of A^(d) clears (1 + margin) / C_d, and
    the exact determinant bound clears 1 / C_d."""
    if not 1 <= d <= 8:
        raise ValueError("desk-scale check covers 1 <= d <= 8")
    s = np.linalg.svd(np.array(vandermonde(d), dtype=float), compute_uv=False)
    floor = Fraction(1, singular_C(d))
    numeric = Fraction(float(s.min())) >= (1 + margin) * floor
    return numeric and singular_lower_bound(d) >= floor


# --- stretch audit -----------------------------------------------------------

@dataclass(frozen=True)
class StretchAuditCase:
    interval: tuple[Fraction, Fraction]
    preimage_upper: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.preimage_upper <= self.bound


def audit_interval(p: IntPolynomial, lo: RationalLike, hi: RationalLike, m: int = 20) -> StretchAuditCase:
    """Compare μ(V) + 2^-m, where V = preimage_dyadic(p, (lo, hi), m), with
    stretch_bound(p, hi - lo)."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    V = preimage_dyadic(p, (lo, hi), m)
    return StretchAuditCase((lo, hi), V.measure() + Fraction(1, 2 ** m), stretch_bound(p, hi - lo))


def audit_intervals(p: IntPolynomial, rng: np.random.Generator, count: int,
                    min_exp: int = 2, max_exp: int = 60) -> list[tuple[Fraction, Fraction]]:
    """Seeded intervals of width 2^-u, u in [min_exp, max_exp], inside
    (-L_p - 1, L_p + 1)."""
    reach = lipschitz(p) + 1
    grid = 1 << 32
    out = []
    for _ in range(count):
        u = int(rng.integers(min_exp, max_exp + 1))
        width = Fraction(1, 1 << u)
        span = 2 * reach - width
        lo = -reach + span * Fraction(int(rng.integers(1, grid)), grid)
        out.append((lo, lo + width))
    return out
