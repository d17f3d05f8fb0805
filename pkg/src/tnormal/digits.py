"""Measure queries on covers and the factorial-base digit algorithm.

At step N the current cell [d/(N+1)!, (d+1)/(N+1)!) is split into N+2
children; the child with the smallest approximate cover measure is kept.
Since (N+1)! is divisible by every b^n with b^n | (N+1)!, the kept cells fix
digits in all those bases at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import CertificateError, InsufficientIterations
from .exactset import Interval, IntervalUnion, RationalLike, as_fraction, measure_within, normalize, union_all
from .polyalg import IntPolynomial, preimage_dyadic, stretch_bound

DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


class MeasurableCover(Protocol):
    exact: bool

    def query(self, J: Interval, n: int) -> Fraction:
        """l with |μ(U ∩ J) - l| <= 2^-n."""


def _bounds(J) -> tuple[Fraction, Fraction]:
    if isinstance(J, Interval):
        return J.lo, J.hi
    lo, hi = J
    return as_fraction(lo), as_fraction(hi)


@dataclass(frozen=True)
class ExactUnion:
    """A cover given as an explicit interval union; queries are exact."""

    union: IntervalUnion
    exact: bool = field(default=True, init=False)

    def query(self, J, n: int = 0) -> Fraction:
        return measure_within(self.union, _bounds(J))

    @property
    def omitted_bound(self) -> Fraction:
        return Fraction(0)


class ChunkedPolyCover:
    """U = union over chunks of p^{-1}(S) ∩ [0, 1].

    Each chunk is a (polynomial, set) pair or a CoverChunk.  Queries
    approximate every preimage by dyadic cells to 2^-(n+1) / #chunks, so the
    union is within 2^-n of the truth in measure.  ``omitted_bound`` bounds
    the preimage measure of the parts of the full cover that were never
    built; it is reported, not subtracted.
    """

    exact = False

    def __init__(self, chunks: Sequence, r: RationalLike | None = None):
        pairs = []
        omitted = Fraction(0)
        for c in chunks:
            if isinstance(c, tuple):
                pairs.append(c)
            else:
                pairs.append((c.poly, c.set))
                if c.tail_bound:
                    omitted += stretch_bound(c.poly, c.tail_bound)
        if r is not None and chunks and not isinstance(chunks[0], tuple):
            omitted += as_fraction(r) / 2 ** max(c.index for c in chunks)
        self.pairs: list[tuple[IntPolynomial, IntervalUnion]] = [(p, S) for p, S in pairs if S]
        self.omitted_bound = omitted
        self._cache: dict[int, IntervalUnion] = {}

    def approximation(self, n: int) -> IntervalUnion:
        """Dyadic union within 2^-n of U in measure."""
        if n not in self._cache:
            extra = max(len(self.pairs) - 1, 0).bit_length()
            parts = [preimage_dyadic(p, S, n + 1 + extra) for p, S in self.pairs]
            self._cache[n] = union_all(parts)
        return self._cache[n]

    def query(self, J, n: int) -> Fraction:
        lo, hi = _bounds(J)
        if not self.pairs:
            return Fraction(0)
        value = measure_within(self.approximation(max(n, 1)), (lo, hi))
        return min(max(value, Fraction(0)), hi - lo)


def wcm_query(cover: MeasurableCover, J, n: int) -> Fraction:
    lo, hi = _bounds(J)
    if not lo < hi:
        raise ValueError("query interval must be non-empty")
    return min(max(cover.query((lo, hi), n), Fraction(0)), hi - lo)


def _exponent_for(eta: Fraction) -> int:
    """Smallest n >= 1 with 2^-n <= eta."""
    n = 1
    while Fraction(1, 2 ** n) > eta:
        n += 1
    return n


@dataclass(frozen=True)
class DigitState:
    step: int
    d: int
    slack: Fraction
    certificate: Fraction

    @property
    def resolution(self) -> int:
        return factorial(self.step + 1)

    @property
    def cell(self) -> tuple[Fraction, Fraction]:
        w = self.resolution
        return Fraction(self.d, w), Fraction(self.d + 1, w)

    def to_json(self) -> dict:
        lo, hi = self.cell
        return {"step": self.step, "d": self.d, "resolution": self.resolution,
                "cell": [str(lo), str(hi)], "slack": str(self.slack),
                "certificate": str(self.certificate)}


def initial_state(cover: MeasurableCover, epsilon: RationalLike,
                  certificate: RationalLike | None = None) -> DigitState:
    """Step 0: the whole unit cell, with μ(U ∩ [0,1]) <= 1 - ε checked."""
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if certificate is None:
        if cover.exact:
            certificate = cover.query((0, 1), 0)
        else:
            n = _exponent_for(eps / 4)
            certificate = wcm_query(cover, (0, 1), n) + Fraction(1, 2 ** n)
    certificate = as_fraction(certificate) + getattr(cover, "omitted_bound", 0)
    if certificate > 1 - eps:
        raise CertificateError(f"cover measure bound {certificate} exceeds 1 - epsilon = {1 - eps}")
    return DigitState(0, 0, eps, certificate)


def algo_step(state: DigitState, cover: MeasurableCover) -> DigitState:
    children = state.step + 2
    width = Fraction(1, factorial(state.step + 2))
    eta = state.slack / (4 * children)
    n = _exponent_for(eta)
    err = Fraction(0) if cover.exact else Fraction(1, 2 ** n)
    base = state.d * children
    best_k, best_l = 0, None
    for k in range(children):
        lo = (base + k) * width
        l = wcm_query(cover, (lo, lo + width), n)
        if best_l is None or l < best_l:
            best_k, best_l = k, l
    slack = state.slack / (2 * children)
    cert = best_l + err
    if cert > width - slack:
        raise CertificateError(f"step {state.step + 1}: certificate {cert} exceeds {width - slack}")
    return DigitState(state.step + 1, base + best_k, slack, cert)


def warm_up_first_digit(cover: MeasurableCover, epsilon: RationalLike) -> int:
    """First binary digit from a two-way split at precision ε/4; 0 on ties."""
    n = _exponent_for(as_fraction(epsilon) / 4)
    left = wcm_query(cover, (0, Fraction(1, 2)), n)
    right = wcm_query(cover, (Fraction(1, 2), 1), n)
    return 0 if left <= right else 1


def digits_available(step: int, b: int) -> int:
    """Largest n with b^n dividing (step+1)!."""
    if b < 2:
        raise ValueError("base must be at least 2")
    f, n = factorial(step + 1), 0
    while f % b == 0:
        f //= b
        n += 1
    return n


def required_step(b: int, n: int) -> int:
    """Smallest step N with b^n dividing (N+1)!."""
    N = 0
    while digits_available(N, b) < n:
        N += 1
    return N


def extract_digit_values(state: DigitState, b: int, n: int) -> list[int]:
    if digits_available(state.step, b) < n:
        need = required_step(b, n)
        raise InsufficientIterations(
            f"{n} base-{b} digits need {need} iterations, have {state.step}", need)
    w = b ** n * state.d // state.resolution
    out = []
    for _ in range(n):
        w, r = divmod(w, b)
        out.append(r)
    return out[::-1]


def extract_digits(state: DigitState, b: int, n: int) -> str:
    if b > len(DIGIT_CHARS):
        raise ValueError(f"base {b} has no single-character digits")
    return "".join(DIGIT_CHARS[v] for v in extract_digit_values(state, b, n))


@dataclass
class RunReport:
    states: list[DigitState]
    digits: dict[int, str]
    omitted_bound: Fraction
    complement_witness: Fraction | None = None

    @property
    def final(self) -> DigitState:
        return self.states[-1]

    def to_json(self) -> dict:
        out = {
            "state": self.final.to_json(),
            "digits": {str(b): s for b, s in sorted(self.digits.items())},
            "certificates": [s.to_json() for s in self.states],
            "omitted_bound": str(self.omitted_bound),
        }
        if self.complement_witness is not None:
            out["complement_witness"] = str(self.complement_witness)
        return out


def complement_point(U: IntervalUnion, lo: Fraction, hi: Fraction) -> Fraction | None:
    """Smallest point of [lo, hi] outside U, or None."""
    i = U.part_index(lo)
    if i is None:
        return lo
    right = U.part(i)[1]
    return right if right <= hi else None


def run(cover: MeasurableCover, iterations: int, epsilon: RationalLike,
        bases: Sequence[int] = (2, 3, 6), certificate: RationalLike | None = None) -> RunReport:
    state = initial_state(cover, epsilon, certificate)
    states = [state]
    for _ in range(iterations):
        state = algo_step(state, cover)
        states.append(state)
    digits = {}
    for b in bases:
        n = digits_available(state.step, b)
        if b <= len(DIGIT_CHARS):
            digits[b] = extract_digits(state, b, n)
    witness = None
    if isinstance(cover, ExactUnion):
        witness = complement_point(cover.union, *state.cell)
    return RunReport(states, digits, getattr(cover, "omitted_bound", Fraction(0)), witness)


# --- synthetic covers --------------------------------------------------------

def synthetic_cover(rng: np.random.Generator, count: int = 20, max_measure: RationalLike = Fraction(3, 4),
                    den: int = 1 << 20) -> IntervalUnion:
    """``count`` random intervals on the grid 1/den inside [0, 1], each of
    length at most max_measure/count."""
    cap = max(1, int(as_fraction(max_measure) * den) // count)
    lo = rng.integers(0, den, size=count)
    width = rng.integers(1, cap + 1, size=count)
    hi = np.minimum(lo + width, den)
    return normalize([(Fraction(int(a), den), Fraction(int(b), den)) for a, b in zip(lo, hi) if a < b])


def load_cover(path: str | Path) -> IntervalUnion:
    """Read a JSON list of [num_lo, den_lo, num_hi, den_hi] quads."""
    return IntervalUnion.from_quads(json.loads(Path(path).read_text()))
