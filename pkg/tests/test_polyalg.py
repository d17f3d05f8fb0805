from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tnormal.exactset import normalize
from tnormal.polyalg import (IntPolynomial, audit_interval, audit_intervals, enumerate_P, eval_on_interval,
                             index_of, lipschitz, poly, poly_constants, precedes, preimage_dyadic,
                             singular_floor_check, stretch_bound)
from oracles import ball, ball_sorted, pnorm


def test_first_is_x():
    assert enumerate_P(1) == poly(1)


def test_first_six():
    assert [str(enumerate_P(k)) for k in range(1, 7)] == ["x", "-x", "2x", "x^2", "-x^2", "-2x"]


def test_first_fifty_match_ball_sort():
    expected = ball_sorted(12)[:50]
    assert [enumerate_P(k).coeffs for k in range(1, 51)] == expected


def test_round_trip_norm_12():
    polys = ball(12)
    indices = [index_of(IntPolynomial(c)) for c in polys]
    assert len(set(indices)) == len(polys)
    for c, k in zip(polys, indices):
        assert enumerate_P(k).coeffs == c


def test_order_is_strict():
    for k in range(1, 200):
        assert precedes(enumerate_P(k), enumerate_P(k + 1))
        assert not precedes(enumerate_P(k + 1), enumerate_P(k))
        assert pnorm(enumerate_P(k).coeffs) <= pnorm(enumerate_P(k + 1).coeffs)


@pytest.mark.parametrize("p,expected", [
    (poly(1), (1, 2, 1, 16, 4)),
    (poly(0, 1), (2, 4, 2, 1728, 729)),
    (poly(-1, 0, 2), (3, 18, 7, 82944, 4 ** 12)),
])
def test_constants(p, expected):
    c = poly_constants(p)
    assert (c.degree, c.pnorm, c.lipschitz, c.stretch_K, c.singular_C) == expected


def test_constants_reject_degree_zero():
    with pytest.raises(ValueError):
        poly_constants(IntPolynomial(()))


def test_stretch_bound_examples():
    assert stretch_bound(poly(1), F(1, 2 ** 10)) == F(1, 64)
    assert stretch_bound(poly(0, 1), 0) == 0
    assert stretch_bound(poly(0, 1), F(1, 2 ** 40)) >= F(1728, 2 ** 20)
    assert stretch_bound(poly(0, 1), F(1, 2)) == 1


@given(st.integers(1, 10 ** 6), st.integers(1, 10 ** 6), st.integers(2, 5))
def test_stretch_bound_is_upper(a, b, d):
    delta = F(min(a, b), max(a, b))
    p = IntPolynomial((0,) * (d - 1) + (1,))
    bound = stretch_bound(p, delta)
    assert bound == 1 or bound ** d >= (4 * d ** 4 * (d + 1) ** (d + 1)) ** d * delta


def test_eval_on_interval_examples():
    e = eval_on_interval(poly(1), (F(1, 4), F(3, 4)))
    assert (e.lo, e.hi) == (F(1, 4), F(3, 4))
    e = eval_on_interval(poly(0, 1), (F(1, 4), F(1, 2)))
    assert e.lo <= F(1, 16) and e.hi >= F(1, 4)
    e = eval_on_interval(poly(-1, 1), (0, 1))
    assert e.lo <= F(-1, 4) and e.hi >= 0


def test_eval_on_interval_sound_seeded():
    rng = np.random.default_rng(11)
    polys = [poly(0, 1), poly(-1, 1), poly(1, 0, -3), poly(2, -5, 0, 1)]
    for _ in range(10 ** 4 // 50):
        p = polys[int(rng.integers(len(polys)))]
        a, b = sorted(F(int(v), 1 << 20) for v in rng.integers(-(1 << 20), 2 << 20, size=2))
        if a == b:
            continue
        e = eval_on_interval(p, (a, b))
        for t in rng.integers(0, 1 << 16, size=50):
            x = a + (b - a) * F(int(t), 1 << 16)
            assert e.lo <= p(x) <= e.hi


@given(st.integers(0, 1 << 12), st.integers(1, 1 << 12), st.integers(0, 3))
def test_eval_width_shrinks(start, w, which):
    p = [poly(0, 1), poly(-1, 1), poly(1, 0, -3), poly(2, -5, 0, 1)][which]
    lo = F(start, 1 << 12) * F(1, 2)
    hi = lo + F(w, 1 << 14)
    e = eval_on_interval(p, (lo, hi))
    assert e.hi - e.lo <= lipschitz(p) * (hi - lo)


def _inverse_bracket(p, y, bits=48):
    """[t_lo, t_hi] of width 2^-bits containing p^{-1}(y) for increasing p on [0,1]."""
    if y <= 0:
        return F(0), F(0)
    if y >= p(1):
        return F(1), F(1)
    lo, hi = F(0), F(1)
    for _ in range(bits):
        mid = (lo + hi) / 2
        if p(mid) < y:
            lo = mid
        else:
            hi = mid
    return lo, hi


@pytest.mark.parametrize("p,I,exact", [
    (poly(1), (F(1, 4), F(1, 2)), (F(1, 4), F(1, 2))),
    (poly(0, 1), (0, F(1, 4)), (0, F(1, 2))),
    (poly(2), (F(1, 2), F(3, 2)), (F(1, 4), F(3, 4))),
])
@pytest.mark.parametrize("m", [4, 10, 20])
def test_preimage_examples(p, I, exact, m):
    V = preimage_dyadic(p, I, m)
    assert V.symmetric_difference_measure(normalize([exact])) <= F(1, 2 ** m)


@pytest.mark.parametrize("p", [poly(0, 1), poly(0, 0, 1), poly(1, 2)])
def test_preimage_close_to_bisection_oracle(p):
    rng = np.random.default_rng(5)
    m = 16
    for _ in range(8):
        lo, hi = sorted(F(int(v), 1 << 16) * p(1) for v in rng.integers(0, 1 << 16, size=2))
        if lo == hi:
            continue
        V = preimage_dyadic(p, (lo, hi), m)
        (a0, a1), (b0, b1) = _inverse_bracket(p, lo), _inverse_bracket(p, hi)
        # true preimage is (a, b) with a in [a0, a1], b in [b0, b1]
        assert V.measure() <= b1 - a0 + F(1, 2 ** m)
        assert V.measure() >= b0 - a1 - F(1, 2 ** m)
        assert V.measure() - V.measure_within((a0, b1)) <= F(1, 2 ** m)


@pytest.mark.parametrize("p", [poly(0, 1), poly(-1, 1), poly(1, 0, -3)])
def test_preimage_refinement(p):
    I = normalize([(F(-1, 7), F(1, 9)), (F(1, 5), F(2, 3))])
    for m in (3, 6, 9):
        a, b = preimage_dyadic(p, I, m), preimage_dyadic(p, I, m + 4)
        assert a.symmetric_difference_measure(b) <= F(1, 2 ** m) + F(1, 2 ** (m + 4))


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6, 7, 8])
def test_singular_floor(d):
    assert singular_floor_check(d)


def test_singular_d1_closed_form():
    # A = [[1,1],[1,2]]: s_min = (3 - sqrt 5)/2 ≈ 0.382 >= 1/4
    s = np.linalg.svd(np.array([[1.0, 1.0], [1.0, 2.0]]), compute_uv=False).min()
    assert abs(s - (3 - 5 ** 0.5) / 2) < 1e-12
    assert singular_floor_check(1)


def test_json_round_trip():
    p = poly(2, 0, -1).shifted(F(1, 3))
    assert IntPolynomial.from_json(p.to_json()) == p
    assert p(F(1, 2)) == 2 * F(1, 2) - F(1, 8) - F(1, 3)


def test_stretch_audit_sample():
    rng = np.random.default_rng(2)
    p = poly(1, 2)
    for lo, hi in audit_intervals(p, rng, 40):
        assert -lipschitz(p) - 1 < lo < hi < lipschitz(p) + 1
        assert hi - lo <= F(1, 4)
        assert audit_interval(p, lo, hi).ok
