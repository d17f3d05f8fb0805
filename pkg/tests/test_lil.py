from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tnormal.enclose import loglog_bounds
from tnormal.exactset import pad_translate
from tnormal.lil import (C_P, BadicPair, OrbitPoints, RWParams, assemble_lil_radii, build_block_sets_toy,
                         correlations, discrepancy_series, extreme_discrepancy, find_N_M, lil_constant,
                         low_tail, philipp_constants, philipp_eval, philipp_H, philipp_n_L, philipp_rho,
                         restricted_discrepancy, rw_tails, rw_thresholds, sigma_exact, solve_N_M, up_tail)
from oracles import block_variance_mc, correlation_integral, discrepancy_bruteforce, sigma_sq_limit


def test_discrepancy_examples():
    assert extreme_discrepancy([F(3, 7)]) == 1
    assert extreme_discrepancy([F(1, 3), F(2, 3)]) == F(2, 3)
    assert extreme_discrepancy([0, F(1, 2), F(1, 4), F(3, 4)]) == F(1, 4)


def test_discrepancy_seeded_sets():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        N = int(rng.integers(1, 65))
        q = int(rng.integers(2, 500))
        pts = [F(int(v), q) for v in rng.integers(0, q, size=N)]
        assert extreme_discrepancy(pts) == discrepancy_bruteforce(pts)


@given(st.fractions(min_value=0, max_value=1, max_denominator=10 ** 6).filter(lambda x: x < 1),
       st.integers(2, 10), st.integers(1, 30))
@settings(max_examples=60, deadline=None)
def test_orbit_discrepancy_matches_oracle(x, b, N):
    orbit = OrbitPoints.of(x, b, N)
    assert orbit.points == [(b ** j * x) % 1 for j in range(N)]
    assert extreme_discrepancy(orbit) == discrepancy_bruteforce(orbit.points)


def test_discrepancy_series_prefixes():
    series = discrepancy_series(F(1, 3), 2, [1, 2, 4])
    assert series == [(1, 1), (2, F(2, 3)), (4, F(2, 3))]


def test_restricted_examples():
    orbit = OrbitPoints.of(F(1, 3), 2, 2)
    half = BadicPair(1, 0, 1, 2)
    assert restricted_discrepancy(orbit, 2, half) == 0
    assert restricted_discrepancy(orbit, 1, half) == F(1, 2)


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=1000).filter(lambda x: x < 1),
                min_size=1, max_size=20), st.integers(1, 3), st.integers(2, 4))
def test_restricted_full_pair_is_zero(pts, L, b):
    assert restricted_discrepancy(pts, len(pts), BadicPair(L, 0, b ** L, b)) == 0


def test_pair_validation():
    with pytest.raises(ValueError):
        BadicPair(1, 1, 1, 2)
    with pytest.raises(ValueError):
        BadicPair(1, 0, 3, 2)


def test_lil_constants():
    assert lil_constant(3).lo == lil_constant(3).hi == 1
    e = lil_constant(2)
    assert e.lo ** 2 <= F(84, 81) <= e.hi ** 2 and e.width <= F(1, 2 ** 30)
    e = lil_constant(4)
    assert e.lo ** 2 <= F(20, 27) <= e.hi ** 2 and e.width <= F(1, 2 ** 30)
    assert abs(float(lil_constant(2).lo) - 1.01835) < 1e-5


@pytest.mark.parametrize("b", [5, 6, 7, 10])
def test_lil_constant_cases(b):
    e = lil_constant(b)
    sq = F(b + 1, 2 * (b - 1)) if b % 2 else F(b * (b + 1) * (b - 2), 2 * (b - 1) ** 3)
    assert e.lo ** 2 <= sq <= e.hi ** 2


def test_sigma_examples():
    assert sigma_exact(BadicPair(1, 0, 1, 2)) == F(1, 4)
    for M in (1, 3, None):
        assert sigma_exact(BadicPair(1, 0, 2, 2), M) == 0
    assert sigma_exact(BadicPair(2, 0, 1, 2)) == F(5, 16)


@pytest.mark.parametrize("b,L,qa,qa2", [(2, 2, 0, 1), (2, 2, 1, 3), (3, 2, 2, 7), (2, 3, 3, 5)])
def test_correlations_match_grid_oracle(b, L, qa, qa2):
    pair = BadicPair(L, qa, qa2, b)
    assert correlations(pair) == [correlation_integral(b, L, qa, qa2, j) for j in range(L)]
    assert sigma_exact(pair) == sigma_sq_limit(b, L, qa, qa2)


@pytest.mark.parametrize("b,L,qa,qa2", [(2, 2, 0, 1), (2, 2, 1, 3), (3, 2, 2, 7), (2, 3, 3, 5)])
def test_sigma_M_converges(b, L, qa, qa2):
    pair = BadicPair(L, qa, qa2, b)
    limit = sigma_exact(pair)
    gaps = [abs(sigma_exact(pair, M) - limit) for M in range(1, 12)]
    assert all(x >= y for x, y in zip(gaps, gaps[1:]))


@pytest.mark.parametrize("b,L,qa,qa2", [(2, 1, 0, 1), (2, 2, 0, 1), (3, 2, 2, 7)])
def test_sigma_M_monte_carlo(b, L, qa, qa2):
    exact = sigma_exact(BadicPair(L, qa, qa2, b), 4)
    mean, se = block_variance_mc(b, L, qa, qa2, 4, 10 ** 5, seed=17)
    assert abs(mean - float(exact)) <= 4 * se


def test_tail_examples():
    assert up_tail(1, 100) == F(8, 100)
    assert low_tail(1600) == 1
    assert low_tail(10 ** 6) == F(80, 1000)


def test_threshold_example():
    th = rw_thresholds(RWParams(1, F(1, 4), 1))
    assert 10.1 < float(th.A) < 10.25
    # rounded up: exceeds the float evaluation of the closed formula
    q = np.exp(-0.5)
    assert float(th.A) >= 1 / ((np.log(q)) ** 2 * (1 - q)) * (1 - 1e-12)


@pytest.mark.parametrize("N0", [100, 400])
def test_tails_dominate_simulated_walks(N0):
    rng = np.random.default_rng(N0)
    walks, horizon, delta = 10 ** 4, 4 * N0, F(1, 2)
    steps = rng.choice(np.array([-1, 1], dtype=np.int8), size=(walks, horizon))
    S = np.cumsum(steps, axis=1, dtype=np.int32)
    Ns = np.arange(1, horizon + 1)
    ll = np.array([float(loglog_bounds(int(n)).hi) if n > 2 else 0.0 for n in Ns])
    phi = np.sqrt(2 * Ns * ll)
    window = slice(N0 - 1, horizon)
    up = (np.abs(S[:, window]) > (1 + float(delta)) * phi[window]).any(axis=1).mean()
    tails = rw_tails(RWParams(delta, 1, 1, N0))
    assert up <= float(tails.up)
    # the lower event at N = N0 with k = 2 only, so the walk runs to N0^2 steps
    short = rng.choice(np.array([-1, 1], dtype=np.int8), size=(2000, N0 * N0)).sum(axis=1, dtype=np.int64)
    n2 = N0 * N0
    low = (np.abs(short) < (1 - float(delta)) * np.sqrt(2 * n2 * float(loglog_bounds(n2).lo))).mean()
    assert low <= float(tails.low)


def test_find_N_M_is_smallest_power():
    pair = BadicPair(1, 0, 1, 2)
    rep = solve_N_M(F(1, 2), 1, pair)
    assert rep.N & (rep.N - 1) == 0 and rep.bound < rep.target
    assert find_N_M(F(1, 2), 1, pair) == rep.N
    smaller = rep.N // 2
    # the previous power either fails the target or a validity threshold
    th = rw_thresholds(RWParams(1, sigma_exact(pair, 1), 1))
    assert smaller < th.A or (up_tail(1, smaller) * 2 + 3 * F(1, 2 ** smaller)) >= rep.target


def test_block_sets_small():
    pair = BadicPair(1, 0, 1, 2)
    sets = build_block_sets_toy(pair, 1, 2)
    # Y sums two hits (digits 1 and 3 of 4); at N = 2 the threshold is 0, so |Y - 1| > 0
    Q = np.arange(16)
    y = ((Q >> 3) & 1 ^ 1) + ((Q >> 1) & 1 ^ 1)
    assert sets.y_up_event.measure() == F(int(np.count_nonzero(y != 1)), 16)
    assert sets.y_up.measure() <= sets.y_up_event.measure() + 2 * sets.y_up_pad * len(sets.y_up_event)
    assert sets.z_up.measure() <= sets.z_up_event.measure() + 2 * sets.z_up_pad * len(sets.z_up_event)
    assert sets.y_low is not None and not sets.y_low  # M = 1: empty lower family


def test_block_sets_unreachable_threshold():
    sets = build_block_sets_toy(BadicPair(1, 0, 1, 2), 1, 3, scale=100, with_low=False)
    assert not sets.y_up and not sets.z_up


def test_block_sets_degenerate_pair():
    sets = build_block_sets_toy(BadicPair(1, 0, 2, 2), 2, 2, with_low=False)
    assert not sets.y_up_event and not sets.z_up_event


def test_block_sets_pad_shape():
    sets = build_block_sets_toy(BadicPair(1, 0, 1, 2), 1, 4, with_low=False)
    padded = pad_translate(sets.y_up_event, 0, sets.y_up_pad)
    assert padded == sets.y_up
    assert padded.measure() <= sets.y_up_event.measure() + 2 * sets.y_up_pad * len(sets.y_up_event)


def test_philipp_constants():
    assert philipp_H(16) == 3
    assert philipp_H(15) == 2
    assert philipp_n_L(1, F(1, 2)) == 10 ** 6 + 1
    c = philipp_constants(2, 1, F(1, 2), 16)
    assert c.C_P == C_P == 100 and c.delta_n == F(1, 64) and c.delta_hat_n == F(1, 256)


def test_philipp_eval_small():
    eps = [0, 0, 0]
    # h < H with eps_{h+1} = 0: the indicator interval is empty, so rho = 0
    assert philipp_eval(F(1, 3), 0, 16, 1, eps, 1, 0, 2) == 0
    # N = 1, H = 1, h = L = 1: interval [0, 1/2), point {2/3} outside
    assert philipp_eval(F(1, 3), 0, 1, 1, eps, 1, 0, 2) == F(1, 2)


@given(st.integers(1, 3), st.data())
@settings(max_examples=30, deadline=None)
def test_philipp_rho_has_mean_zero(L, data):
    H = data.draw(st.integers(L, 5))
    h = data.draw(st.integers(L, H))
    K = data.draw(st.integers(0, 2 ** L - 1))
    eps = data.draw(st.lists(st.integers(0, 1), min_size=H, max_size=H))
    den = 2 ** (H + 1)
    total = sum(philipp_rho(F(k, den), h, eps, L, K, H) for k in range(den))
    assert total == 0


@given(st.integers(2, 4), st.sampled_from([F(1, 2), F(1, 4), F(1, 3), F(9, 10)]), st.integers(1, 3))
def test_radius_plan_certified(b, r, L_max):
    plan = assemble_lil_radii(b, r, L_max)
    assert plan.total < r and plan.certified
    assert plan.base_share == r / 2 ** b


def test_radius_plan_examples():
    plan = assemble_lil_radii(2, F(1, 2), 1)
    assert plan.base_share == F(1, 8)
    pairs = [rad for tag, rad in plan.entries if tag[0] == "L"]
    assert len(pairs) == 3 and all(rad == F(1, 2) / 16 for rad in pairs)
    level_sum = sum(pairs, F(0))
    assert level_sum <= F(1, 2) / 2 ** 2
