import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment, linprog

from opmeans import flow, hpd, measure as msr, transport
from opmeans.measure import DiscreteMeasure
from opmeans.sampling import random_measure, random_spd

from conftest import scalar_measure


def brute_force(cost, p):
    n = cost.shape[0]
    best = np.inf
    for perm in itertools.permutations(range(n)):
        c = cost[np.arange(n), perm]
        best = min(best, c.max() if p == np.inf else np.mean(c**p) ** (1 / p))
    return best


def lp_transport(mu, nu, p):
    cost = transport.cost_matrix(mu, nu) ** p
    n, m = cost.shape
    a_eq = [np.kron(np.eye(n)[i], np.ones(m)) for i in range(n)] + [np.kron(np.ones(n), np.eye(m)[j]) for j in range(m)]
    b_eq = [float(w) for w in mu.weights] + [float(w) for w in nu.weights]
    res = linprog(cost.ravel(), A_eq=np.array(a_eq), b_eq=b_eq, bounds=(0, None), method="highs")
    return res.fun ** (1 / p)


def test_point_masses(rng):
    a, b = random_spd(rng, 3), random_spd(rng, 3)
    d = hpd.thompson_distance(a, b)
    assert transport.wasserstein_p(msr.point_mass(a), msr.point_mass(b), 2) == pytest.approx(d)
    assert transport.wasserstein_inf(msr.point_mass(a), msr.point_mass(b)) == pytest.approx(d)


def test_scalar_uniform_pair():
    mu, nu = scalar_measure([1.0, 9.0]), scalar_measure([3.0, 3.0])
    assert transport.wasserstein_p(mu, nu, 1) == pytest.approx(np.log(3), abs=1e-12)
    assert transport.wasserstein_inf(mu, nu) == pytest.approx(np.log(3), abs=1e-12)


def test_identical_measures(rng):
    mu = random_measure(rng, 2, 4)
    assert transport.wasserstein_p(mu, mu, 1) == pytest.approx(0, abs=1e-12)
    assert transport.wasserstein_inf(mu, mu) == pytest.approx(0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_uniform_matches_assignment(n, dim, seed):
    rng = np.random.default_rng(seed)
    mu = random_measure(rng, dim, n, 0.1, uniform=True)
    nu = random_measure(rng, dim, n, 0.1, uniform=True)
    cost = transport.cost_matrix(mu, nu)
    for p in (1, 2):
        r, c = linear_sum_assignment(cost**p)
        assert transport.wasserstein_p(mu, nu, p) == pytest.approx(np.mean(cost[r, c] ** p) ** (1 / p), abs=1e-10)
    assert transport.wasserstein_inf(mu, nu) == pytest.approx(brute_force(cost, np.inf), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.sampled_from([1.0, 2.0, 3.0]), st.integers(0, 2**32 - 1))
def test_weighted_matches_lp(n, m, p, seed):
    rng = np.random.default_rng(seed)
    mu, nu = random_measure(rng, 2, n), random_measure(rng, 2, m)
    plan = transport.wasserstein_p_plan(mu, nu, p)
    assert plan.value == pytest.approx(lp_transport(mu, nu, p), rel=1e-9, abs=1e-10)
    assert tuple(sum(row) for row in plan.plan) == mu.weights
    assert tuple(sum(col) for col in zip(*plan.plan)) == nu.weights


PS = (1, 2, 4, 8, 16, 32)


def test_monotone_limit_in_p():
    rng = np.random.default_rng(7)
    for _ in range(20):
        mu, nu = random_measure(rng, 2, 3), random_measure(rng, 2, 4)
        vals = [transport.wasserstein_p(mu, nu, p) for p in PS]
        winf = transport.wasserstein_inf(mu, nu)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= winf + 1e-12
        # an optimal vertex plan puts at least 1/den on a pair costing >= W_inf
        den, _ = flow.common_denominator(mu.weights, nu.weights)
        assert vals[-1] >= den ** (-1 / 32) * winf - 1e-12


def test_limit_gap_uniform():
    rng = np.random.default_rng(8)
    for n in range(1, 6):
        for _ in range(6):
            mu = random_measure(rng, 2, n, uniform=True)
            nu = random_measure(rng, 2, n, uniform=True)
            winf = transport.wasserstein_inf(mu, nu)
            assert winf - transport.wasserstein_p(mu, nu, 32) <= 0.05 * winf + 1e-12


def test_contraction_examples(rng):
    a, b = random_spd(rng, 2), random_spd(rng, 2)
    rep = transport.contraction_check("G", msr.point_mass(a), msr.point_mass(b))
    d = hpd.thompson_distance(a, b)
    assert rep.passed
    assert rep.dT == pytest.approx(d, abs=1e-8)
    assert rep.deltaT == pytest.approx(d, abs=1e-10)
    assert rep.dWinf == pytest.approx(d, abs=1e-12)
    mu = random_measure(rng, 2, 3)
    rep = transport.contraction_check("A", mu, mu)
    assert rep.passed and rep.dT == pytest.approx(0, abs=1e-12) and rep.dWinf == pytest.approx(0, abs=1e-12)


def test_p_below_one_rejected(rng):
    mu = random_measure(rng, 2, 2)
    with pytest.raises(Exception):
        transport.wasserstein_p(mu, mu, 0.5)
