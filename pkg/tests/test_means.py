import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from opmeans import hpd, kubo_ando as ka, means, measure as msr
from opmeans.errors import MaxIterExceeded, ParamOutOfRange
from opmeans.measure import DiscreteMeasure
from opmeans.sampling import random_measure, random_spd

from conftest import scalar_measure


def diag_measure(diags, weights=None):
    return DiscreteMeasure([np.diag(d) for d in diags], weights)


def test_arithmetic_and_harmonic_examples(rng, half_one_nine):
    a = random_spd(rng, 3)
    assert np.allclose(means.arithmetic_mean(msr.point_mass(a)), a)
    assert np.allclose(means.harmonic_mean(msr.point_mass(a)), a)
    assert np.allclose(means.arithmetic_mean(diag_measure([[1, 9], [9, 1]])), np.diag([5, 5]))
    assert means.arithmetic_mean(half_one_nine)[0, 0] == pytest.approx(5)
    assert means.harmonic_mean(half_one_nine)[0, 0] == pytest.approx(1.8)
    mu = random_measure(rng, 3, 4)
    assert hpd.loewner_leq(means.harmonic_mean(mu), means.arithmetic_mean(mu), 1e-10)


def test_deform_right_trivial_is_one_step(rng):
    mu = random_measure(rng, 3, 4)
    x, trace = means.deform_solve(means.arithmetic_mean, ka.RIGHT, mu)
    assert np.allclose(x, means.arithmetic_mean(mu))
    assert trace.iterations <= 2


def test_deform_arith_returns_arithmetic(rng):
    mu = random_measure(rng, 2, 3)
    x, _ = means.deform_solve(means.arithmetic_mean, ka.arith(0.4), mu)
    assert hpd.thompson_distance(x, means.arithmetic_mean(mu)) < 1e-9


def test_deform_scalar_geometric(half_one_nine):
    # x = (sqrt(x) * 1 + sqrt(x) * 3) / 2  gives  x = 4
    x, _ = means.deform_solve(means.arithmetic_mean, ka.geom(0.5), half_one_nine)
    assert x[0, 0] == pytest.approx(4, abs=1e-9)


def test_deform_max_iter():
    mu = random_measure(np.random.default_rng(4), 3, 4, 0.01)
    cfg = means.SolverConfig(max_iter=2)
    with pytest.raises(MaxIterExceeded):
        means.deform_solve(means.arithmetic_mean, ka.geom(0.3), mu, cfg)


def test_solver_config_validation():
    with pytest.raises(ParamOutOfRange):
        means.SolverConfig(iter_tol=0)
    with pytest.raises(ParamOutOfRange):
        means.SolverConfig(max_iter=0)


def test_power_mean_endpoints(rng):
    mu = random_measure(rng, 3, 3)
    assert np.allclose(means.power_mean(1, mu), means.arithmetic_mean(mu))
    assert np.allclose(means.power_mean(-1, mu), means.harmonic_mean(mu))


def test_power_mean_scalar(half_one_nine):
    assert means.power_mean(0.5, half_one_nine)[0, 0] == pytest.approx(4, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.sampled_from([0.5, 0.25, 0.1, 0.75]), st.integers(0, 2**32 - 1))
def test_power_mean_inversion_symmetry(dim, n, r, seed):
    mu = random_measure(np.random.default_rng(seed), dim, n)
    lhs = means.power_mean(-r, mu)
    rhs = np.linalg.inv(means.power_mean(r, msr.inverse(mu)))
    assert hpd.thompson_distance(lhs, rhs) < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.sampled_from([1, 0.5, 0.25, 0.1, -0.1, -0.25, -0.5, -1]), st.integers(0, 2**32 - 1))
def test_power_mean_commuting_closed_form(dim, n, r, seed):
    rng = np.random.default_rng(seed)
    d = np.exp(rng.uniform(-2, 2, (n, dim)))
    mu = DiscreteMeasure([np.diag(x) for x in d])
    expect = (mu.w @ d**r) ** (1 / r)
    assert np.allclose(np.diag(means.power_mean(r, mu)), expect, rtol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 3), st.integers(2, 4), st.sampled_from([0.5, 0.25, -0.5]), st.integers(0, 2**32 - 1))
def test_power_mean_methods_agree(dim, n, r, seed):
    mu = random_measure(np.random.default_rng(seed), dim, n)
    a = means.power_mean(r, mu, method="monotone")
    b = means.power_mean(r, mu, method="exp")
    assert hpd.thompson_distance(a, b) < 1e-9
    assert means.power_mean_residual(a, r, mu) < 1e-9


def test_karcher_examples(rng):
    a = random_spd(rng, 3)
    x, _ = means.karcher_mean(msr.point_mass(a))
    assert np.allclose(x, a)
    mu = diag_measure([[1, 4], [4, 1]])
    x, _ = means.karcher_mean(mu)
    assert np.allclose(x, np.diag([2, 2]), atol=1e-12)
    assert np.linalg.norm(means.karcher_residual(np.diag([2.0, 2.0]), mu)) == pytest.approx(0, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_two_point_karcher_is_geometric_mean(dim, seed):
    rng = np.random.default_rng(seed)
    a, b = random_spd(rng, dim, 0.1), random_spd(rng, dim, 0.1)
    x, _ = means.karcher_mean(DiscreteMeasure([a, b]))
    # oracle: positive solution of Y A^{-1} Y = B
    y = ka.apply(ka.geom(0.5), a, b)
    assert np.allclose(y @ np.linalg.solve(a, y), b, rtol=1e-8, atol=1e-8)
    assert hpd.thompson_distance(x, y) < 1e-8


def test_log_euclidean_examples(rng, half_one_nine):
    a = random_spd(rng, 2)
    assert np.allclose(means.log_euclidean_mean(msr.point_mass(a)), a)
    assert means.log_euclidean_mean(half_one_nine)[0, 0] == pytest.approx(3)
    assert np.allclose(means.log_euclidean_mean(diag_measure([[1, 4], [9, 1]])), np.diag([3, 2]))


def test_power_limit_examples(rng, half_one_nine):
    a = random_spd(rng, 2)
    x, rep = means.karcher_via_power_limit(msr.point_mass(a), [0.5, 0.25])
    assert np.allclose(x, a)
    x, rep = means.karcher_via_power_limit(half_one_nine, [2.0**-k for k in range(1, 12)])
    assert x[0, 0] == pytest.approx(3, abs=1e-6)
    assert rep.widths_monotone and rep.sandwich_ok and rep.nested_ok
    assert rep.widths[-1] < rep.widths[0]
    with pytest.raises(ParamOutOfRange):
        means.karcher_via_power_limit(half_one_nine, [0.25, 0.5])


def _scalar_harm_deform(s, atoms, w):
    # root of x = sum w_i (x !_s a_i) in one dimension
    def g(x):
        return sum(wi / ((1 - s) / x + s / a) for wi, a in zip(w, atoms)) - x

    return brentq(g, min(atoms), max(atoms), xtol=1e-14)


def test_harmonic_limit_scalar(half_one_nine):
    ss = [2.0**-k for k in range(0, 7)]
    rep = means.harmonic_limit_check(half_one_nine, ss)
    assert rep.monotone and rep.passed
    for s, x in zip(ss, rep.values):
        assert x[0, 0] == pytest.approx(_scalar_harm_deform(s, [1.0, 9.0], [0.5, 0.5]), abs=1e-9)
    assert rep.values[0][0, 0] == pytest.approx(5)
    assert rep.values[-1][0, 0] > 1.8
    assert rep.final_gap < rep.gaps[0]


def test_harmonic_limit_point_mass(rng):
    a = random_spd(rng, 2)
    rep = means.harmonic_limit_check(msr.point_mass(a), [1.0, 0.5])
    assert all(np.allclose(x, a) for x in rep.values)


def test_deform_stops_at_noise_floor_for_ill_conditioned_atoms():
    rng = np.random.default_rng(13)
    mu = DiscreteMeasure([np.linalg.matrix_power(random_spd(rng, 4, 0.1), 4) for _ in range(3)])
    x, trace = means.deform_solve(means.harmonic_mean, ka.geom(0.5), mu)
    assert trace.status in ("converged", "noise_floor")
    res = means.deform_residual(means.harmonic_mean, ka.geom(0.5), mu, x)
    assert res <= max(1e-9, 2 * means._noise_floor(x, mu.atoms))
    assert hpd.thompson_distance(x, means.power_mean(-0.5, mu, method="exp")) < 1e-7
