import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmeans import hpd, kubo_ando as ka
from opmeans.errors import ParamOutOfRange
from opmeans.sampling import random_psd_increment, random_spd

A = np.array([[2.0, 1.0], [1.0, 2.0]])
X = np.logspace(-3, 3, 25)


def test_builtin_values():
    assert ka.geom(0.5)(4.0) == pytest.approx(2)
    assert ka.harm(0.5)(9.0) == pytest.approx(1.8)
    assert ka.arith(0.25)(5.0) == pytest.approx(2.0)


def test_builtin_endpoints_collapse():
    assert ka.arith(0.0).is_left_trivial
    assert ka.geom(1.0).is_right_trivial
    with pytest.raises(ParamOutOfRange):
        ka.harm(1.5)


def test_apply_examples():
    assert np.allclose(ka.apply(ka.geom(0.5), np.diag([1.0, 4.0]), np.diag([4.0, 1.0])), np.diag([2, 2]))
    b = random_spd(np.random.default_rng(1), 3)
    a = random_spd(np.random.default_rng(2), 3)
    assert np.allclose(ka.apply(ka.arith(0.5), a, b), (a + b) / 2)
    assert np.allclose(ka.apply(ka.geom(0.5), A, np.eye(2)), hpd.matrix_sqrt(A))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_geometric_mean_solves_riccati(dim, seed):
    # A #_{1/2} B is the positive solution of X A^{-1} X = B
    rng = np.random.default_rng(seed)
    a, b = random_spd(rng, dim, 0.1), random_spd(rng, dim, 0.1)
    x = ka.apply(ka.geom(0.5), a, b)
    assert np.allclose(x @ np.linalg.solve(a, x), b, rtol=1e-8, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_weighted_harmonic_closed_form(dim, seed, t):
    rng = np.random.default_rng(seed)
    a, b = random_spd(rng, dim, 0.1), random_spd(rng, dim, 0.1)
    expect = np.linalg.inv((1 - t) * np.linalg.inv(a) + t * np.linalg.inv(b))
    assert np.allclose(ka.apply(ka.harm(t), a, b), expect, rtol=1e-9, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.sampled_from(["arith", "harm", "geom"]), st.floats(0.05, 0.95))
def test_mean_is_monotone_and_congruent(dim, seed, kind, t):
    rng = np.random.default_rng(seed)
    sigma = ka.builtin(kind, t)
    a, b = random_spd(rng, dim, 0.1), random_spd(rng, dim, 0.1)
    a2 = a + random_psd_increment(rng, dim, 0.5)
    b2 = b + random_psd_increment(rng, dim, 0.5)
    m = ka.apply(sigma, a, b)
    assert hpd.loewner_leq(m, ka.apply(sigma, a2, b2), 1e-9 * (1 + np.linalg.norm(m)))
    s = rng.standard_normal((dim, dim)) + 2 * np.eye(dim)
    lhs = ka.apply(sigma, s @ a @ s.T, s @ b @ s.T)
    assert np.allclose(lhs, s @ m @ s.T, rtol=1e-8, atol=1e-8)


def test_adjoint_examples():
    assert ka.adjoint(ka.arith(0.5)) == ka.harm(0.5)
    assert np.allclose(ka.adjoint(ka.arith(0.5))(X), 2 * X / (1 + X))
    assert ka.adjoint(ka.geom(0.3)) == ka.geom(0.3)
    custom = ka.custom("(1 + x**0.5)**2 / 4")
    assert np.allclose(ka.adjoint(ka.adjoint(custom))(X), custom(X))


def test_adjoint_matrix_identity(rng):
    sigma = ka.custom("(1 + x**0.5)**2 / 4")
    a, b = random_spd(rng, 3), random_spd(rng, 3)
    lhs = ka.apply(ka.adjoint(sigma), a, b)
    rhs = np.linalg.inv(ka.apply(sigma, np.linalg.inv(a), np.linalg.inv(b)))
    assert np.allclose(lhs, rhs)


def test_transpose_examples(rng):
    assert ka.transpose(ka.LEFT) == ka.RIGHT
    assert ka.transpose(ka.geom(0.5)) == ka.geom(0.5)
    t = 0.3
    assert np.allclose(ka.transpose(ka.arith(t))(X), ka.arith(1 - t)(X))
    sigma = ka.custom("(1 + x**0.5)**2 / 4")
    assert np.allclose(ka.transpose(sigma)(X), X * sigma(1 / X))
    a, b = random_spd(rng, 2), random_spd(rng, 2)
    assert np.allclose(ka.apply(ka.transpose(ka.harm(0.2)), a, b), ka.apply(ka.harm(0.2), b, a))


def test_power_modify_examples():
    assert ka.power_modify(ka.geom(0.6), 0.5) == ka.geom(0.3)
    sigma = ka.harm(0.4)
    assert np.allclose(ka.power_modify(sigma, 1.0)(X), sigma(X))
    assert ka.power_modify(ka.arith(0.5), 0.5)(16.0) == pytest.approx(2.5)
    with pytest.raises(ParamOutOfRange):
        ka.power_modify(sigma, 1.5)


def test_classify_examples():
    c = ka.classify(ka.geom(0.4))
    assert c.pmi and c.pmd
    c = ka.classify(ka.arith(0.5))
    assert c.gcv and not c.gcc
    assert ka.classify(ka.harm(0.5)).gcc


def test_classify_arith_hand_witness():
    f = ka.arith(0.5)
    # f(1) <= sqrt(f(1/4) f(4)) for the convex direction
    assert f(1.0) <= np.sqrt(f(0.25) * f(4.0))
    assert np.sqrt(f(0.25) * f(4.0)) == pytest.approx(1.25)


def test_custom_mean_validation():
    sigma = ka.custom("2*x/(1+x)")
    assert np.allclose(sigma(X), ka.harm(0.5)(X))
    assert sigma.alpha == pytest.approx(0.5, abs=1e-6)
