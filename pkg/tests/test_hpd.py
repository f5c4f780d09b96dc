import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmeans import hpd
from opmeans.errors import EmptyInput, NotPositiveDefinite, NotSymmetric
from opmeans.sampling import random_spd

A = np.array([[2.0, 1.0], [1.0, 2.0]])


def test_eig_sym_diagonal():
    w, v = hpd.eig_sym(np.diag([1.0, 4.0]))
    assert np.allclose(w, [4, 1])
    assert np.allclose(np.abs(v), [[0, 1], [1, 0]])


def test_eig_sym_identity():
    w, v = hpd.eig_sym(np.eye(3))
    assert np.allclose(w, 1)
    assert np.allclose(v @ v.T, np.eye(3))


def test_eig_sym_two_by_two():
    w, v = hpd.eig_sym(A)
    assert np.allclose(w, [3, 1])
    s = 1 / np.sqrt(2)
    assert np.allclose(np.abs(v[:, 0]), [s, s])
    assert np.isclose(abs(v[:, 1] @ np.array([s, -s])), 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(dim, seed):
    # independent eigensolver as oracle for the default one
    a = random_spd(np.random.default_rng(seed), dim, 0.05)
    wj, vj = hpd.jacobi_eigh(a)
    wl, vl = hpd.eig_sym(a)
    assert np.allclose(np.sort(wj)[::-1], wl, rtol=1e-10, atol=1e-12)
    assert np.allclose((vl * wl) @ vl.T, a, atol=1e-10)
    assert np.allclose(vj @ np.diag(wj) @ vj.T, a, atol=1e-10)


def test_fn_calculus_examples():
    assert np.allclose(hpd.fn_calculus(np.diag([1.0, np.e]), np.log), np.diag([0, 1]))
    assert np.allclose(hpd.fn_calculus(A, lambda x: x), A)
    assert np.allclose(hpd.fn_calculus(A, lambda x: x**2), [[5, 4], [4, 5]])


def test_matrix_functions():
    assert np.allclose(hpd.matrix_power(np.diag([4.0, 9.0]), 0.5), np.diag([2, 3]))
    assert np.allclose(hpd.matrix_inv(np.diag([2.0, 5.0])), np.diag([0.5, 0.2]))
    r3 = np.sqrt(3)
    assert np.allclose(hpd.matrix_sqrt(A), 0.5 * np.array([[r3 + 1, r3 - 1], [r3 - 1, r3 + 1]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_log_exp_round_trip(dim, seed):
    a = random_spd(np.random.default_rng(seed), dim, 0.01)
    assert np.allclose(hpd.matrix_exp(hpd.matrix_log(a)), a, rtol=1e-9, atol=1e-9)
    s, si = hpd.sqrt_and_invsqrt(a)
    assert np.allclose(s @ si, np.eye(dim), atol=1e-8)


def test_loewner_examples():
    assert hpd.loewner_leq(np.diag([1.0, 2.0]), np.diag([2.0, 3.0]))
    assert not hpd.loewner_leq(np.diag([2.0, 1.0]), np.diag([1.0, 2.0]))
    assert hpd.loewner_leq(A, A)


def test_thompson_examples():
    assert np.isclose(hpd.thompson_distance(np.diag([1.0, 4.0]), np.eye(2)), np.log(4), atol=1e-12)
    assert hpd.thompson_distance(A, A) == pytest.approx(0, abs=1e-14)
    assert np.isclose(hpd.thompson_distance(A, np.eye(2)), np.log(3), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_thompson_metric_axioms(dim, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_spd(rng, dim, 0.1) for _ in range(3))
    dab = hpd.thompson_distance(a, b)
    assert dab >= 0
    assert np.isclose(dab, hpd.thompson_distance(b, a), atol=1e-12)
    assert dab <= hpd.thompson_distance(a, c) + hpd.thompson_distance(c, b) + 1e-12
    # congruence and inversion invariance
    m = rng.standard_normal((dim, dim)) + 3 * np.eye(dim)
    assert np.isclose(hpd.thompson_distance(m @ a @ m.T, m @ b @ m.T), dab, atol=1e-8)
    assert np.isclose(hpd.thompson_distance(np.linalg.inv(a), np.linalg.inv(b)), dab, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_thompson_is_least_loewner_exponent(dim, seed):
    rng = np.random.default_rng(seed)
    a, b = random_spd(rng, dim, 0.1), random_spd(rng, dim, 0.1)
    d = hpd.thompson_distance(a, b)
    assert hpd.loewner_leq(a, np.exp(d) * b, 1e-9) and hpd.loewner_leq(b, np.exp(d) * a, 1e-9)
    if d > 1e-6:
        shrink = np.exp(d - 1e-4)
        assert not (hpd.loewner_leq(a, shrink * b, 0) and hpd.loewner_leq(b, shrink * a, 0))


def test_sigma_epsilon_examples():
    assert hpd.sigma_epsilon_of([np.diag([0.5, 2.0])]).epsilon == pytest.approx(0.5)
    assert hpd.sigma_epsilon_of([np.eye(2)]).epsilon == pytest.approx(0.999)
    assert hpd.sigma_epsilon_of([np.diag([1.0, 4.0]), np.diag([4.0, 1.0])]).epsilon == pytest.approx(0.25)
    with pytest.raises(EmptyInput):
        hpd.sigma_epsilon_of([])


def test_hpd_matrix_validation():
    with pytest.raises(NotSymmetric):
        hpd.as_hpd([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotPositiveDefinite):
        hpd.as_hpd([[1.0, 2.0], [2.0, 1.0]])
    h = hpd.as_hpd(A)
    assert np.allclose(h.eigenvalues, [3, 1])


def test_block_diag_and_det_root():
    b = hpd.block_diag(np.diag([1.0, 4.0]), np.array([[9.0]]))
    assert np.allclose(b, np.diag([1, 4, 9]))
    assert hpd.det_root(np.diag([1.0, 4.0])) == pytest.approx(2)
