"""Defining properties of means of measures as executable checks.

Each check evaluates a mean on a few related measures and returns an
``InequalityReport`` with Loewner or equality verdicts.
"""
from __future__ import annotations

import numpy as np

from . import hpd, kubo_ando, means
from . import measure as msr
from . import recipe as rcp
from .errors import ParamOutOfRange
from .inequality import InequalityReport
from .measure import DiscreteMeasure
from .order import stochastic_leq

EQ_TOL = 1e-8
SLACK = 1e-8


def _ev(mean, cfg=None):
    return rcp.evaluator(mean, cfg) if isinstance(mean, (str, rcp.Leaf, rcp.Deform, rcp.Compose, rcp.Adjoint)) else mean


def check_monotonicity(mean, mu: DiscreteMeasure, nu: DiscreteMeasure, slack: float = SLACK, cfg=None) -> InequalityReport:
    """``mu <= nu`` in the stochastic order implies ``M(mu) <= M(nu)``."""
    verdict = stochastic_leq(mu, nu)
    if not verdict:
        raise ParamOutOfRange("monotonicity check needs mu <= nu")
    ev = _ev(mean, cfg)
    rep = InequalityReport("monotonicity")
    rep.loewner("M(mu) <= M(nu)", ev(mu), ev(nu), slack)
    return rep


def check_homogeneity(mean, mu: DiscreteMeasure, alpha: float, tol: float = EQ_TOL, cfg=None) -> InequalityReport:
    ev = _ev(mean, cfg)
    rep = InequalityReport("homogeneity", details={"alpha": alpha})
    rep.equal("M(alpha mu) = alpha M(mu)", ev(msr.scale(mu, alpha)), alpha * ev(mu), tol)
    return rep


def check_congruence(mean, mu: DiscreteMeasure, s, tol: float = EQ_TOL, cfg=None) -> InequalityReport:
    ev = _ev(mean, cfg)
    rep = InequalityReport("congruence")
    rep.equal("S M(mu) S^T = M(S mu S^T)", hpd.congruence(s, ev(mu)), ev(msr.congruence(mu, s)), tol)
    return rep


def check_concavity(mean, mu: DiscreteMeasure, nu: DiscreteMeasure, t: float, slack: float = SLACK, cfg=None) -> InequalityReport:
    """``M(mu mix_t nu) >= (1-t) M(mu) + t M(nu)`` with the product push-forward."""
    ev = _ev(mean, cfg)
    rep = InequalityReport("concavity", details={"t": t})
    rep.loewner("(1-t)M(mu)+tM(nu) <= M(mix)", (1 - t) * ev(mu) + t * ev(nu), ev(msr.mix(mu, nu, t)), slack)
    return rep


def check_amh(mean, mu: DiscreteMeasure, slack: float = SLACK, cfg=None) -> InequalityReport:
    """``H(mu) <= M(mu) <= A(mu)``."""
    x = _ev(mean, cfg)(mu)
    rep = InequalityReport("amh_sandwich")
    rep.loewner("H(mu) <= M(mu)", means.harmonic_mean(mu), x, slack)
    rep.loewner("M(mu) <= A(mu)", x, means.arithmetic_mean(mu), slack)
    return rep


def check_barycentric(mean, a, tol: float = EQ_TOL, cfg=None) -> InequalityReport:
    """``M(delta_A) = A`` and ``M(delta_I) = I``."""
    ev = _ev(mean, cfg)
    a = np.asarray(a, dtype=float)
    rep = InequalityReport("barycentric")
    rep.equal("M(delta_A) = A", ev(msr.point_mass(a)), a, tol)
    rep.equal("M(delta_I) = I", ev(msr.point_mass(np.eye(len(a)))), np.eye(len(a)), tol)
    return rep


def check_direct_sum(mean, mu1: DiscreteMeasure, mu2: DiscreteMeasure, tol: float = EQ_TOL, cfg=None) -> InequalityReport:
    """``M(mu1 (+) mu2) = M(mu1) (+) M(mu2)``."""
    rep = InequalityReport("direct_sum")
    lhs = _ev(mean, cfg)(msr.direct_sum(mu1, mu2))
    rhs = hpd.block_diag(_ev(mean, cfg)(mu1), _ev(mean, cfg)(mu2))
    rep.equal("M(mu1 + mu2) = M(mu1) + M(mu2)", lhs, rhs, tol)
    return rep


def check_adjoint_identity(mean, sigma: kubo_ando.RepresentingMean, mu: DiscreteMeasure, tol: float = EQ_TOL, cfg=None) -> InequalityReport:
    """``(M_sigma)^* = (M^*)_{sigma^*}`` where ``M^*(mu) = M(mu^{-1})^{-1}``."""
    base = rcp.parse_recipe(mean) if isinstance(mean, str) else mean
    lhs = rcp.eval_recipe(rcp.adjoint(rcp.deform(base, sigma)), mu, cfg)
    rhs = rcp.eval_recipe(rcp.deform(rcp.adjoint(base), kubo_ando.adjoint(sigma)), mu, cfg)
    rep = InequalityReport("adjoint_identity", details={"sigma": sigma.name})
    rep.equal("(M_sigma)* = (M*)_(sigma*)", lhs, rhs, tol)
    return rep


def check_order_sandwich(mean, sigma: kubo_ando.RepresentingMean, mu: DiscreteMeasure, y, slack: float = SLACK, cfg=None) -> InequalityReport:
    """If ``Y >= M(Y sigma mu)`` then ``Y >= M_sigma(mu)``; vacuous otherwise."""
    base = _ev(mean, cfg)
    F = means.deform_map(base, sigma, mu)
    rep = InequalityReport("order_sandwich")
    fy = F(y)
    if hpd.loewner_margin(fy, y) < 0:
        rep.details["vacuous"] = True
        return rep
    x, _ = means.deform_solve(_ev(mean, cfg), sigma, mu, cfg)
    rep.loewner("M_sigma(mu) <= Y", x, y, slack)
    return rep


def check_strict_contraction(mean, sigma: kubo_ando.RepresentingMean, mu: DiscreteMeasure, x, y, cfg=None) -> InequalityReport:
    """``d_T(F(X), F(Y)) <= d_T(X, Y)`` for ``F(X) = M(X sigma mu)``.

    The inequality is strict in exact arithmetic; the margin is reported
    and only the non-strict form is asserted.
    """
    F = means.deform_map(_ev(mean, cfg), sigma, mu)
    d0 = float(hpd.thompson_distance(x, y))
    d1 = float(hpd.thompson_distance(F(x), F(y)))
    rep = InequalityReport("strict_contraction", details={"d_xy": d0, "d_fxfy": d1})
    rep.scalar("d_T(F X, F Y) <= d_T(X, Y)", d1, d0, 1e-12)
    return rep
