"""Wasserstein distances with the Thompson metric as ground cost."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import flow, hpd
from .errors import DimensionMismatch, ParamOutOfRange
from .measure import DiscreteMeasure


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """``[i, j] = d_T(A_i, B_j)``."""
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"measures of dimension {mu.dim} and {nu.dim}")
    return np.asarray(hpd.thompson_distance(mu.atoms[:, None], nu.atoms[None, :]), dtype=float).reshape(mu.size, nu.size)


@dataclass
class TransportPlan:
    value: float
    plan: tuple  # rows of Fraction


def _plan(flow_matrix, den) -> tuple:
    return tuple(tuple(Fraction(int(x), den) for x in row) for row in flow_matrix)


def wasserstein_p_plan(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float = 1.0) -> TransportPlan:
    if not p >= 1:
        raise ParamOutOfRange(f"p = {p!r} must be at least 1")
    cost = cost_matrix(mu, nu) ** p
    den, (sm, sn) = flow.common_denominator(mu.weights, nu.weights)
    f = flow.min_cost_transport(sm, sn, cost)
    total = sum(int(f[i, j]) * cost[i, j] for i in range(mu.size) for j in range(nu.size)) / den
    return TransportPlan(float(total) ** (1.0 / p), _plan(f, den))


def wasserstein_p(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float = 1.0) -> float:
    """``(min over couplings of sum pi_ij d_T(A_i, B_j)^p)^{1/p}``, solved exactly."""
    return wasserstein_p_plan(mu, nu, p).value


def wasserstein_inf_plan(mu: DiscreteMeasure, nu: DiscreteMeasure) -> TransportPlan:
    cost = cost_matrix(mu, nu)
    den, (sm, sn) = flow.common_denominator(mu.weights, nu.weights)
    value, f = flow.bottleneck_threshold(sm, sn, cost)
    return TransportPlan(value, _plan(f, den))


def wasserstein_inf(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Bottleneck transport cost; always one of the pairwise distances."""
    return wasserstein_inf_plan(mu, nu).value


@dataclass
class ContractionReport:
    dT: float
    deltaT: float
    dWinf: float
    passed: bool
    margin_first: float
    margin_second: float


def contraction_check(mean, mu: DiscreteMeasure, nu: DiscreteMeasure, slack: float = 1e-7) -> ContractionReport:
    """Check ``d_T(M(mu), M(nu)) <= delta_T(mu, nu) <= W_inf(mu, nu)``.

    ``mean`` is a recipe, a recipe string or any callable on measures.
    """
    from . import order, recipe

    ev = mean if callable(mean) else recipe.evaluator(mean)
    d = hpd.thompson_distance(ev(mu), ev(nu))
    delta = order.delta_T(mu, nu)
    w = wasserstein_inf(mu, nu)
    first, second = delta - d, w - delta
    return ContractionReport(d, delta, w, first >= -slack and second >= -slack, first, second)
