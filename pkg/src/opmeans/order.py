"""Stochastic order between discrete measures and the induced metric.

``mu <= nu`` is decided by coupling feasibility: a transport plan that
only moves mass from ``A_i`` to ``B_j`` with ``A_i <= B_j`` exists iff
an integer max flow saturates all supplies. Infeasibility comes with a
Hall-type certificate: a set of row atoms whose mass exceeds the mass of
everything above them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import flow, hpd
from .errors import DimensionMismatch
from .measure import DiscreteMeasure


@dataclass(frozen=True)
class Coupling:
    """Transport plan with exact rational entries."""

    mu: DiscreteMeasure
    nu: DiscreteMeasure
    plan: tuple  # tuple of row tuples of Fraction

    def __post_init__(self):
        rows = [sum(r, Fraction(0)) for r in self.plan]
        cols = [sum(c, Fraction(0)) for c in zip(*self.plan)]
        if tuple(rows) != self.mu.weights or tuple(cols) != self.nu.weights:
            raise ValueError("coupling marginals do not match")
        if any(x < 0 for r in self.plan for x in r):
            raise ValueError("coupling has negative mass")

    def support(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.plan) for j, x in enumerate(r) if x > 0]

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.plan])


@dataclass(frozen=True)
class CutCertificate:
    """Row atoms ``rows`` whose only dominating column atoms are ``cols``.

    ``mass_rows > mass_cols`` proves that no order-respecting coupling
    exists. The lower set generated by the complement of ``cols`` in the
    column support separates the measures.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    mass_rows: Fraction
    mass_cols: Fraction


@dataclass
class OrderVerdict:
    leq: bool
    coupling: Coupling | None = None
    certificate: CutCertificate | None = None
    slack: float = 0.0

    def __bool__(self):
        return self.leq


def default_slack(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    scale = max(float(hpd.lambda_max(mu.atoms).max()), float(hpd.lambda_max(nu.atoms).max()))
    return 1e-9 * (1.0 + scale)


def comparability(mu: DiscreteMeasure, nu: DiscreteMeasure, slack: float) -> np.ndarray:
    """Boolean matrix with ``[i, j]`` true iff ``A_i <= B_j + slack I``."""
    diff = nu.atoms[None, :, :, :] - mu.atoms[:, None, :, :]
    return np.linalg.eigvalsh(diff)[..., 0] >= -slack


def _check_dims(mu, nu):
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"measures of dimension {mu.dim} and {nu.dim}")


def feasible_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure, allowed: np.ndarray) -> OrderVerdict:
    """Max-flow decision for a coupling supported on ``allowed`` pairs."""
    den, (sup, dem) = flow.common_denominator(mu.weights, nu.weights)
    res = flow.max_flow_bipartite(sup, dem, allowed)
    if res.value == den:
        plan = tuple(tuple(Fraction(int(x), den) for x in row) for row in res.flow)
        return OrderVerdict(True, coupling=Coupling(mu, nu, plan))
    rows = tuple(res.source_side_rows)
    nbrs = tuple(sorted({int(j) for i in rows for j in np.nonzero(allowed[i])[0]}))
    cert = CutCertificate(
        rows,
        nbrs,
        sum((mu.weights[i] for i in rows), Fraction(0)),
        sum((nu.weights[j] for j in nbrs), Fraction(0)),
    )
    return OrderVerdict(False, certificate=cert)


def stochastic_leq(mu: DiscreteMeasure, nu: DiscreteMeasure, slack: float | None = None) -> OrderVerdict:
    """Decide ``mu <= nu`` in the stochastic order.

    Parameters
    ----------
    mu, nu : DiscreteMeasure
    slack : float, optional
        Loewner comparisons use ``A_i <= B_j + slack I``. Defaults to
        ``1e-9 (1 + largest eigenvalue)``.

    Returns
    -------
    OrderVerdict
        With a ``Coupling`` when true, a ``CutCertificate`` when false.
    """
    _check_dims(mu, nu)
    if slack is None:
        slack = default_slack(mu, nu)
    verdict = feasible_coupling(mu, nu, comparability(mu, nu, slack))
    verdict.slack = slack
    return verdict


# --- independent refuter ------------------------------------------------


@dataclass
class MonotoneTest:
    """``f(A) = tr g(K^{1/2} A K^{1/2})`` with non-decreasing ``g``."""

    k: np.ndarray
    g_name: str
    g: Callable = field(repr=False)

    def __call__(self, atoms: np.ndarray) -> np.ndarray:
        ks = _psd_sqrt(self.k)
        inner = hpd.symmetrize(ks @ atoms @ ks)
        lam = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
        return self.g(lam).sum(axis=-1)


@dataclass
class Violation:
    test: MonotoneTest
    integral_mu: float
    integral_nu: float


def _psd_sqrt(k):
    w, v = np.linalg.eigh(k)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def _random_monotone_test(rng: np.random.Generator, dim: int, scale: float) -> MonotoneTest:
    rank = int(rng.integers(1, dim + 1))
    g_ = rng.standard_normal((dim, rank))
    k = g_ @ g_.T
    k /= np.linalg.eigvalsh(k)[-1]
    c = float(rng.uniform(0.0, scale))
    s = float(rng.uniform(0.01, 0.5)) * scale
    p = float(rng.uniform(0.2, 3.0))
    choices = [
        ("identity", lambda x: x),
        (f"power({p:.3g})", lambda x: np.power(x, p)),
        ("log1p", np.log1p),
        (f"step({c:.3g})", lambda x: (x > c).astype(float)),
        (f"sigmoid({c:.3g},{s:.3g})", lambda x: 1.0 / (1.0 + np.exp(-(x - c) / s))),
        (f"hinge({c:.3g})", lambda x: np.maximum(x - c, 0.0)),
    ]
    name, g = choices[int(rng.integers(len(choices)))]
    return MonotoneTest(k, name, g)


def monotone_function_falsifier(
    mu: DiscreteMeasure, nu: DiscreteMeasure, trials: int = 1000, rng=None, tol: float = 1e-9
) -> Violation | None:
    """Search for a monotone test function with ``int f dmu > int f dnu``.

    Returns the first violation found, or ``None``. Finding none is
    evidence for ``mu <= nu`` but never a proof.
    """
    _check_dims(mu, nu)
    rng = np.random.default_rng(rng)
    scale = max(float(hpd.lambda_max(mu.atoms).max()), float(hpd.lambda_max(nu.atoms).max()))
    fixed = [MonotoneTest(np.eye(mu.dim), "identity", lambda x: x)]
    fixed += [MonotoneTest(np.outer(e, e), "identity", lambda x: x) for e in np.eye(mu.dim)]
    for t in range(trials):
        test = fixed[t] if t < len(fixed) else _random_monotone_test(rng, mu.dim, scale)
        a = float(mu.w @ test(mu.atoms))
        b = float(nu.w @ test(nu.atoms))
        if a > b + tol * (1.0 + abs(b)):
            return Violation(test, a, b)
    return None


# --- delta_T --------------------------------------------------------------


def _log_sup_ratio_matrix(rows: DiscreteMeasure, cols: DiscreteMeasure) -> np.ndarray:
    """``[i, j] = log lambda_max(B_j^{-1} A_i)``: least r with ``A_i <= e^r B_j``."""
    eta = hpd.relative_eigs(cols.atoms[None, :], rows.atoms[:, None])
    return np.log(eta[..., -1])


@dataclass
class DeltaReport:
    value: float
    up: float
    down: float


def delta_T(mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-8, method: str = "threshold") -> float:
    """``inf {r >= 0 : e^{-r} nu <= mu <= e^r nu}``.

    ``method="threshold"`` solves the two one-sided problems exactly as
    bottleneck feasibility over the per-pair critical exponents.
    ``method="bisection"`` searches ``r`` with ``stochastic_leq`` as the
    predicate and is kept as an independent cross-check.
    """
    _check_dims(mu, nu)
    if method == "threshold":
        return delta_T_report(mu, nu).value
    if method != "bisection":
        raise ValueError(f"unknown method {method!r}")
    eps = hpd.sigma_epsilon_of(np.concatenate([mu.atoms, nu.atoms])).epsilon
    pair = hpd.thompson_distance(mu.atoms[:, None], nu.atoms[None, :])
    hi = float(np.max(pair)) + np.log(1.0 / eps**2)

    def ok(r):
        return bool(stochastic_leq(nu.map(lambda b: np.exp(-r) * b), mu)) and bool(
            stochastic_leq(mu, nu.map(lambda b: np.exp(r) * b))
        )

    lo = 0.0
    if ok(0.0):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def delta_T_report(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DeltaReport:
    den, (sm, sn) = flow.common_denominator(mu.weights, nu.weights)
    up_cost = _log_sup_ratio_matrix(mu, nu)  # mu <= e^r nu
    down_cost = _log_sup_ratio_matrix(nu, mu)  # e^{-r} nu <= mu
    up, _ = flow.bottleneck_threshold(sm, sn, up_cost)
    down, _ = flow.bottleneck_threshold(sn, sm, down_cost)
    up, down = max(up, 0.0), max(down, 0.0)
    return DeltaReport(max(up, down), up, down)


# --- order axioms -----------------------------------------------------------


def same_weighted_support(mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-9) -> bool:
    """Equality as weighted point sets, via a coupling on near-equal atoms."""
    if mu.dim != nu.dim:
        return False
    d = hpd.thompson_distance(mu.atoms[:, None], nu.atoms[None, :])
    return feasible_coupling(mu, nu, d <= tol).leq


@dataclass
class AxiomReport:
    reflexive: bool
    antisymmetric: bool
    transitive: bool
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.reflexive and self.antisymmetric and self.transitive


def measure_order_axioms(mu: DiscreteMeasure, nu: DiscreteMeasure, lam: DiscreteMeasure, slack: float | None = None) -> AxiomReport:
    """Check the partial-order axioms on a triple of measures."""
    report = AxiomReport(True, True, True)
    for name, m in (("mu", mu), ("nu", nu), ("lam", lam)):
        if not stochastic_leq(m, m, slack):
            report.reflexive = False
            report.violations.append(f"{name} <= {name} fails")
    mn, nm = stochastic_leq(mu, nu, slack), stochastic_leq(nu, mu, slack)
    if mn and nm and not same_weighted_support(mu, nu, tol=1e-6):
        report.antisymmetric = False
        report.violations.append("mu <= nu and nu <= mu but supports differ")
    nl = stochastic_leq(nu, lam, slack)
    if mn and nl and not stochastic_leq(mu, lam, slack):
        report.transitive = False
        report.violations.append("mu <= nu <= lam but not mu <= lam")
    return report
