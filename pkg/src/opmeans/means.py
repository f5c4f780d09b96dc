"""Operator means of discrete measures.

Closed forms for the arithmetic, harmonic and Log-Euclidean means; a
monotone fixed-point solver for deformed means ``X = M(X sigma mu)``;
power means and the Karcher mean.

Every mean maps a ``DiscreteMeasure`` to an ``(N, N)`` array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import hpd, kubo_ando
from .errors import MaxIterExceeded, MonotoneViolation, NotPositiveDefinite, ParamOutOfRange
from .kubo_ando import RepresentingMean
from .measure import DiscreteMeasure, inverse

MeanFn = Callable[[DiscreteMeasure], np.ndarray]

EPS_MACH = np.finfo(float).eps


# --- closed forms --------------------------------------------------------


def arithmetic_mean(mu: DiscreteMeasure) -> np.ndarray:
    """``sum_i w_i A_i``."""
    return hpd.symmetrize(mu.integrate(mu.atoms))


def harmonic_mean(mu: DiscreteMeasure) -> np.ndarray:
    """``(sum_i w_i A_i^{-1})^{-1}``."""
    return hpd.matrix_inv(mu.integrate(hpd.matrix_inv(mu.atoms)))


def log_euclidean_mean(mu: DiscreteMeasure) -> np.ndarray:
    """``exp(sum_i w_i log A_i)``."""
    return hpd.matrix_exp(mu.integrate(hpd.matrix_log(mu.atoms)))


# --- solver configuration and traces -------------------------------------


UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class Given:
    """Start the iteration from an explicit matrix."""

    x: np.ndarray = field(compare=False)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances for the fixed-point solvers.

    ``iter_tol`` bounds the Thompson distance from the returned iterate to
    the fixed point (estimated from the observed contraction rate);
    ``residual_tol`` bounds ``d_T(X, F(X))``.
    """

    iter_tol: float = 1e-11
    residual_tol: float = 1e-9
    max_iter: int = 10000
    start: object = UPPER
    monotone_slack: float = 1e-9

    def __post_init__(self):
        if not (self.iter_tol > 0 and self.residual_tol > 0):
            raise ParamOutOfRange("tolerances must be positive")
        if self.max_iter < 1:
            raise ParamOutOfRange("max_iter must be at least 1")
        if not (self.start in (UPPER, LOWER) or isinstance(self.start, Given)):
            raise ParamOutOfRange(f"unknown start {self.start!r}")

    def with_start(self, start) -> "SolverConfig":
        return replace(self, start=start)

    def inner(self) -> "SolverConfig":
        """Configuration for a solve nested inside another one."""
        return replace(self, iter_tol=self.iter_tol / 10, residual_tol=self.residual_tol / 10, start=UPPER)


@dataclass
class ConvergenceTrace:
    """Per-iteration ``(k, d_T(X_k, X_{k-1}), residual_k)`` records."""

    start: str
    steps: list = field(default_factory=list)
    status: str = "running"
    rate: float = float("nan")

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def residual(self) -> float:
        return self.steps[-1][2] if self.steps else float("nan")

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "status": self.status,
            "iterations": self.iterations,
            "rate": self.rate,
            "steps": [[k, d, r] for k, d, r in self.steps],
        }


def _start_matrix(cfg: SolverConfig, mu: DiscreteMeasure) -> tuple[np.ndarray, str]:
    if isinstance(cfg.start, Given):
        return np.array(cfg.start.x, dtype=float), "given"
    eps = mu.sigma_epsilon().epsilon
    eye = np.eye(mu.dim)
    return (eye / eps, UPPER) if cfg.start == UPPER else (eye * eps, LOWER)


def _noise_floor(x: np.ndarray, atoms: np.ndarray) -> float:
    """Rounding level of ``d_T`` steps: ``F`` works with ``X`` and the congruent atoms."""
    w = np.linalg.eigvalsh(x)
    eta = hpd.relative_eigs(x, atoms)
    cond = max(float(w[-1] / w[0]), float(np.max(eta[..., -1] / eta[..., 0])))
    return 16.0 * EPS_MACH * cond


# --- deformed means ----------------------------------------------------------


def deform_map(mean: MeanFn, sigma: RepresentingMean, mu: DiscreteMeasure) -> Callable[[np.ndarray], np.ndarray]:
    """``F(X) = M(X sigma mu)``."""
    if sigma.kind == "harm":
        # the atom inverses do not change between iterations
        t = sigma.param
        inv_atoms = t * hpd.matrix_inv(mu.atoms)

        def F(x):
            pts = hpd.matrix_inv((1.0 - t) * hpd.matrix_inv(x) + inv_atoms)
            return np.asarray(mean(DiscreteMeasure._trusted(pts, mu.weights, mu.w)), dtype=float)

        return F

    def F(x):
        return np.asarray(mean(mu.map(lambda a: kubo_ando.apply(sigma, x, a))), dtype=float)

    return F


def deform_solve(
    mean: MeanFn, sigma: RepresentingMean, mu: DiscreteMeasure, cfg: SolverConfig | None = None
) -> tuple[np.ndarray, ConvergenceTrace]:
    """Solve ``X = M(X sigma mu)`` by monotone iteration.

    Parameters
    ----------
    mean : callable
        The base mean ``M``; must be monotone, homogeneous and normalized.
    sigma : RepresentingMean
        Any mean other than the left trivial one.
    mu : DiscreteMeasure
    cfg : SolverConfig, optional

    Returns
    -------
    x : ndarray
        Iterate ``X_k`` with ``d_T(X_k, F(X_k)) <= residual_tol`` and
        estimated distance to the fixed point below ``iter_tol``.
    trace : ConvergenceTrace

    Raises
    ------
    MaxIterExceeded
    MonotoneViolation
        If an iteration started from above breaks ``X_{k+1} <= e^s X_k``,
        or one started from below breaks ``X_{k+1} >= e^{-s} X_k``, with
        ``s = monotone_slack``.

    Notes
    -----
    ``F`` strictly contracts ``d_T``, so ``d_k = d_T(X_k, X_{k+1})``
    decreases. With the observed ratio ``rho = d_k / d_{k-1}`` the
    distance from ``X_k`` to the fixed point is about ``d_k / (1 - rho)``;
    the solver stops once twice that estimate is below ``iter_tol``. A step
    that fails to shrink can only come from rounding; if ``d_k`` is then
    within the rounding floor of the congruent atoms the solver stops with
    status ``"noise_floor"``. The same floor bounds the monotone guard.
    """
    if sigma.is_left_trivial:
        raise ParamOutOfRange("the left trivial mean has no deformation")
    cfg = cfg or SolverConfig()
    F = deform_map(mean, sigma, mu)
    x, start = _start_matrix(cfg, mu)
    trace = ConvergenceTrace(start)
    y = F(x)
    d, lo, hi = _log_rel(x, y)
    prev_d = float("nan")
    trace.steps.append((0, prev_d, d))
    ratios: list[float] = []
    floor = None
    for k in range(1, cfg.max_iter + 1):
        rho = min(max(ratios[-2:]), 1.0 - 1e-12) if ratios else 1.0
        bound = 2.0 * d / (1.0 - rho) if ratios else math.inf
        if d <= cfg.residual_tol and (bound <= cfg.iter_tol or d == 0.0):
            trace.status = "converged"
            trace.rate = rho if ratios else 0.0
            return x, trace
        # F contracts, so a step that does not shrink is rounding noise
        if ratios and ratios[-1] >= 1.0:
            if floor is None:
                floor = _noise_floor(x, mu.atoms)
            if d <= max(cfg.residual_tol, floor):
                trace.status = "noise_floor"
                trace.rate = rho
                return x, trace
        breach = hi if start == UPPER else -lo if start == LOWER else 0.0
        if breach > cfg.monotone_slack:
            if floor is None:
                floor = _noise_floor(x, mu.atoms)
            if breach > floor:
                trace.status = "monotone_violation"
                raise MonotoneViolation(f"iteration {k}: order breached by a factor exp({breach:.3e})", trace)
        prev_d = d
        x = y
        y = F(x)
        d, lo, hi = _log_rel(x, y)
        if prev_d > 0:
            ratios.append(d / prev_d)
        trace.steps.append((k, prev_d, d))
    trace.status = "max_iter"
    raise MaxIterExceeded(f"no convergence in {cfg.max_iter} iterations (residual {d:.3e})", trace)


def _log_rel(x, y) -> tuple[float, float, float]:
    """``d_T(X, Y)`` and the extreme logs of the eigenvalues of ``X^{-1/2} Y X^{-1/2}``."""
    eta = hpd.relative_eigs(x, y)
    if eta[0] <= 0:
        raise NotPositiveDefinite("iterate lost positive definiteness")
    lo, hi = math.log(eta[0]), math.log(eta[-1])
    return max(-lo, hi), lo, hi


def deform_residual(mean: MeanFn, sigma: RepresentingMean, mu: DiscreteMeasure, x) -> float:
    """``d_T(X, M(X sigma mu))``."""
    return hpd.thompson_distance(x, deform_map(mean, sigma, mu)(x))


# --- exponential-type iterations -----------------------------------------------


def _gradient(x: np.ndarray, mu: DiscreteMeasure, g: Callable[[np.ndarray], np.ndarray]):
    """``S(X) = sum_i w_i g(X^{-1/2} A_i X^{-1/2})``, a step size hint and a noise floor.

    The hint ``2 / sum_i w_i ((c_i + 1) / (c_i - 1)) log c_i``, with
    ``c_i`` the condition number of ``X^{-1/2} A_i X^{-1/2}``, keeps the
    exponential step contractive for widely spread atoms; it tends to 1
    as the atoms cluster. The floor ``16 eps max_i c_i`` bounds the
    rounding error of ``S``.
    """
    sx, isx = hpd.sqrt_and_invsqrt(x)
    rel = hpd.congruence(isx, mu.atoms)
    w, v = np.linalg.eigh(rel)
    s = mu.integrate((v * g(w)[..., None, :]) @ np.swapaxes(v, -1, -2))
    log_c = np.log(w[:, -1] / w[:, 0])
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(log_c > 1e-8, log_c / np.tanh(log_c / 2), 2.0)
    hint = min(1.0, 2.0 / float(mu.w @ terms))
    floor = 16.0 * EPS_MACH * float(np.exp(log_c.max()))
    return hpd.symmetrize(s), sx, hint, floor


def _exp_iteration(
    mu: DiscreteMeasure,
    g: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    accept_tol: float,
    max_iter: int,
    start: str,
) -> tuple[np.ndarray, ConvergenceTrace]:
    """Damped iteration ``X <- X^{1/2} exp(theta S(X)) X^{1/2}``.

    ``theta`` starts from the step hint of ``_gradient``, capped so that
    one step moves ``X`` by at most 2 in ``d_T``, and is halved whenever
    the Frobenius norm of ``S`` fails to decrease. If the step
    collapses, ``X`` is accepted when the residual is below ``accept_tol``
    or the rounding floor of ``S``.
    """
    trace = ConvergenceTrace(start)
    x = hpd.symmetrize(np.array(x0, dtype=float))
    s, sx, hint, floor = _gradient(x, mu, g)
    res = float(np.linalg.norm(s))
    trace.steps.append((0, float("nan"), res))
    for k in range(1, max_iter + 1):
        if res <= tol:
            trace.status = "converged"
            return x, trace
        s_max = float(np.abs(np.linalg.eigvalsh(s)).max())
        # steps longer than d_T = 2 overshoot when g grows like a power
        theta = min(hint, 2.0 / s_max) if s_max > 0 else hint
        while True:
            cand = hpd.congruence(sx, hpd.matrix_exp(theta * s))
            try:
                s_new, sx_new, hint_new, floor_new = _gradient(cand, mu, g)
                res_new = float(np.linalg.norm(s_new))
            except NotPositiveDefinite:
                res_new = math.inf
            if res_new < res:
                break
            theta *= 0.5
            if theta < 1e-10:
                if res <= max(accept_tol, floor):
                    trace.status = "converged"
                    return x, trace
                trace.status = "max_iter"
                raise MaxIterExceeded(f"step size collapsed at residual {res:.3e}", trace)
        # X^{-1/2} cand X^{-1/2} = exp(theta S), so d_T(X, cand) = theta |S|
        step = theta * s_max
        x, s, sx, hint, floor, res = cand, s_new, sx_new, hint_new, floor_new, res_new
        trace.steps.append((k, step, res))
    trace.status = "max_iter"
    raise MaxIterExceeded(f"no convergence in {max_iter} iterations (residual {res:.3e})", trace)


def karcher_residual(x, mu: DiscreteMeasure) -> np.ndarray:
    """``sum_i w_i log(X^{-1/2} A_i X^{-1/2})``."""
    return _gradient(np.asarray(x, dtype=float), mu, np.log)[0]


def karcher_mean(
    mu: DiscreteMeasure, cfg: SolverConfig | None = None, x0=None
) -> tuple[np.ndarray, ConvergenceTrace]:
    """Karcher mean: the zero of ``sum_i w_i log(X^{-1/2} A_i X^{-1/2})``.

    Starts at the Log-Euclidean mean unless ``x0`` (or a ``Given`` start)
    is supplied. Stops when the Frobenius norm of the residual is below
    ``iter_tol``; by geodesic convexity of the squared Riemannian distance
    this bounds the Riemannian, hence the Thompson, distance to the mean.
    """
    cfg = cfg or SolverConfig()
    start = "log_euclidean"
    if x0 is None and isinstance(cfg.start, Given):
        x0 = cfg.start.x
    if x0 is None:
        x0 = log_euclidean_mean(mu)
    else:
        start = "given"
    return _exp_iteration(mu, np.log, x0, cfg.iter_tol, cfg.residual_tol, cfg.max_iter, start)


# --- power means -----------------------------------------------------------------


EXP_METHOD_BELOW = 0.125


def _g_power(r: float):
    return lambda w: np.expm1(r * np.log(w)) / r


def power_mean_residual(x, r: float, mu: DiscreteMeasure) -> float:
    """Operator norm of ``sum_i w_i (X^{-1/2} A_i X^{-1/2})^r - I``."""
    s = _gradient(np.asarray(x, dtype=float), mu, _g_power(r))[0]
    return float(np.max(np.abs(np.linalg.eigvalsh(r * s))))


def power_mean(
    r: float,
    mu: DiscreteMeasure,
    cfg: SolverConfig | None = None,
    *,
    method: str = "auto",
    full_output: bool = False,
):
    """Power mean ``P_r`` for ``r`` in ``[-1, 1]`` without 0.

    ``method="monotone"`` solves ``X = A(X #_r mu)`` (``r > 0``) or
    ``X = H(X #_{|r|} mu)`` (``r < 0``) with ``deform_solve``. Its rate
    degrades like ``1 - |r|``, so ``"auto"`` switches for ``|r| < 1/8``
    to ``method="exp"``: the damped iteration on the equivalent equation
    ``sum_i w_i ((X^{-1/2} A_i X^{-1/2})^r - I) / r = 0``, with
    ``P_r(mu) = P_{|r|}(mu^{-1})^{-1}`` for negative ``r``.
    """
    r = float(r)
    if r == 0.0 or not -1.0 <= r <= 1.0 or math.isnan(r):
        raise ParamOutOfRange(f"power {r!r} outside [-1, 1] without 0")
    cfg = cfg or SolverConfig()
    if method == "auto":
        method = "monotone" if abs(r) >= EXP_METHOD_BELOW else "exp"
    if method == "monotone":
        if r > 0:
            x, trace = deform_solve(arithmetic_mean, kubo_ando.geom(r), mu, cfg)
        else:
            x, trace = deform_solve(harmonic_mean, kubo_ando.geom(-r), mu, cfg)
    elif method == "exp":
        x0 = cfg.start.x if isinstance(cfg.start, Given) else None
        if r > 0:
            x, trace = _exp_iteration(
                mu, _g_power(r), log_euclidean_mean(mu) if x0 is None else x0,
                cfg.iter_tol, cfg.residual_tol, cfg.max_iter, "given" if x0 is not None else "log_euclidean",
            )
        else:
            inv0 = None if x0 is None else hpd.matrix_inv(x0)
            y, trace = _exp_iteration(
                inverse(mu), _g_power(-r), log_euclidean_mean(inverse(mu)) if inv0 is None else inv0,
                cfg.iter_tol, cfg.residual_tol, cfg.max_iter, "given" if x0 is not None else "log_euclidean",
            )
            x = hpd.matrix_inv(y)
    else:
        raise ValueError(f"unknown method {method!r}")
    return (x, trace) if full_output else x


@dataclass
class PowerLimitReport:
    rs: list
    widths: list
    widths_monotone: bool
    sandwich_ok: bool
    nested_ok: bool
    lower: np.ndarray
    upper: np.ndarray


def karcher_via_power_limit(
    mu: DiscreteMeasure,
    r_sequence: Sequence[float] | None = None,
    cfg: SolverConfig | None = None,
    slack: float = 1e-9,
) -> tuple[np.ndarray, PowerLimitReport]:
    """Approximate ``G(mu)`` from the bracket ``P_{-r} <= G <= P_r``.

    Returns the geometric midpoint ``P_{-r} #_{1/2} P_r`` at the last
    ``r`` together with the bracket widths ``d_T(P_{-r}, P_r)``, which
    must not increase along the sequence.
    """
    rs = [2.0**-k for k in range(1, 21)] if r_sequence is None else [float(r) for r in r_sequence]
    if any(b >= a for a, b in zip(rs, rs[1:])):
        raise ParamOutOfRange("r_sequence must be strictly decreasing")
    cfg = cfg or SolverConfig()
    widths = []
    sandwich = nested = True
    lo_prev = hi_prev = None
    for r in rs:
        lo = power_mean(-r, mu, cfg if lo_prev is None else cfg.with_start(Given(lo_prev)))
        hi = power_mean(r, mu, cfg if hi_prev is None else cfg.with_start(Given(hi_prev)))
        widths.append(hpd.thompson_distance(lo, hi))
        tol = slack * float(hpd.lambda_max(hi))
        sandwich &= hpd.loewner_leq(lo, hi, tol)
        if lo_prev is not None:
            nested &= hpd.loewner_leq(lo_prev, lo, tol) and hpd.loewner_leq(hi, hi_prev, tol)
        lo_prev, hi_prev = lo, hi
    mono = all(b <= a + slack for a, b in zip(widths, widths[1:]))
    mid = kubo_ando.apply(kubo_ando.geom(0.5), lo_prev, hi_prev)
    return mid, PowerLimitReport(rs, widths, mono, sandwich, nested, lo_prev, hi_prev)


@dataclass
class HarmonicLimitReport:
    s_values: list
    gaps: list
    monotone: bool
    extrapolated_bound: float
    final_gap: float
    richardson_gap: float
    passed: bool
    values: list = field(repr=False, default_factory=list)


def harmonic_limit_check(
    mu: DiscreteMeasure,
    s_sequence: Sequence[float] | None = None,
    cfg: SolverConfig | None = None,
    slack: float = 1e-8,
) -> HarmonicLimitReport:
    """Follow ``A_{!_s}(mu)`` down to the harmonic mean as ``s`` decreases.

    Checks that the values decrease in Loewner order and that the final
    Thompson gap to ``H(mu)`` is consistent with linear decay in ``s``:
    it must not exceed ``1.5 (s_last / s_prev)`` times the previous gap
    (plus ``slack``). The Richardson combination ``2 X_{s/2} - X_s`` is
    reported as a sharper estimate of the limit.
    """
    ss = [2.0**-k for k in range(0, 7)] if s_sequence is None else [float(s) for s in s_sequence]
    if any(b >= a for a, b in zip(ss, ss[1:])) or not 0 < ss[-1] <= ss[0] <= 1:
        raise ParamOutOfRange("s_sequence must decrease within (0, 1]")
    cfg = cfg or SolverConfig()
    h = harmonic_mean(mu)
    values, gaps = [], []
    monotone = True
    prev = None
    for s in ss:
        run = cfg if prev is None else cfg.with_start(Given(prev))
        x, _ = deform_solve(arithmetic_mean, kubo_ando.harm(s), mu, run)
        if prev is not None:
            monotone &= hpd.loewner_leq(x, prev, slack * (1 + float(hpd.lambda_max(prev))))
        values.append(x)
        gaps.append(hpd.thompson_distance(x, h))
        prev = x
    final = gaps[-1]
    if len(ss) >= 2:
        bound = 1.5 * (ss[-1] / ss[-2]) * gaps[-2] + slack
        rich = 2 * values[-1] - values[-2] if ss[-1] == ss[-2] / 2 else values[-1]
        try:
            rgap = hpd.thompson_distance(rich, h)
        except NotPositiveDefinite:
            rgap = float("nan")
    else:
        bound, rgap = math.inf, float("nan")
    passed = monotone and final <= bound
    return HarmonicLimitReport(ss, gaps, monotone, bound, final, rgap, passed, values)
