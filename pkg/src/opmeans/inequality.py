"""Majorization primitives and machine checks of mean inequalities.

Every ``verify_*`` function evaluates both sides of one inequality on a
concrete measure and returns an ``InequalityReport``. Loewner checks
report the relative margin ``lambda_min(U - L) / (1 + max(|U|, |L|))``,
so a check passes when its margin is at least ``-slack``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hpd, kubo_ando, means
from . import measure as msr
from . import recipe as rcp
from .errors import ClassTagMismatch, DomainError, LengthMismatch, ParamOutOfRange, UnsupportedMean
from .measure import DiscreteMeasure

WEAK, STRONG, LOG, WEAK_LOG, SUPER = "weak", "strong", "log", "weak_log", "super"
KINDS = (WEAK, STRONG, LOG, WEAK_LOG, SUPER)


# --- majorization ---------------------------------------------------------------


@dataclass
class MajorizationVerdict:
    """Outcome of ``a`` majorized by ``b``.

    ``partial_a``/``partial_b`` are partial sums (of logs for the log
    kinds) of the rearranged vectors; ``worst_margin`` is the smallest
    ``partial_b - partial_a`` (for ``super`` the reverse), and for
    ``strong``/``log`` also includes ``-|total difference|``.
    """

    kind: str
    partial_a: np.ndarray
    partial_b: np.ndarray
    passed: bool
    worst_margin: float
    slack: float

    def __bool__(self):
        return self.passed


def majorize(a, b, kind: str = WEAK, slack: float | None = None) -> MajorizationVerdict:
    """Decide ``a < b`` in the majorization order ``kind``.

    Parameters
    ----------
    a, b : array_like
        Real vectors of equal length, in any order.
    kind : {"weak", "strong", "log", "weak_log", "super"}
        ``weak``: partial sums of decreasing rearrangements. ``strong``:
        weak plus equal totals. ``log``/``weak_log``: the same on
        products, positive entries only. ``super``: partial sums of
        increasing rearrangements with ``a`` above ``b``.
    slack : float, optional
        Defaults to ``1e-9 (1 + largest absolute partial sum)``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise LengthMismatch(f"vectors of length {a.size} and {b.size}")
    if kind not in KINDS:
        raise ValueError(f"unknown majorization kind {kind!r}")
    if kind in (LOG, WEAK_LOG):
        if np.any(a <= 0) or np.any(b <= 0):
            raise DomainError("log majorization needs positive entries")
        a, b = np.log(a), np.log(b)
    if kind == SUPER:
        pa, pb = np.cumsum(np.sort(a)), np.cumsum(np.sort(b))
        margins = pa - pb
    else:
        pa, pb = np.cumsum(np.sort(a)[::-1]), np.cumsum(np.sort(b)[::-1])
        margins = pb - pa
    if slack is None:
        scale = max(np.abs(pa).max(initial=0.0), np.abs(pb).max(initial=0.0))
        slack = 1e-9 * (1.0 + scale)
    worst = float(margins.min(initial=np.inf))
    if kind in (STRONG, LOG) and a.size:
        worst = min(worst, -abs(float(pa[-1] - pb[-1])))
    return MajorizationVerdict(kind, pa, pb, bool(worst >= -slack), worst, float(slack))


# --- norms and maps ---------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneNorm:
    """A norm with ``0 <= A <= B`` implying ``|A| <= |B|``."""

    name: str
    fn: Callable[[np.ndarray], float] = field(repr=False, compare=False)

    def __call__(self, a) -> float:
        return float(self.fn(np.asarray(a, dtype=float)))


def _svals(a):
    return np.linalg.svd(a, compute_uv=False)


def _numerical_radius(a, grid: int = 720):
    """``max_t lambda_max(Re(e^{it} A))`` on a grid of angles.

    The Hermitian part ``cos t S + i sin t K`` (``S`` symmetric, ``K``
    skew) is embedded as a real symmetric block matrix of size ``2N``.
    Exact for normal matrices at ``t = 0``.
    """
    n = len(a)
    th = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    c, s = np.cos(th)[:, None, None], np.sin(th)[:, None, None]
    re, im = 0.5 * (a + a.T), 0.5 * (a - a.T)
    blocks = np.empty((grid, 2 * n, 2 * n))
    blocks[:, :n, :n] = c * re
    blocks[:, n:, n:] = c * re
    blocks[:, :n, n:] = -s * im
    blocks[:, n:, :n] = s * im
    return float(np.linalg.eigvalsh(blocks)[:, -1].max())


def ky_fan(k: int) -> MonotoneNorm:
    return MonotoneNorm(f"ky_fan_{k}", lambda a: float(_svals(a)[:k].sum()))


OPERATOR = MonotoneNorm("operator", lambda a: float(_svals(a)[0]))
TRACE = MonotoneNorm("trace", lambda a: float(_svals(a).sum()))
FROBENIUS = MonotoneNorm("frobenius", lambda a: float(np.linalg.norm(a)))
OPERATOR_PLUS_TRACE = MonotoneNorm("operator_plus_abs_trace", lambda a: float(_svals(a)[0] + abs(np.trace(a))))
NUMERICAL_RADIUS = MonotoneNorm("numerical_radius", _numerical_radius)
NORMS = (OPERATOR, TRACE, ky_fan(2), FROBENIUS, OPERATOR_PLUS_TRACE, NUMERICAL_RADIUS)


@dataclass(frozen=True)
class PositiveMap:
    """Positive linear map ``M_N -> M_K`` acting on stacks of matrices."""

    kind: str
    dim_in: int
    dim_out: int
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    params: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        img = self(np.eye(self.dim_in))
        if hpd.lambda_min(img) <= 1e-12 * max(1.0, hpd.lambda_max(img)):
            raise DomainError(f"{self.kind}: Phi(I) is not invertible")

    def __call__(self, a) -> np.ndarray:
        return hpd.symmetrize(self.fn(np.asarray(a, dtype=float)))


def compression(idx, dim: int) -> PositiveMap:
    """``A -> A[idx, idx]``."""
    idx = np.asarray(idx, dtype=int)
    return PositiveMap("compression", dim, len(idx), lambda a: a[..., idx[:, None], idx[None, :]], {"idx": idx})


def pinching(blocks, dim: int) -> PositiveMap:
    """``A -> sum_k P_k A P_k`` for the coordinate projections of a partition."""
    labels = np.empty(dim, dtype=int)
    for k, blk in enumerate(blocks):
        labels[np.asarray(blk, dtype=int)] = k
    mask = (labels[:, None] == labels[None, :]).astype(float)
    return PositiveMap("pinching", dim, dim, lambda a: a * mask, {"blocks": [list(b) for b in blocks]})


def congruence_normalized(s) -> PositiveMap:
    """``A -> T^{-1/2} S A S^T T^{-1/2}`` with ``T = S S^T``; unital."""
    s = np.asarray(s, dtype=float)
    if np.linalg.matrix_rank(s) < s.shape[0]:
        raise DomainError("S S^T must be invertible")
    t_isqrt = hpd.matrix_power(s @ s.T, -0.5)
    c = t_isqrt @ s
    return PositiveMap("congruence_normalized", s.shape[1], s.shape[0], lambda a: c @ a @ c.T, {"s": s})


def conjugation_mixture(weights, unitaries) -> PositiveMap:
    """``A -> sum_k p_k U_k A U_k^T``."""
    p = np.asarray(weights, dtype=float)
    u = np.asarray(unitaries, dtype=float)

    def fn(a):
        return np.einsum("k,kij,...jl,kml->...im", p, u, a, u)

    return PositiveMap("conjugation_mixture", u.shape[-1], u.shape[-1], fn, {"weights": p, "unitaries": u})


def identity_map(dim: int) -> PositiveMap:
    return PositiveMap("identity", dim, dim, lambda a: a.copy())


MAP_KINDS = ("compression", "pinching", "congruence_normalized", "conjugation_mixture")


def random_positive_map(rng: np.random.Generator, kind: str, dim: int) -> PositiveMap:
    from .sampling import random_invertible, random_orthogonal

    if kind == "compression":
        k = int(rng.integers(1, dim + 1))
        return compression(np.sort(rng.choice(dim, k, replace=False)), dim)
    if kind == "pinching":
        labels = rng.integers(0, max(1, dim - 1) + 1, dim)
        return pinching([np.nonzero(labels == v)[0] for v in np.unique(labels)], dim)
    if kind == "congruence_normalized":
        k = int(rng.integers(1, dim + 1))
        return congruence_normalized(random_invertible(rng, dim)[:k])
    if kind == "conjugation_mixture":
        m = int(rng.integers(1, 4))
        p = rng.uniform(0.1, 1.0, m)
        return conjugation_mixture(p / p.sum(), [random_orthogonal(rng, dim) for _ in range(m)])
    if kind == "identity":
        return identity_map(dim)
    raise ValueError(f"unknown positive map kind {kind!r}")


def positivity_spot_check(phi: PositiveMap, rng=None, trials: int = 20) -> bool:
    """``Phi(A)`` is PD for sampled PD ``A``."""
    from .sampling import random_spd

    rng = np.random.default_rng(rng)
    a = np.stack([random_spd(rng, phi.dim_in) for _ in range(trials)])
    return bool(np.all(hpd.lambda_min(phi(a)) > 0))


# --- reports -----------------------------------------------------------------------


@dataclass
class Check:
    label: str
    margin: float
    passed: bool


@dataclass
class InequalityReport:
    """Checks of one inequality on one instance.

    ``margin`` is the smallest check margin; negative values beyond the
    slack are failures.
    """

    property: str
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def margin(self) -> float:
        return min((c.margin for c in self.checks), default=np.inf)

    def __bool__(self):
        return self.passed

    def loewner(self, label, lower, upper, slack):
        """Record ``lower <= upper``."""
        scale = 1.0 + max(hpd.lambda_max(lower), hpd.lambda_max(upper))
        m = hpd.loewner_margin(lower, upper) / scale
        self.checks.append(Check(label, float(m), bool(m >= -slack)))

    def scalar(self, label, lower, upper, slack):
        m = (upper - lower) / (1.0 + max(abs(lower), abs(upper)))
        self.checks.append(Check(label, float(m), bool(m >= -slack)))

    def equal(self, label, a, b, tol):
        """Record ``a = b`` up to Thompson distance ``tol``; margin is ``-d_T``."""
        d = float(hpd.thompson_distance(a, b))
        self.checks.append(Check(label, -d, bool(d <= tol)))

    def majorization(self, label, verdict: MajorizationVerdict):
        self.checks.append(Check(label, verdict.worst_margin, verdict.passed))
        self.details.setdefault("majorization", {})[label] = verdict


def _evaluator(mean, cfg):
    if isinstance(mean, (str, rcp.Leaf, rcp.Deform, rcp.Compose, rcp.Adjoint)):
        return rcp.evaluator(mean, cfg)
    return mean


def _recipe(mean) -> rcp.MeanRecipe:
    if isinstance(mean, str):
        return rcp.parse_recipe(mean)
    rcp.validate(mean)
    return mean


# --- section: norm and positive-map inequalities ---------------------------------------


def verify_norm_inequality(mean, norm: MonotoneNorm, mu: DiscreteMeasure, slack: float = 1e-8, cfg=None) -> InequalityReport:
    """``|M(mu)| <= M(|.|_* mu)``; the right side is a scalar mean."""
    ev = _evaluator(mean, cfg)
    lhs = norm(ev(mu))
    rhs = float(ev(msr.norm(mu, norm))[0, 0])
    rep = InequalityReport("norm_inequality", details={"norm": norm.name, "lhs": lhs, "rhs": rhs})
    rep.scalar(f"|M(mu)| <= M(|.|_* mu) [{norm.name}]", lhs, rhs, slack)
    return rep


def verify_two_variable_norm(sigma: kubo_ando.RepresentingMean, a, b, norm: MonotoneNorm, slack: float = 1e-8) -> InequalityReport:
    """``|A sigma B| <= |A| sigma |B|``."""
    lhs = norm(kubo_ando.apply(sigma, a, b))
    rhs = float(kubo_ando.apply_scalar(sigma, norm(a), norm(b)))
    rep = InequalityReport("two_variable_norm", details={"lhs": lhs, "rhs": rhs})
    rep.scalar(f"|A {sigma.name} B| [{norm.name}]", lhs, rhs, slack)
    return rep


def verify_positive_map(mean, phi: PositiveMap, mu: DiscreteMeasure, slack: float = 1e-8, cfg=None) -> InequalityReport:
    """``Phi(M(mu)) <= M(Phi_* mu)``."""
    ev = _evaluator(mean, cfg)
    lhs = phi(ev(mu))
    rhs = ev(msr.positive_map(mu, phi))
    rep = InequalityReport("positive_map", details={"map": phi.kind, "lhs": lhs, "rhs": rhs})
    rep.loewner(f"Phi(M(mu)) <= M(Phi_* mu) [{phi.kind}]", lhs, rhs, slack)
    return rep


# --- section: Ando-Hiai family --------------------------------------------------------------


AH_POWERS = (1.5, 2.0, 4.0)


def verify_ando_hiai(mean, mu: DiscreteMeasure, r_list=AH_POWERS, slack: float = 1e-7, cfg=None) -> InequalityReport:
    """Ando-Hiai inequality and its strengthened form for each ``r >= 1``.

    For ``M`` tagged ``zero_plus`` the measure is scaled so that
    ``M(mu) >= I`` with ``lambda_min = 1``; then ``M(mu^r) >= I`` and
    ``M(mu^r) >= lambda_min(M(mu))^{r-1} M(mu)`` are checked. For
    ``zero_minus`` the dual statements with ``|M(mu)| = 1``. The Karcher
    mean carries both tags and gets both.
    """
    tags = rcp.class_tags(_recipe(mean))
    if not (tags.zero_plus or tags.zero_minus):
        raise ClassTagMismatch(f"{mean} carries neither zero_plus nor zero_minus")
    if any(r < 1 for r in r_list):
        raise ParamOutOfRange("Ando-Hiai exponents must be at least 1")
    ev = _evaluator(mean, cfg)
    x = ev(mu)
    eye = np.eye(mu.dim)
    rep = InequalityReport("ando_hiai", details={"r": list(r_list)})
    sides = []
    if tags.zero_plus:
        sides.append(("plus", hpd.lambda_min(x)))
    if tags.zero_minus:
        sides.append(("minus", hpd.lambda_max(x)))
    for side, c in sides:
        nmu = msr.scale(mu, 1.0 / c)
        xn = x / c
        for r in r_list:
            y = ev(msr.power(nmu, r))
            if side == "plus":
                rep.loewner(f"M(mu)>=I => M(mu^{r:g})>=I", eye, y, slack)
                rep.loewner(f"M(mu^{r:g}) >= lmin^{r - 1:g} M(mu)", hpd.lambda_min(xn) ** (r - 1) * xn, y, slack)
            else:
                rep.loewner(f"M(mu)<=I => M(mu^{r:g})<=I", y, eye, slack)
                rep.loewner(f"M(mu^{r:g}) <= |M|^{r - 1:g} M(mu)", y, hpd.lambda_max(xn) ** (r - 1) * xn, slack)
    return rep


def verify_modified_ando_hiai(mean, sigma: kubo_ando.RepresentingMean, mu: DiscreteMeasure, r: float, slack: float = 1e-7, cfg=None) -> InequalityReport:
    """Sandwich between deformations by ``sigma`` and its power modification.

    ``sigma_s`` has representing function ``f(x^s)``. For ``r >= 1``,
    with ``X = M_sigma(mu)``::

        lambda_min(X)^{r-1} X <= M_{sigma_{1/r}}(mu^r) <= |X|^{r-1} X

    and for ``0 < r <= 1``, with ``X = M_{sigma_r}(mu)``::

        |X|^{r-1} X <= M_sigma(mu^r) <= lambda_min(X)^{r-1} X
    """
    base = _recipe(mean)
    if sigma.is_left_trivial:
        raise ParamOutOfRange("sigma must not be the left trivial mean")
    if not r > 0:
        raise ParamOutOfRange(f"r = {r!r} must be positive")
    if r >= 1:
        m_mu = rcp.deform(base, sigma)
        m_pow = rcp.deform(base, kubo_ando.power_modify(sigma, 1.0 / r))
    else:
        m_mu = rcp.deform(base, kubo_ando.power_modify(sigma, r))
        m_pow = rcp.deform(base, sigma)
    x = rcp.eval_recipe(m_mu, mu, cfg)
    y = rcp.eval_recipe(m_pow, msr.power(mu, r), cfg)
    lo_c, hi_c = hpd.lambda_min(x) ** (r - 1), hpd.lambda_max(x) ** (r - 1)
    if r < 1:
        lo_c, hi_c = hi_c, lo_c
    rep = InequalityReport("modified_ando_hiai", details={"r": r, "sigma": sigma.name, "recipes": [str(m_mu), str(m_pow)]})
    rep.loewner("lower sandwich", lo_c * x, y, slack)
    rep.loewner("upper sandwich", y, hi_c * x, slack)
    return rep


# --- section: eigenvalue majorization ------------------------------------------------------


def _eig(x) -> np.ndarray:
    return hpd.eigvals_desc(x)


def _diag_mean(ev, mu: DiscreteMeasure) -> np.ndarray:
    """``M(lambda_* mu)`` as a vector; the atoms are commuting diagonals."""
    return np.diag(ev(msr.eigenvalues(mu))).copy()


def _chain(mu: DiscreteMeasure, cfg, rs=(1.0, 0.5, 0.25)):
    values = [("G(mu)" if r == 1 else f"G(mu^{r:g})^(1/{r:g})", _power_root(mu, r, cfg)) for r in rs]
    values.append(("LE(mu)", means.log_euclidean_mean(mu)))
    values.append(("G(lambda_* mu)", np.diag(means.karcher_mean(msr.eigenvalues(mu), cfg)[0])))
    return values


def _power_root(mu: DiscreteMeasure, r: float, cfg=None) -> np.ndarray:
    """``G(mu^r)^{1/r}`` computed as ``exp(log G(mu^r) / r)``.

    The error in ``log G(mu^r)`` is amplified by ``1/r``, so the solver
    tolerance is scaled by ``r``.
    """
    cfg = cfg or means.SolverConfig()
    if r < 1:
        cfg = dataclasses.replace(cfg, iter_tol=cfg.iter_tol * r, residual_tol=cfg.residual_tol * r)
    g, _ = means.karcher_mean(msr.power(mu, r), cfg)
    if r == 1:
        return g
    return hpd.matrix_exp(hpd.matrix_log(g) / r)


def verify_eigen_majorization(mean, mu: DiscreteMeasure, mode: str | None = None, slack: float | None = None, cfg=None) -> InequalityReport:
    """Eigenvalues of a mean against the mean of eigenvalue vectors.

    Parameters
    ----------
    mean : recipe or str
        ``A`` (strong), ``H`` (weak), ``P(r)`` or ``G``.
    mode : {"direct", "inverse", "chain"}, optional
        ``direct``: ``lambda(M(mu))`` against ``M(lambda_* mu)``; for
        ``P(r)`` this needs ``0 < r <= 1``. ``inverse``: the same for
        ``P(r)^{-1}`` with ``-1 <= r < 0``. ``chain``: for ``G``, the
        log-majorization chain through ``G(mu^r)^{1/r}`` for
        ``r = 1, 1/2, 1/4``, ``LE(mu)`` and ``G(lambda_* mu)``. Defaults
        to ``chain`` for ``G``, ``inverse`` for negative powers and
        ``direct`` otherwise.

    Raises
    ------
    UnsupportedMean
        For any other mean, and for ``direct`` with a power in ``(-1, 0)``,
        where no majorization is known.
    """
    m = _recipe(mean)
    if not isinstance(m, rcp.Leaf) or m.kind == "LE":
        raise UnsupportedMean(f"no eigenvalue majorization for {m}")
    kind, r = m.kind, m.r
    if kind == "P" and r == 1:
        kind = "A"
    if kind == "P" and r == -1 and mode != "inverse":
        kind = "H"
    if mode is None:
        mode = {"G": "chain"}.get(kind, "inverse" if kind == "P" and r < 0 else "direct")
    rep = InequalityReport("eigen_majorization", details={"mean": str(m), "mode": mode})
    if mode == "chain":
        if kind != "G":
            raise UnsupportedMean("chain mode is for the Karcher mean")
        values = _chain(mu, cfg)
        for (na, a), (nb, b) in zip(values, values[1:]):
            rep.majorization(f"{na} <log {nb}", majorize(_eig(a), b if b.ndim == 1 else _eig(b), LOG, slack))
        return rep
    ev = _evaluator(m, cfg)
    if mode == "direct":
        if kind == "P" and not 0 < r <= 1:
            raise UnsupportedMean(f"no weak majorization known for P({r:g})")
        if kind == "G":
            rep.majorization("G(mu) <w G(lambda_* mu)", majorize(_eig(ev(mu)), _diag_mean(ev, mu), WEAK, slack))
            return rep
        mkind = STRONG if kind == "A" else WEAK
        rep.majorization(f"{m}(mu) vs {m}(lambda_* mu)", majorize(_eig(ev(mu)), _diag_mean(ev, mu), mkind, slack))
        return rep
    if mode == "inverse":
        if kind not in ("P", "H") or (kind == "P" and not -1 <= r < 0):
            raise UnsupportedMean(f"inverse mode needs a power in [-1, 0), got {m}")
        a = 1.0 / _eig(ev(mu))
        b = 1.0 / _diag_mean(ev, mu)
        rep.majorization(f"{m}(mu)^-1 <w {m}(lambda_* mu)^-1", majorize(a, b, WEAK, slack))
        return rep
    raise ValueError(f"unknown mode {mode!r}")


def verify_two_variable_majorization(sigma: kubo_ando.RepresentingMean, a, b, slack: float | None = None) -> InequalityReport:
    """``lambda(A sigma B) <w lambda(A) sigma lambda(B)`` entrywise on decreasing eigenvalues."""
    lhs = _eig(kubo_ando.apply(sigma, a, b))
    rhs = np.asarray(kubo_ando.apply_scalar(sigma, _eig(a), _eig(b)), dtype=float)
    rep = InequalityReport("two_variable_majorization", details={"sigma": sigma.name})
    rep.majorization(f"lambda(A {sigma.name} B) <w", majorize(lhs, rhs, WEAK, slack))
    return rep


def verify_ky_fan(a, b, slack: float | None = None) -> InequalityReport:
    """``lambda(A + B) < lambda(A) + lambda(B)``."""
    rep = InequalityReport("ky_fan")
    rep.majorization("lambda(A+B) < lambda(A)+lambda(B)", majorize(_eig(a + b), _eig(a) + _eig(b), STRONG, slack))
    return rep


def parallel_sum(a, b) -> np.ndarray:
    """``A : B = (A^{-1} + B^{-1})^{-1}``."""
    return hpd.matrix_inv(hpd.matrix_inv(a) + hpd.matrix_inv(b))


def verify_parallel_sum(a, b, slack: float | None = None) -> InequalityReport:
    """``lambda(A : B) <w lambda(A) : lambda(B)``."""
    la, lb = _eig(a), _eig(b)
    rep = InequalityReport("parallel_sum")
    rep.majorization("lambda(A:B) <w lambda(A):lambda(B)", majorize(_eig(parallel_sum(a, b)), la * lb / (la + lb), WEAK, slack))
    return rep


def explore_negative_power(mu: DiscreteMeasure, alpha: float, cfg=None) -> dict:
    """Margins of the unproven majorizations for ``P(alpha)``, ``-1 <= alpha < 0``.

    Records the weak majorization ``lambda(P(mu)) <w P(lambda_* mu)`` and
    the supermajorization of the same vectors. Nothing is asserted; a
    negative margin is a counterexample to the corresponding statement.
    """
    if not -1 <= alpha < 0:
        raise ParamOutOfRange(f"alpha = {alpha!r} must lie in [-1, 0)")
    ev = _evaluator(rcp.P(alpha), cfg)
    lhs, rhs = _eig(ev(mu)), _diag_mean(ev, mu)
    weak = majorize(lhs, rhs, WEAK)
    sup = majorize(lhs, rhs, SUPER)
    return {
        "alpha": alpha,
        "weak_margin": weak.worst_margin,
        "weak_counterexample": not weak.passed,
        "super_margin": sup.worst_margin,
        "super_counterexample": not sup.passed,
    }


# --- section: limits and determinants -----------------------------------------------------


LIE_TROTTER_RS = tuple(2.0**-k for k in range(1, 11))


def verify_lie_trotter(mu: DiscreteMeasure, r_sequence=LIE_TROTTER_RS, final_tol: float = 1e-6, slack: float = 1e-9, cfg=None) -> InequalityReport:
    """``d_T(G(mu^r)^{1/r}, LE(mu))`` along a decreasing sequence of ``r``.

    Passes when the gaps do not increase (within ``slack``) and the last
    gap is below ``final_tol``.
    """
    rs = [float(r) for r in r_sequence]
    if any(b >= a for a, b in zip(rs, rs[1:])) or rs[-1] <= 0:
        raise ParamOutOfRange("r_sequence must be positive and strictly decreasing")
    le = means.log_euclidean_mean(mu)
    gaps = [float(hpd.thompson_distance(_power_root(mu, r, cfg), le)) for r in rs]
    rep = InequalityReport("lie_trotter", details={"r": rs, "gaps": gaps})
    for r, g0, g1 in zip(rs[1:], gaps, gaps[1:]):
        rep.checks.append(Check(f"gap non-increasing at r={r:g}", g0 - g1, bool(g1 <= g0 + slack)))
    rep.checks.append(Check(f"final gap < {final_tol:g}", final_tol - gaps[-1], bool(gaps[-1] < final_tol)))
    return rep


def verify_minkowski(mean, mu: DiscreteMeasure, slack: float = 1e-8, cfg=None) -> InequalityReport:
    """``det^{1/N} M(mu)`` against ``M((det^{1/N})_* mu)``.

    ``>=`` for means tagged ``plus``, ``<=`` for ``minus``, so equality
    for the Karcher mean which carries both.
    """
    tags = rcp.class_tags(_recipe(mean))
    if not (tags.plus or tags.minus):
        raise ClassTagMismatch(f"{mean} carries neither plus nor minus")
    ev = _evaluator(mean, cfg)
    lhs = float(hpd.det_root(ev(mu)))
    rhs = float(ev(msr.det_root(mu))[0, 0])
    rep = InequalityReport("minkowski", details={"lhs": lhs, "rhs": rhs})
    if tags.plus:
        rep.scalar("det^(1/N) M(mu) >= M(det^(1/N)_* mu)", rhs, lhs, slack)
    if tags.minus:
        rep.scalar("det^(1/N) M(mu) <= M(det^(1/N)_* mu)", lhs, rhs, slack)
    return rep


def verify_two_variable_minkowski(sigma: kubo_ando.RepresentingMean, a, b, slack: float = 1e-8) -> InequalityReport:
    """``det^{1/N}(A sigma B) >= det^{1/N}(A) sigma det^{1/N}(B)`` for convex-type ``sigma``."""
    cls = kubo_ando.classify(sigma)
    if not (cls.gcv or cls.gcc):
        raise ClassTagMismatch(f"{sigma.name} is neither geometrically convex nor concave")
    lhs = float(hpd.det_root(kubo_ando.apply(sigma, a, b)))
    rhs = float(kubo_ando.apply_scalar(sigma, hpd.det_root(a), hpd.det_root(b)))
    rep = InequalityReport("two_variable_minkowski", details={"lhs": lhs, "rhs": rhs})
    if cls.gcv:
        rep.scalar("det^(1/N)(A sigma B) >= ...", rhs, lhs, slack)
    if cls.gcc:
        rep.scalar("det^(1/N)(A sigma B) <= ...", lhs, rhs, slack)
    return rep
