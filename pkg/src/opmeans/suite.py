"""Seeded randomized verification of all mean properties and inequalities.

``run_suite(config)`` draws independent instances for each registered
property, runs its check and aggregates a JSON-ready report. Trial ``i``
of property ``p`` under seed ``s`` always sees the same random stream, so
reports are byte-identical across runs and thread counts.
"""
from __future__ import annotations

import json
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hpd, inequality as ineq, kubo_ando, means, measure as msr, order, properties as props
from . import recipe as rcp
from . import sampling as smp
from . import transport
from .errors import OpMeansError
from .inequality import Check, InequalityReport

BUILTINS = ("A", "H", "G", "P(0.5)", "P(-0.5)")
RECIPES = ("deform(A, harm(0.5))", "compose(G; 1/2:A, 1/2:H)", "adjoint(deform(H, arith(0.5)))")
NESTED = ("deform(P(0.5), arith(0.5))", "deform(deform(A, harm(0.5)), geom(0.5))")
ZERO_TAGGED = ("A", "H", "G", "P(0.5)", "P(-0.5)", "P(0.25)", "deform(P(0.5), arith(0.5))", "adjoint(deform(P(0.5), arith(0.5)))")
SIGNED = ("A", "H", "G", "P(0.5)", "P(-0.5)", "deform(G, arith(0.5))", "adjoint(deform(P(0.5), arith(0.5)))")
POWERS = (1.0, -1.0, 0.5, -0.5, 0.25, -0.25)

DEFAULTS = {
    "seed": 0,
    "trials": 20,
    "properties": None,
    "dims": [1, 2, 3, 4],
    "atoms": [2, 6],
    "eps": [0.1, 0.01],
    "max_witnesses": 5,
    "trials_per_property": {},
}


@dataclass
class Context:
    dims: tuple
    atoms: tuple
    eps: tuple

    def eps_for(self, i: int) -> float:
        return self.eps[i % len(self.eps)]

    def measure(self, rng, i: int, dims=None, atoms=None, eps=None) -> msr.DiscreteMeasure:
        d = smp.random_dim(rng, dims or self.dims)
        lo, hi = atoms or self.atoms
        return smp.random_measure(rng, d, int(rng.integers(lo, hi + 1)), eps or self.eps_for(i))

    def small_dims(self, cap: int):
        return tuple(d for d in self.dims if d <= cap) or (min(self.dims),)


@dataclass(frozen=True)
class Property:
    name: str
    statement: str
    trial: Callable = field(repr=False)
    exploratory: bool = False


REGISTRY: dict[str, Property] = {}


def register(name: str, statement: str, exploratory: bool = False):
    def deco(fn):
        REGISTRY[name] = Property(name, statement, fn, exploratory)
        return fn

    return deco


def _pick(seq, i):
    return seq[i % len(seq)]


# --- mean engine ------------------------------------------------------------------------


@register("fixed_point", "deformed mean solves X = M(X sigma mu) from both starts: residual <= 1e-9, starts agree within 2e-11")
def _fixed_point(rng, i, ctx):
    base, sigma, mu = _pick(BUILTINS, i), smp.random_sigma(rng), ctx.measure(rng, i)
    rec = rcp.deform(rcp.parse_recipe(base), sigma)
    up = rcp.Evaluator(rec, means.SolverConfig(start=means.UPPER))(mu)
    lo = rcp.Evaluator(rec, means.SolverConfig(start=means.LOWER))(mu)
    rep = InequalityReport("fixed_point", details={"recipe": str(rec)})
    for label, x in (("upper", up), ("lower", lo)):
        r = means.deform_residual(rcp.evaluator(base), sigma, mu, x)
        rep.checks.append(Check(f"residual ({label}) <= 1e-9", 1e-9 - r, bool(r <= 1e-9)))
    d = float(hpd.thompson_distance(up, lo))
    rep.checks.append(Check("d_T(upper, lower) <= 2e-11", 2e-11 - d, bool(d <= 2e-11)))
    return rep, {"recipe": str(rec), "measure": mu}


@register("power_mean_equation", "power mean X_r satisfies |sum w (X^-1/2 A X^-1/2)^r - I| <= 1e-9 for r in +-1, +-1/2, +-1/4")
def _power_eq(rng, i, ctx):
    mu = ctx.measure(rng, i)
    rep = InequalityReport("power_mean_equation")
    for r in POWERS:
        x = means.power_mean(r, mu)
        res = means.power_mean_residual(x, r, mu)
        rep.checks.append(Check(f"r={r:g}", 1e-9 - res, bool(res <= 1e-9)))
    return rep, {"measure": mu}


@register("karcher_two_point", "Karcher mean of two equally weighted points equals A #_1/2 B within 1e-8")
def _karcher_two(rng, i, ctx):
    d = smp.random_dim(rng, ctx.dims)
    eps = ctx.eps_for(i)
    a, b = smp.random_spd(rng, d, eps), smp.random_spd(rng, d, eps)
    mu = msr.uniform([a, b])
    rep = InequalityReport("karcher_two_point")
    rep.equal("G = A #_1/2 B", means.karcher_mean(mu)[0], kubo_ando.apply(kubo_ando.geom(0.5), a, b), 1e-8)
    return rep, {"measure": mu}


@register("power_limit", "P_-r <= G <= P_r brackets nest with non-increasing width; their limit matches the Karcher solver within 1e-6")
def _power_limit(rng, i, ctx):
    mu = ctx.measure(rng, i)
    x, report = means.karcher_via_power_limit(mu)
    g, _ = means.karcher_mean(mu)
    rep = InequalityReport("power_limit", details={"widths": report.widths})
    rep.checks.append(Check("widths non-increasing", 0.0 if report.widths_monotone else -1.0, report.widths_monotone))
    rep.checks.append(Check("sandwich P_-r <= P_r", 0.0 if report.sandwich_ok else -1.0, report.sandwich_ok))
    rep.checks.append(Check("brackets nested", 0.0 if report.nested_ok else -1.0, report.nested_ok))
    rep.equal("limit = Karcher solver", x, g, 1e-6)
    return rep, {"measure": mu}


@register("harmonic_limit", "A deformed by !_s decreases in s toward H as s -> 0")
def _harmonic_limit(rng, i, ctx):
    mu = ctx.measure(rng, i)
    r = means.harmonic_limit_check(mu)
    rep = InequalityReport("harmonic_limit", details={"gaps": r.gaps})
    rep.checks.append(Check("monotone in s", 0.0 if r.monotone else -1.0, r.monotone))
    rep.checks.append(Check("terminal gap within extrapolated bound", r.extrapolated_bound - r.final_gap, r.passed))
    return rep, {"measure": mu}


@register("lie_trotter", "G(mu^r)^(1/r) -> LE(mu): gap non-increasing and below 1e-6 at r = 2^-10")
def _lie_trotter(rng, i, ctx):
    mu = ctx.measure(rng, i, dims=ctx.small_dims(2), atoms=(2, 2))
    return ineq.verify_lie_trotter(mu), {"measure": mu}


@register("contraction", "d_T(M mu, M nu) <= delta_T(mu, nu) <= W_inf(mu, nu) + 1e-7")
def _contraction(rng, i, ctx):
    mean = _pick(BUILTINS + NESTED, i)
    mu = ctx.measure(rng, i)
    nu = ctx.measure(rng, i, dims=(mu.dim,))
    c = transport.contraction_check(mean, mu, nu)
    rep = InequalityReport("contraction", details={"recipe": mean, "dT": c.dT, "deltaT": c.deltaT, "dWinf": c.dWinf})
    rep.checks.append(Check("d_T <= delta_T", c.margin_first, bool(c.margin_first >= -1e-7)))
    rep.checks.append(Check("delta_T <= W_inf", c.margin_second, bool(c.margin_second >= -1e-7)))
    return rep, {"recipe": mean, "measure": mu, "measure_b": nu}


# --- axioms of means -----------------------------------------------------------------------

AXIOM_MEANS = BUILTINS + RECIPES


@register("monotonicity", "mu <= nu implies M(mu) <= M(nu)")
def _monotonicity(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    mu = ctx.measure(rng, i, atoms=(2, 4))
    nu = smp.dominating_measure(rng, mu, float(rng.uniform(0.05, 1.0)))
    perm = rng.permutation(nu.size)
    nu = msr.DiscreteMeasure(nu.atoms[perm], [nu.weights[k] for k in perm])
    return props.check_monotonicity(mean, mu, nu), {"recipe": mean, "measure": mu, "measure_b": nu}


@register("homogeneity", "M(a mu) = a M(mu)")
def _homogeneity(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    mu = ctx.measure(rng, i)
    alpha = float(np.exp(rng.uniform(-2, 2)))
    return props.check_homogeneity(mean, mu, alpha), {"recipe": mean, "measure": mu, "alpha": alpha}


@register("congruence", "S M(mu) S^T = M(S mu S^T)")
def _congruence(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    mu = ctx.measure(rng, i)
    s = smp.random_invertible(rng, mu.dim, 3.0)
    return props.check_congruence(mean, mu, s), {"recipe": mean, "measure": mu, "S": s.tolist()}


@register("concavity", "M(mu mix_t nu) >= (1-t) M(mu) + t M(nu)")
def _concavity(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    mu = ctx.measure(rng, i, atoms=(1, 3))
    nu = ctx.measure(rng, i, dims=(mu.dim,), atoms=(1, 3))
    t = float(rng.uniform(0.1, 0.9))
    return props.check_concavity(mean, mu, nu, t), {"recipe": mean, "measure": mu, "measure_b": nu, "t": t}


@register("amh_sandwich", "H(mu) <= M(mu) <= A(mu)")
def _amh(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    mu = ctx.measure(rng, i)
    return props.check_amh(mean, mu), {"recipe": mean, "measure": mu}


@register("barycentric", "M(delta_A) = A and M(delta_I) = I")
def _barycentric(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    a = smp.random_spd(rng, smp.random_dim(rng, ctx.dims), ctx.eps_for(i))
    return props.check_barycentric(mean, a), {"recipe": mean, "A": a.tolist()}


@register("direct_sum", "M(mu1 (+) mu2) = M(mu1) (+) M(mu2)")
def _direct_sum(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    cap = max(ctx.dims)
    d1 = smp.random_dim(rng, ctx.small_dims(max(1, cap - 1)))
    d2 = smp.random_dim(rng, ctx.small_dims(max(1, cap - d1)))
    mu1 = ctx.measure(rng, i, dims=(d1,), atoms=(1, 3))
    mu2 = ctx.measure(rng, i, dims=(d2,), atoms=(1, 3))
    return props.check_direct_sum(mean, mu1, mu2), {"recipe": mean, "measure": mu1, "measure_b": mu2}


@register("adjoint_identity", "(M_sigma)* = (M*)_(sigma*)")
def _adjoint(rng, i, ctx):
    mean = _pick(AXIOM_MEANS, i)
    sigma = smp.random_sigma(rng)
    mu = ctx.measure(rng, i, atoms=(2, 4))
    return props.check_adjoint_identity(mean, sigma, mu), {"recipe": mean, "sigma": sigma.name, "measure": mu}


# --- Ando-Hiai family ------------------------------------------------------------------------


@register("ando_hiai", "M(mu) >= I implies M(mu^r) >= I, and M(mu^r) >= lmin(M mu)^(r-1) M(mu), for r in 1.5, 2, 4 (duals for the minus class)")
def _ando_hiai(rng, i, ctx):
    mean = _pick(ZERO_TAGGED, i)
    mu = ctx.measure(rng, i, eps=0.1)
    return ineq.verify_ando_hiai(mean, mu), {"recipe": mean, "measure": mu}


@register("modified_ando_hiai", "lmin(X)^(r-1) X <= M_(sigma_1/r)(mu^r) <= |X|^(r-1) X with X = M_sigma(mu), r >= 1")
def _mod_ah(rng, i, ctx):
    mean = _pick(BUILTINS, i)
    sigma = smp.random_sigma(rng)
    r = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
    mu = ctx.measure(rng, i, eps=0.1, atoms=(2, 4))
    return ineq.verify_modified_ando_hiai(mean, sigma, mu, r), {"recipe": mean, "sigma": sigma.name, "r": r, "measure": mu}


@register("modified_ando_hiai_complement", "|X|^(r-1) X <= M_sigma(mu^r) <= lmin(X)^(r-1) X with X = M_(sigma_r)(mu), 0 < r <= 1")
def _mod_ah_c(rng, i, ctx):
    mean = _pick(BUILTINS, i)
    sigma = smp.random_sigma(rng)
    r = float(rng.choice([0.25, 0.5, 0.75, 1.0]))
    mu = ctx.measure(rng, i, atoms=(2, 4))
    return ineq.verify_modified_ando_hiai(mean, sigma, mu, r), {"recipe": mean, "sigma": sigma.name, "r": r, "measure": mu}


# --- positive maps and norms -------------------------------------------------------------------


@register("positive_map", "Phi(M(mu)) <= M(Phi_* mu) for positive maps with invertible Phi(I)")
def _positive_map(rng, i, ctx):
    mean = _pick(BUILTINS, i)
    kind = _pick(("compression", "pinching", "conjugation_mixture", "congruence_normalized"), i // len(BUILTINS))
    mu = ctx.measure(rng, i)
    phi = ineq.random_positive_map(rng, kind, mu.dim)
    return ineq.verify_positive_map(mean, phi, mu), {"recipe": mean, "map": kind, "map_params": _jsonable(phi.params), "measure": mu}


@register("norm_inequality", "|M(mu)| <= M(|.|_* mu) for monotone norms")
def _norm(rng, i, ctx):
    mean = _pick(BUILTINS + RECIPES, i)
    norm = _pick(ineq.NORMS, i // len(BUILTINS + RECIPES))
    mu = ctx.measure(rng, i)
    return ineq.verify_norm_inequality(mean, norm, mu), {"recipe": mean, "norm": norm.name, "measure": mu}


@register("minkowski", "det^(1/N) M(mu) >= M(det^(1/N)_* mu) for the plus class, <= for the minus class")
def _minkowski(rng, i, ctx):
    mean = _pick(SIGNED, i)
    mu = ctx.measure(rng, i)
    return ineq.verify_minkowski(mean, mu), {"recipe": mean, "measure": mu}


# --- majorization ---------------------------------------------------------------------------


@register("eig_arith", "lambda(A(mu)) is majorized by A(lambda_* mu)")
def _eig_a(rng, i, ctx):
    mu = ctx.measure(rng, i)
    return ineq.verify_eigen_majorization("A", mu), {"measure": mu}


@register("eig_harm", "lambda(H(mu)) is weakly majorized by H(lambda_* mu)")
def _eig_h(rng, i, ctx):
    mu = ctx.measure(rng, i)
    return ineq.verify_eigen_majorization("H", mu), {"measure": mu}


@register("eig_power", "lambda(P_r(mu)) is weakly majorized by P_r(lambda_* mu), 0 < r <= 1")
def _eig_p(rng, i, ctx):
    r = _pick((0.25, 0.5, 0.75), i)
    mu = ctx.measure(rng, i)
    return ineq.verify_eigen_majorization(rcp.P(r), mu), {"recipe": f"P({r})", "measure": mu}


@register("eig_power_inverse", "lambda(P_r(mu)^-1) is weakly majorized by P_r(lambda_* mu)^-1, -1 <= r < 0")
def _eig_pinv(rng, i, ctx):
    r = _pick((-0.25, -0.5, -0.75), i)
    mu = ctx.measure(rng, i)
    return ineq.verify_eigen_majorization(rcp.P(r), mu, mode="inverse"), {"recipe": f"P({r})", "measure": mu}


@register("eig_geom_chain", "G(mu) <log G(mu^r)^(1/r) (r = 1/2, 1/4) <log LE(mu) <log G(lambda_* mu)")
def _eig_g(rng, i, ctx):
    mu = ctx.measure(rng, i)
    return ineq.verify_eigen_majorization("G", mu, mode="chain"), {"measure": mu}


@register("eig_two_variable", "lambda(A sigma B) is weakly majorized by lambda(A) sigma lambda(B)")
def _eig_two(rng, i, ctx):
    d, eps = smp.random_dim(rng, ctx.dims), ctx.eps_for(i)
    a, b, sigma = smp.random_spd(rng, d, eps), smp.random_spd(rng, d, eps), smp.random_sigma(rng, 0.05, 0.95)
    return ineq.verify_two_variable_majorization(sigma, a, b), {"sigma": sigma.name, "A": a.tolist(), "B": b.tolist()}


@register("ky_fan", "lambda(A + B) is majorized by lambda(A) + lambda(B)")
def _ky_fan(rng, i, ctx):
    d, eps = smp.random_dim(rng, ctx.dims), ctx.eps_for(i)
    a, b = smp.random_spd(rng, d, eps), smp.random_spd(rng, d, eps)
    return ineq.verify_ky_fan(a, b), {"A": a.tolist(), "B": b.tolist()}


@register("parallel_sum", "lambda(A : B) is weakly majorized by lambda(A) : lambda(B)")
def _parallel(rng, i, ctx):
    d, eps = smp.random_dim(rng, ctx.dims), ctx.eps_for(i)
    a, b = smp.random_spd(rng, d, eps), smp.random_spd(rng, d, eps)
    return ineq.verify_parallel_sum(a, b), {"A": a.tolist(), "B": b.tolist()}


@register("negative_power_exploration", "search for counterexamples to weak and super majorization of P_r, -1 < r < 0 (nothing asserted)", exploratory=True)
def _explore(rng, i, ctx):
    alpha = float(rng.uniform(-0.95, -0.05))
    mu = ctx.measure(rng, i, dims=ctx.small_dims(4) if max(ctx.dims) > 1 else ctx.dims)
    out = ineq.explore_negative_power(mu, alpha)
    rep = InequalityReport("negative_power_exploration", details=out)
    rep.checks.append(Check("weak", out["weak_margin"], not out["weak_counterexample"]))
    rep.checks.append(Check("super", out["super_margin"], not out["super_counterexample"]))
    return rep, {"alpha": alpha, "measure": mu}


# --- stochastic order -------------------------------------------------------------------------


@register("order_axioms", "the stochastic order is reflexive, antisymmetric and transitive")
def _order_axioms(rng, i, ctx):
    mu = ctx.measure(rng, i, atoms=(1, 4))
    nu = smp.dominating_measure(rng, mu, float(rng.uniform(0.0, 0.5)))
    lam = smp.dominating_measure(rng, nu, float(rng.uniform(0.0, 0.5)))
    a = order.measure_order_axioms(mu, nu, lam)
    rep = InequalityReport("order_axioms", details={"violations": a.violations})
    rep.checks.append(Check("axioms", 0.0 if a.ok else -1.0, a.ok))
    return rep, {"measure": mu, "measure_b": nu, "measure_c": lam}


# --- runner -----------------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, msr.DiscreteMeasure):
        return obj.to_dict()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def trial_rng(seed: int, name: str, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(name.encode()), int(trial)])


def run_trial(prop: Property, seed: int, trial: int, ctx: Context) -> dict:
    """One trial as a plain dict: ``passed``, ``margin`` and on failure a witness."""
    rng = trial_rng(seed, prop.name, trial)
    try:
        rep, witness = prop.trial(rng, trial, ctx)
    except OpMeansError as exc:
        return {"trial": trial, "passed": False, "margin": None, "error": f"{type(exc).__name__}: {exc}", "witness": None}
    out = {"trial": trial, "passed": rep.passed, "margin": float(rep.margin)}
    if not rep.passed:
        out["witness"] = _jsonable(witness)
        out["failed_checks"] = [c.label for c in rep.checks if not c.passed]
    return out


def threads() -> int:
    try:
        return max(1, int(os.environ.get("OPMEANS_THREADS", "1")))
    except ValueError:
        return 1


def run_property(name: str, trials: int, seed: int = 0, ctx: Context | None = None, max_witnesses: int = 5) -> dict:
    prop = REGISTRY[name]
    ctx = ctx or Context(tuple(DEFAULTS["dims"]), tuple(DEFAULTS["atoms"]), tuple(DEFAULTS["eps"]))
    n = threads()
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            results = list(pool.map(lambda t: run_trial(prop, seed, t, ctx), range(trials)))
    else:
        results = [run_trial(prop, seed, t, ctx) for t in range(trials)]
    results.sort(key=lambda r: r["trial"])
    bad = [r for r in results if not r["passed"]]
    margins = [r["margin"] for r in results if r["margin"] is not None]
    entry = {
        "property": name,
        "statement": prop.statement,
        "trials": trials,
        "failures": 0 if prop.exploratory else len(bad),
        "worst_margin": min(margins) if margins else None,
        "witnesses": [{k: v for k, v in r.items() if k != "passed"} for r in bad[:max_witnesses]],
    }
    if prop.exploratory:
        entry["exploratory"] = True
        entry["counterexamples"] = len(bad)
    return entry


def run_suite(config: dict | None = None) -> dict:
    """Run the configured properties and return the aggregate report.

    ``config`` keys (all optional): ``seed``, ``trials``, ``properties``
    (list of names; ``None`` for all, ``[]`` for none), ``dims``, ``atoms``
    (inclusive ``[min, max]``), ``eps``, ``max_witnesses`` and
    ``trials_per_property``.
    """
    cfg = {**DEFAULTS, **(config or {})}
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise ValueError(f"unknown suite config keys {sorted(unknown)}")
    names = list(REGISTRY) if cfg["properties"] is None else list(cfg["properties"])
    missing = [n for n in names if n not in REGISTRY]
    if missing:
        raise ValueError(f"unknown properties {missing}")
    ctx = Context(tuple(cfg["dims"]), tuple(cfg["atoms"]), tuple(cfg["eps"]))
    entries = []
    for name in names:
        trials = int(cfg["trials_per_property"].get(name, cfg["trials"]))
        entries.append(run_property(name, trials, int(cfg["seed"]), ctx, int(cfg["max_witnesses"])))
    return {
        "seed": int(cfg["seed"]),
        "config": _jsonable({k: cfg[k] for k in ("trials", "dims", "atoms", "eps", "trials_per_property")}),
        "properties": entries,
        "total_failures": sum(e["failures"] for e in entries),
    }


def report_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=False)
