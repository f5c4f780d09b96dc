"""Operator means of finitely supported measures on positive definite matrices."""
from .errors import OpMeansError
from .hpd import HPDMatrix, as_hpd, loewner_leq, relative_eigs, thompson_distance
from .kubo_ando import RepresentingMean, arith, geom, harm, power_modify
from .measure import DiscreteMeasure
from .means import SolverConfig, arithmetic_mean, harmonic_mean, karcher_mean, log_euclidean_mean, power_mean
from .order import delta_T, stochastic_leq
from .recipe import adjoint, compose, deform, eval_recipe, evaluator, parse_recipe
from .transport import wasserstein_inf, wasserstein_p

__all__ = [
    "OpMeansError",
    "HPDMatrix",
    "as_hpd",
    "loewner_leq",
    "relative_eigs",
    "thompson_distance",
    "RepresentingMean",
    "arith",
    "geom",
    "harm",
    "power_modify",
    "DiscreteMeasure",
    "SolverConfig",
    "arithmetic_mean",
    "harmonic_mean",
    "karcher_mean",
    "log_euclidean_mean",
    "power_mean",
    "delta_T",
    "stochastic_leq",
    "adjoint",
    "compose",
    "deform",
    "eval_recipe",
    "evaluator",
    "parse_recipe",
    "wasserstein_inf",
    "wasserstein_p",
]
