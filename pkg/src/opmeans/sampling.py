"""Seeded random instances for property checks."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import kubo_ando
from .measure import DiscreteMeasure


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar orthogonal matrix via QR of a Gaussian matrix with sign fix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def random_spd(rng: np.random.Generator, dim: int, eps: float = 0.1) -> np.ndarray:
    """``Q diag(d) Q^T`` with ``log d`` uniform on ``[log eps, -log eps]``."""
    q = random_orthogonal(rng, dim)
    d = np.exp(rng.uniform(np.log(eps), -np.log(eps), dim))
    return (q * d) @ q.T


def random_invertible(rng: np.random.Generator, dim: int, cond: float = 10.0) -> np.ndarray:
    u, v = random_orthogonal(rng, dim), random_orthogonal(rng, dim)
    s = np.exp(rng.uniform(-0.5, 0.5, dim) * np.log(cond))
    return (u * s) @ v.T


def random_weights(rng: np.random.Generator, n: int, uniform: bool = False) -> list[Fraction]:
    if uniform:
        return [Fraction(1, n)] * n
    k = [int(x) for x in rng.integers(1, 6, n)]
    total = sum(k)
    return [Fraction(x, total) for x in k]


def random_measure(
    rng: np.random.Generator,
    dim: int,
    n_atoms: int,
    eps: float = 0.1,
    uniform: bool = False,
) -> DiscreteMeasure:
    atoms = np.stack([random_spd(rng, dim, eps) for _ in range(n_atoms)])
    return DiscreteMeasure(atoms, random_weights(rng, n_atoms, uniform))


def random_psd_increment(rng: np.random.Generator, dim: int, scale: float) -> np.ndarray:
    rank = int(rng.integers(1, dim + 1))
    g = rng.standard_normal((dim, rank))
    return scale * (g @ g.T) / rank


def dominating_measure(rng: np.random.Generator, mu: DiscreteMeasure, scale: float = 0.5) -> DiscreteMeasure:
    """A measure ``nu >= mu``: every atom is pushed up by a PSD matrix."""
    bumps = np.stack([random_psd_increment(rng, mu.dim, scale * float(np.linalg.norm(a, 2))) for a in mu.atoms])
    return DiscreteMeasure(mu.atoms + bumps, mu.weights)


def random_sigma(rng: np.random.Generator, low: float = 0.2, high: float = 0.9) -> kubo_ando.RepresentingMean:
    kind = ("arith", "harm", "geom")[int(rng.integers(3))]
    return kubo_ando.builtin(kind, round(float(rng.uniform(low, high)), 6))


def random_dim(rng: np.random.Generator, dims=(1, 2, 3, 4)) -> int:
    return int(dims[int(rng.integers(len(dims)))])
