"""Finitely supported probability measures on the positive definite cone.

Weights are exact rationals so that coupling and flow computations are
free of tolerance questions; atoms are float matrices stored as a stack
of shape ``(n, N, N)``. Push-forwards never merge coinciding atoms.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import hpd, kubo_ando
from .errors import DimensionMismatch, EmptyInput, ParamOutOfRange
from .hpd import SigmaEpsilonBound


def to_fraction(w) -> Fraction:
    if isinstance(w, Fraction):
        return w
    if isinstance(w, (int, np.integer)):
        return Fraction(int(w))
    if isinstance(w, str):
        return Fraction(w.strip())
    return Fraction(float(w)).limit_denominator(10**12)


class DiscreteMeasure:
    """``sum_i w_i delta_{A_i}`` with rational ``w_i > 0`` summing to 1."""

    __slots__ = ("atoms", "weights", "w", "__weakref__")

    def __init__(self, atoms, weights: Sequence | None = None, validate: bool = True):
        if isinstance(atoms, np.ndarray):
            arr = np.array(atoms, dtype=float)
            if arr.ndim == 2:
                arr = arr[None]
        else:
            atoms = list(atoms)
            if not atoms:
                raise EmptyInput("a measure needs at least one atom")
            arr = hpd.stack(atoms)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] == 0:
            raise DimensionMismatch(f"atoms must form a non-empty (n, N, N) stack, got {arr.shape}")
        n = arr.shape[0]
        if weights is None:
            fw = tuple(Fraction(1, n) for _ in range(n))
        else:
            fw = tuple(to_fraction(x) for x in weights)
        if len(fw) != n:
            raise DimensionMismatch(f"{n} atoms but {len(fw)} weights")
        if validate:
            if any(x <= 0 for x in fw):
                raise ParamOutOfRange("weights must be positive")
            if sum(fw) != 1:
                raise ParamOutOfRange(f"weights sum to {sum(fw)}, not 1")
            hpd.check_symmetric(arr)
            arr = hpd.symmetrize(arr)
            lam = np.linalg.eigvalsh(arr)[:, 0]
            if np.any(lam <= hpd.DEFAULT_TOL.pd_floor):
                from .errors import NotPositiveDefinite

                raise NotPositiveDefinite(f"atom with smallest eigenvalue {float(lam.min()):.3e}")
        arr.setflags(write=False)
        self.atoms = arr
        self.weights = fw
        self.w = np.array([float(x) for x in fw])

    @classmethod
    def _trusted(cls, atoms: np.ndarray, weights: tuple, w: np.ndarray | None = None) -> "DiscreteMeasure":
        out = cls.__new__(cls)
        atoms = np.asarray(atoms, dtype=float)
        atoms.setflags(write=False)
        out.atoms = atoms
        out.weights = weights
        out.w = np.array([float(x) for x in weights]) if w is None else w
        return out

    @property
    def dim(self) -> int:
        return self.atoms.shape[-1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(zip(self.weights, self.atoms))

    def __repr__(self):
        ws = ", ".join(str(x) for x in self.weights)
        return f"DiscreteMeasure(dim={self.dim}, weights=[{ws}])"

    def sigma_epsilon(self) -> SigmaEpsilonBound:
        return hpd.sigma_epsilon_of(self.atoms)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "DiscreteMeasure":
        """Push-forward by a map acting on the whole atom stack."""
        return DiscreteMeasure._trusted(np.asarray(fn(self.atoms), dtype=float), self.weights, self.w)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """``sum_i w_i values[i]`` for per-atom values."""
        return np.tensordot(self.w, np.asarray(values, dtype=float), axes=(0, 0))

    def allclose(self, other: "DiscreteMeasure", atol: float = 1e-10) -> bool:
        """Atomwise comparison (same order, same weights)."""
        return (
            self.weights == other.weights
            and self.atoms.shape == other.atoms.shape
            and bool(np.allclose(self.atoms, other.atoms, atol=atol, rtol=0))
        )

    # --- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [
                {"weight": f"{x.numerator}/{x.denominator}", "matrix": a.tolist()}
                for x, a in zip(self.weights, self.atoms)
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "DiscreteMeasure":
        atoms = obj["atoms"]
        mats = [np.asarray(a["matrix"], dtype=float) for a in atoms]
        m = cls(mats, [a["weight"] for a in atoms])
        if "dim" in obj and int(obj["dim"]) != m.dim:
            raise DimensionMismatch(f"declared dim {obj['dim']} but atoms have dim {m.dim}")
        return m

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(text))


def point_mass(a) -> DiscreteMeasure:
    return DiscreteMeasure([hpd._as_array(a)], [1])


def uniform(atoms) -> DiscreteMeasure:
    return DiscreteMeasure(atoms)


def mixture(weights: Sequence, measures: Sequence[DiscreteMeasure]) -> DiscreteMeasure:
    """``sum_j w_j mu_j`` (atoms concatenated)."""
    ws = [to_fraction(x) for x in weights]
    if len(ws) != len(measures) or not measures:
        raise DimensionMismatch("weights and measures differ in length")
    atoms = np.concatenate([m.atoms for m in measures])
    fw = tuple(wj * x for wj, m in zip(ws, measures) for x in m.weights)
    return DiscreteMeasure(atoms, fw)


# --- push-forward transforms ------------------------------------------


def pushforward(mu: DiscreteMeasure, fn: Callable[[np.ndarray], np.ndarray]) -> DiscreteMeasure:
    return mu.map(fn)


def scale(mu: DiscreteMeasure, alpha: float) -> DiscreteMeasure:
    if not alpha > 0:
        raise ParamOutOfRange("scale factor must be positive")
    return mu.map(lambda a: alpha * a)


def congruence(mu: DiscreteMeasure, s) -> DiscreteMeasure:
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != mu.dim:
        raise DimensionMismatch(f"congruence of shape {s.shape} on dim {mu.dim}")
    if s.shape[0] == s.shape[1] and abs(np.linalg.det(s)) < 1e-300:
        raise ParamOutOfRange("congruence matrix must be invertible")
    return mu.map(lambda a: hpd.congruence(s, a))


def inverse(mu: DiscreteMeasure) -> DiscreteMeasure:
    return mu.map(hpd.matrix_inv)


def power(mu: DiscreteMeasure, r: float) -> DiscreteMeasure:
    return mu.map(lambda a: hpd.matrix_power(a, r))


def sigma_left(mu: DiscreteMeasure, x, sigma: kubo_ando.RepresentingMean) -> DiscreteMeasure:
    """Push-forward by ``A -> X sigma A``."""
    return mu.map(lambda a: kubo_ando.apply(sigma, x, a))


def eigenvalues(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Push-forward by ``A -> diag(lambda(A))`` with decreasing eigenvalues."""
    return mu.map(lambda a: hpd.diag_of(hpd.eigvals_desc(a)))


def det_root(mu: DiscreteMeasure) -> DiscreteMeasure:
    return mu.map(lambda a: np.asarray(hpd.det_root(a)).reshape(-1, 1, 1))


def norm(mu: DiscreteMeasure, norm_fn: Callable[[np.ndarray], float]) -> DiscreteMeasure:
    return mu.map(lambda a: np.array([norm_fn(x) for x in a]).reshape(-1, 1, 1))


def positive_map(mu: DiscreteMeasure, phi: Callable[[np.ndarray], np.ndarray]) -> DiscreteMeasure:
    return mu.map(phi)


def direct_sum(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Push-forward of ``mu x nu`` by ``(A, B) -> A (+) B``."""
    i, j = np.meshgrid(np.arange(mu.size), np.arange(nu.size), indexing="ij")
    atoms = hpd.block_diag(mu.atoms[i.ravel()], nu.atoms[j.ravel()])
    fw = tuple(mu.weights[a] * nu.weights[b] for a, b in zip(i.ravel(), j.ravel()))
    return DiscreteMeasure._trusted(atoms, fw)


def mix(mu: DiscreteMeasure, nu: DiscreteMeasure, t: float) -> DiscreteMeasure:
    """Push-forward of ``mu x nu`` by ``(A, B) -> (1-t) A + t B``."""
    if mu.dim != nu.dim:
        raise DimensionMismatch("measures differ in dimension")
    i, j = np.meshgrid(np.arange(mu.size), np.arange(nu.size), indexing="ij")
    atoms = (1 - t) * mu.atoms[i.ravel()] + t * nu.atoms[j.ravel()]
    fw = tuple(mu.weights[a] * nu.weights[b] for a, b in zip(i.ravel(), j.ravel()))
    return DiscreteMeasure._trusted(atoms, fw)


def load(path) -> DiscreteMeasure:
    with open(path) as fh:
        return DiscreteMeasure.from_dict(json.load(fh))
