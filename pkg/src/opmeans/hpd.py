"""Dense symmetric positive definite matrix arithmetic.

Every function accepts a single ``(N, N)`` array or a stack ``(..., N, N)``
and returns arrays of matching shape. ``HPDMatrix`` is the validated
container used at API boundaries; it caches its spectral decomposition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyInput,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
)


@dataclass(frozen=True)
class Tolerances:
    sym_tol: float = 1e-10
    pd_floor: float = 1e-12
    eig_tol: float = 1e-10
    eps_cap: float = 0.999


DEFAULT_TOL = Tolerances()


def _as_array(a) -> np.ndarray:
    if type(a) is np.ndarray and a.dtype == np.float64:
        return a
    if isinstance(a, HPDMatrix):
        return a.data
    return np.asarray(a, dtype=float)


def symmetrize(a) -> np.ndarray:
    a = _as_array(a)
    return 0.5 * (a + a.swapaxes(-1, -2))


def check_symmetric(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = _as_array(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    asym = float(np.max(np.abs(a - np.swapaxes(a, -1, -2)))) if a.size else 0.0
    if asym > tol.sym_tol * scale:
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds tolerance")
    return a


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for a single real symmetric matrix.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||a||_F``. Returns ``(eigenvalues, eigenvectors)`` unsorted,
    with eigenvectors in the columns.
    """
    a = np.array(_as_array(a), dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def eig_sym(a, tol: Tolerances = DEFAULT_TOL, method: str = "lapack"):
    """Eigen-decomposition with eigenvalues in descending order.

    ``method="jacobi"`` runs the cyclic Jacobi solver (single matrix only).
    """
    a = check_symmetric(a, tol)
    a = symmetrize(a)
    if method == "jacobi":
        if a.ndim != 2:
            raise DimensionMismatch("jacobi method handles one matrix at a time")
        w, v = jacobi_eigh(a)
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def eigvals_desc(a) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(a))[..., ::-1]


def _reassemble(w, v) -> np.ndarray:
    out = (v * w[..., None, :]) @ np.swapaxes(v, -1, -2)
    return symmetrize(out)


def fn_calculus(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function through the spectral decomposition."""
    w, v = np.linalg.eigh(symmetrize(a))
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError("function undefined on part of the spectrum")
    return _reassemble(fw, v)


def _positive_spectrum(a, tol: Tolerances = DEFAULT_TOL):
    w, v = np.linalg.eigh(symmetrize(a))
    if np.any(w <= tol.pd_floor):
        raise NotPositiveDefinite(f"smallest eigenvalue {float(np.min(w)):.3e}")
    return w, v


def matrix_power(a, r: float) -> np.ndarray:
    if r == 1:
        return symmetrize(a)
    w, v = _positive_spectrum(a)
    return _reassemble(w**r, v)


def matrix_sqrt(a) -> np.ndarray:
    w, v = _positive_spectrum(a)
    return _reassemble(np.sqrt(w), v)


def matrix_inv(a) -> np.ndarray:
    w, v = _positive_spectrum(a)
    return _reassemble(1.0 / w, v)


def matrix_log(a) -> np.ndarray:
    w, v = _positive_spectrum(a)
    return _reassemble(np.log(w), v)


def matrix_exp(s) -> np.ndarray:
    w, v = np.linalg.eigh(symmetrize(s))
    return _reassemble(np.exp(w), v)


def sqrt_and_invsqrt(a):
    w, v = _positive_spectrum(a)
    r = np.sqrt(w)
    return _reassemble(r, v), _reassemble(1.0 / r, v)


def congruence(s, a) -> np.ndarray:
    """``S A S^T`` with broadcasting over stacks."""
    s = _as_array(s)
    return symmetrize(s @ _as_array(a) @ np.swapaxes(s, -1, -2))


def lambda_min(a) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(a))[..., 0]


def lambda_max(a) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(a))[..., -1]


def loewner_leq(a, b, slack: float = 1e-10) -> bool:
    """``A <= B`` in Loewner order, i.e. ``lambda_min(B - A) >= -slack``."""
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    if slack < 0:
        raise ValueError("slack must be non-negative")
    return bool(np.all(lambda_min(b - a) >= -slack))


def loewner_margin(a, b) -> float:
    """``lambda_min(B - A)``: non-negative iff ``A <= B``."""
    return float(np.min(lambda_min(_as_array(b) - _as_array(a))))


def relative_eigs(a, b) -> np.ndarray:
    """Eigenvalues of ``A^{-1/2} B A^{-1/2}`` (ascending), via Cholesky."""
    a, b = symmetrize(a), symmetrize(b)
    if a.shape[-2:] != b.shape[-2:]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    linv = np.linalg.inv(chol)
    c = linv @ b @ np.swapaxes(linv, -1, -2)
    return np.linalg.eigvalsh(symmetrize(c))


def thompson_distance(a, b) -> np.ndarray | float:
    """``max |log eta|`` over the eigenvalues of ``A^{-1/2} B A^{-1/2}``."""
    eta = relative_eigs(a, b)
    if np.any(eta <= 0):
        raise NotPositiveDefinite("second argument is not positive definite")
    d = np.max(np.abs(np.log(eta)), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def sup_ratio(a, b) -> float:
    """``M(A/B) = inf{alpha > 0 : A <= alpha B}`` computed spectrally."""
    return float(np.max(relative_eigs(b, a)))


@dataclass(frozen=True)
class SigmaEpsilonBound:
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")

    def contains(self, a, slack: float = 1e-12) -> bool:
        w = eigvals_desc(_as_array(a))
        return bool(np.all(w >= self.epsilon * (1 - slack)) and np.all(w <= (1 + slack) / self.epsilon))


def sigma_epsilon_of(matrices, tol: Tolerances = DEFAULT_TOL) -> SigmaEpsilonBound:
    """Largest ``eps`` with ``eps I <= A <= I/eps`` for every input."""
    if isinstance(matrices, np.ndarray) and matrices.ndim == 2:
        matrices = matrices[None]
    arrs = [_as_array(m) for m in matrices] if not isinstance(matrices, np.ndarray) else [matrices]
    if not arrs or all(np.size(m) == 0 for m in arrs):
        raise EmptyInput("sigma_epsilon_of needs at least one matrix")
    eps = np.inf
    for m in arrs:
        w = np.linalg.eigvalsh(symmetrize(m))
        eps = min(eps, float(np.min(w)), float(np.min(1.0 / w[..., -1])))
    if eps <= 0:
        raise NotPositiveDefinite("input is not positive definite")
    return SigmaEpsilonBound(min(eps, tol.eps_cap))


@dataclass(frozen=True)
class HPDMatrix:
    """Validated symmetric positive definite matrix with a cached spectrum."""

    data: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        arr = check_symmetric(np.array(self.data, dtype=float), self.tol)
        if arr.ndim != 2:
            raise DimensionMismatch("HPDMatrix holds a single matrix")
        arr = symmetrize(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.eigenvalues[-1] <= self.tol.pd_floor:
            raise NotPositiveDefinite(f"smallest eigenvalue {self.eigenvalues[-1]:.3e}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @cached_property
    def spectrum(self):
        w, v = eig_sym(self.data, self.tol)
        w.setflags(write=False)
        v.setflags(write=False)
        return w, v

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum[1]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, HPDMatrix):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash(self.data.tobytes())


def as_hpd(a) -> HPDMatrix:
    return a if isinstance(a, HPDMatrix) else HPDMatrix(a)


def block_diag(a, b) -> np.ndarray:
    """Direct sum ``A (+) B`` of two matrices or two equally long stacks."""
    a, b = _as_array(a), _as_array(b)
    lead = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    n1, n2 = a.shape[-1], b.shape[-1]
    out = np.zeros(lead + (n1 + n2, n1 + n2))
    out[..., :n1, :n1] = a
    out[..., n1:, n1:] = b
    return out


def stack(matrices: Iterable) -> np.ndarray:
    arrs = [_as_array(m) for m in matrices]
    if not arrs:
        raise EmptyInput("no matrices given")
    shapes = {m.shape for m in arrs}
    if len(shapes) != 1:
        raise DimensionMismatch(f"mixed shapes {sorted(shapes)}")
    return np.stack(arrs)


def det_root(a) -> np.ndarray | float:
    """``det(A)^{1/N}`` computed from log-eigenvalues."""
    w = np.linalg.eigvalsh(symmetrize(a))
    d = np.exp(np.mean(np.log(w), axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def diag_of(vectors: Sequence[float] | np.ndarray) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    out = np.zeros(v.shape + (v.shape[-1],))
    idx = np.arange(v.shape[-1])
    out[..., idx, idx] = v
    return out
