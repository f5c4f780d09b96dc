"""Two-variable operator means given by their representing functions.

A mean ``sigma`` acts on positive definite ``A, B`` as
``A sigma B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` where ``f`` is
operator monotone on ``(0, inf)`` with ``f(1) = 1``.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hpd
from .errors import DimensionMismatch, DomainError, ParamOutOfRange

ScalarFn = Callable[[np.ndarray], np.ndarray]

GRID = np.logspace(-4, 4, 41)
POWERS = (1.5, 2.0, 4.0)


@dataclass(frozen=True)
class RepresentingMean:
    """A Kubo-Ando mean. ``kind``/``param`` identify built-ins exactly."""

    name: str
    f: ScalarFn = field(repr=False, compare=False)
    alpha: float
    kind: str = "custom"
    param: float | None = None
    base: "RepresentingMean | None" = field(default=None, repr=False, compare=False)

    @property
    def is_left_trivial(self) -> bool:
        return self.alpha == 0.0

    @property
    def is_right_trivial(self) -> bool:
        return self.kind == "right"

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def __str__(self):
        return self.name


def _fmt(t: float) -> str:
    return repr(float(t))


def _arith(t):
    return lambda x: (1.0 - t) + t * x


def _harm(t):
    return lambda x: x / ((1.0 - t) * x + t)


def _geom(t):
    return lambda x: np.power(x, t)


def builtin(kind: str, t: float | None = None) -> RepresentingMean:
    """Built-in means: ``left``, ``right``, ``arith``, ``harm``, ``geom``.

    Weighted means with ``t = 0`` collapse to the left trivial mean and
    ``t = 1`` to the right trivial mean.
    """
    if kind == "left":
        return RepresentingMean("left", lambda x: np.ones_like(x), 0.0, "left")
    if kind == "right":
        return RepresentingMean("right", lambda x: x, 1.0, "right")
    if kind not in ("arith", "harm", "geom"):
        raise ValueError(f"unknown built-in mean {kind!r}")
    if t is None or not 0.0 <= t <= 1.0 or math.isnan(t):
        raise ParamOutOfRange(f"weight {t!r} outside [0, 1]")
    t = float(t)
    if t == 0.0:
        return builtin("left")
    if t == 1.0:
        return builtin("right")
    f = {"arith": _arith, "harm": _harm, "geom": _geom}[kind](t)
    return RepresentingMean(f"{kind}({_fmt(t)})", f, t, kind, t)


def arith(t: float = 0.5) -> RepresentingMean:
    return builtin("arith", t)


def harm(t: float = 0.5) -> RepresentingMean:
    return builtin("harm", t)


def geom(t: float = 0.5) -> RepresentingMean:
    return builtin("geom", t)


LEFT = builtin("left")
RIGHT = builtin("right")


def adjoint(sigma: RepresentingMean) -> RepresentingMean:
    """``A sigma* B = (A^{-1} sigma B^{-1})^{-1}``; ``f*(x) = 1/f(1/x)``."""
    if sigma.kind in ("left", "right", "geom"):
        return sigma
    if sigma.kind == "arith":
        return harm(sigma.param)
    if sigma.kind == "harm":
        return arith(sigma.param)
    if sigma.kind == "adjoint":
        return sigma.base
    f = sigma.f
    return RepresentingMean(f"adjoint({sigma.name})", lambda x: 1.0 / f(1.0 / x), sigma.alpha, "adjoint", base=sigma)


def transpose(sigma: RepresentingMean) -> RepresentingMean:
    """``A sigma' B = B sigma A``; ``f'(x) = x f(1/x)``."""
    if sigma.kind == "left":
        return RIGHT
    if sigma.kind == "right":
        return LEFT
    if sigma.kind in ("arith", "harm", "geom"):
        return builtin(sigma.kind, 1.0 - sigma.param)
    if sigma.kind == "transpose":
        return sigma.base
    f = sigma.f
    return RepresentingMean(f"transpose({sigma.name})", lambda x: x * f(1.0 / x), 1.0 - sigma.alpha, "transpose", base=sigma)


def power_modify(sigma: RepresentingMean, r: float) -> RepresentingMean:
    """The mean with representing function ``x -> f(x^r)``, ``0 < r <= 1``."""
    if not 0.0 < r <= 1.0:
        raise ParamOutOfRange(f"power {r!r} outside (0, 1]")
    if r == 1.0 or sigma.kind in ("left",):
        return sigma
    if sigma.kind == "right":
        return geom(r)
    if sigma.kind == "geom":
        return geom(sigma.param * r)
    f = sigma.f
    return RepresentingMean(f"pow({sigma.name}, {_fmt(r)})", lambda x: f(np.power(x, r)), sigma.alpha * r, "pow", r, sigma)


def apply(sigma: RepresentingMean, a, b) -> np.ndarray:
    """``A sigma B``; either argument may be a stack of matrices."""
    a, b = hpd._as_array(a), hpd._as_array(b)
    if a.shape[-2:] != b.shape[-2:]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    if sigma.kind == "left":
        return np.broadcast_to(a, np.broadcast_shapes(a.shape, b.shape)).copy()
    if sigma.kind == "right":
        return np.broadcast_to(b, np.broadcast_shapes(a.shape, b.shape)).copy()
    if sigma.kind == "arith":
        t = sigma.param
        return hpd.symmetrize((1.0 - t) * a + t * b)
    if sigma.kind == "harm":
        t = sigma.param
        return hpd.matrix_inv((1.0 - t) * hpd.matrix_inv(a) + t * hpd.matrix_inv(b))
    sa, isa = hpd.sqrt_and_invsqrt(a)
    inner = hpd.congruence(isa, b)
    return hpd.congruence(sa, hpd.fn_calculus(inner, sigma.f))


def apply_scalar(sigma: RepresentingMean, a, b) -> np.ndarray:
    """``a sigma b = a f(b/a)`` for positive scalars (elementwise)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a * sigma.f(b / a)


# --- custom representing functions -------------------------------------

_ALLOWED_CALLS = {"log": np.log, "exp": np.exp, "pow": np.power, "sqrt": np.sqrt}


def _compile_expr(expr: str) -> ScalarFn:
    tree = ast.parse(expr, mode="eval")

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            v = float(node.value)
            return lambda x: np.full_like(x, v)
        if isinstance(node, ast.Name) and node.id == "x":
            return lambda x: x
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return (lambda x: -inner(x)) if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp):
            lhs, rhs = build(node.left), build(node.right)
            ops = {
                ast.Add: np.add,
                ast.Sub: np.subtract,
                ast.Mult: np.multiply,
                ast.Div: np.divide,
                ast.Pow: np.power,
            }
            op = ops.get(type(node.op))
            if op is None:
                raise DomainError(f"operator {type(node.op).__name__} not allowed")
            return lambda x: op(lhs(x), rhs(x))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_CALLS:
            fn = _ALLOWED_CALLS[node.func.id]
            args = [build(a) for a in node.args]
            return lambda x: fn(*(g(x) for g in args))
        raise DomainError(f"unsupported expression element: {ast.dump(node)}")

    return build(tree)


def custom(expr: str, name: str | None = None) -> RepresentingMean:
    """Mean from a symbolic representing function of ``x``.

    Only the grid proxies are enforced: ``f(1) = 1``, positivity and
    monotonicity on ``GRID``, and ``0 <= f'(1) <= 1``. Operator
    monotonicity itself cannot be verified numerically.
    """
    fn = _compile_expr(expr)

    def f(x):
        return fn(np.asarray(x, dtype=float))

    one = float(f(np.array([1.0]))[0])
    if abs(one - 1.0) > 1e-12:
        raise DomainError(f"f(1) = {one!r}, expected 1")
    vals = f(GRID)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise DomainError("f must be finite and positive on the grid")
    if np.any(np.diff(vals) < -1e-12 * np.abs(vals[1:])):
        raise DomainError("f is not non-decreasing on the grid")
    h = 1e-6
    alpha = float((f(np.array([1 + h]))[0] - f(np.array([1 - h]))[0]) / (2 * h))
    if alpha < -1e-9 or alpha > 1 + 1e-9:
        raise DomainError(f"f'(1) = {alpha!r} outside [0, 1]")
    alpha = min(max(alpha, 0.0), 1.0)
    if alpha < 1e-9 and np.allclose(vals, 1.0):
        return LEFT
    return RepresentingMean(name or f"custom({expr})", f, alpha, "custom")


# --- classification ----------------------------------------------------


@dataclass
class Classification:
    pmi: bool
    pmd: bool
    gcv: bool
    gcc: bool
    witnesses: dict = field(default_factory=dict)


def classify(sigma: RepresentingMean, grid=None, powers=POWERS, rel_slack: float = 1e-10) -> Classification:
    """Grid test of power monotonicity and geometric convexity/concavity."""
    x = GRID if grid is None else np.asarray(grid, dtype=float)
    if x.size == 0 or len(powers) == 0:
        raise ValueError("grids must be non-empty")
    fx = sigma(x)
    witnesses: dict = {}

    pmi = pmd = True
    for r in powers:
        lhs = sigma(np.power(x, r))
        rhs = np.power(fx, r)
        tol = rel_slack * np.maximum(np.abs(lhs), np.abs(rhs))
        bad_i = np.nonzero(lhs < rhs - tol)[0]
        bad_d = np.nonzero(lhs > rhs + tol)[0]
        if pmi and bad_i.size:
            pmi = False
            witnesses["pmi"] = {"x": float(x[bad_i[0]]), "r": float(r)}
        if pmd and bad_d.size:
            pmd = False
            witnesses["pmd"] = {"x": float(x[bad_d[0]]), "r": float(r)}

    xx, yy = np.meshgrid(x, x, indexing="ij")
    mid = sigma(np.sqrt(xx * yy))
    gm = np.sqrt(fx[:, None] * fx[None, :])
    tol = rel_slack * np.maximum(mid, gm)
    bad_v = np.argwhere(mid > gm + tol)
    bad_c = np.argwhere(mid < gm - tol)
    gcv, gcc = bad_v.size == 0, bad_c.size == 0
    if not gcv:
        i, j = bad_v[0]
        witnesses["gcv"] = {"x": float(x[i]), "y": float(x[j])}
    if not gcc:
        i, j = bad_c[0]
        witnesses["gcc"] = {"x": float(x[i]), "y": float(x[j])}
    return Classification(pmi, pmd, gcv, gcc, witnesses)
