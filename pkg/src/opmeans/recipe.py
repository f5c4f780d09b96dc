"""Expression trees for derived means and their evaluation.

Grammar::

    recipe := A | H | G | LE | P(num)
            | deform(recipe, sigma)
            | compose(recipe; num: recipe, num: recipe, ...)
            | adjoint(recipe)
    sigma  := arith(num) | harm(num) | geom(num) | left | right
            | adjoint(sigma) | transpose(sigma) | pow(sigma, num)
    num    := [+-] digits[.digits][e[+-]digits] [/ digits]
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from . import hpd, kubo_ando, means
from .errors import ParamOutOfRange, ParseError, RecipeInvalid
from .kubo_ando import RepresentingMean
from .measure import DiscreteMeasure, inverse

MAX_DEPTH = 5


@dataclass(frozen=True)
class Leaf:
    kind: str  # "A", "H", "G", "LE" or "P"
    r: float | None = None

    def __str__(self):
        return f"P({self.r!r})" if self.kind == "P" else self.kind


@dataclass(frozen=True)
class Deform:
    base: "MeanRecipe"
    sigma: RepresentingMean

    def __str__(self):
        return f"deform({self.base}, {self.sigma.name})"


@dataclass(frozen=True)
class Compose:
    outer: "MeanRecipe"
    weights: tuple
    inner: tuple

    def __str__(self):
        items = ", ".join(f"{w}:{m}" for w, m in zip(self.weights, self.inner))
        return f"compose({self.outer}; {items})"


@dataclass(frozen=True)
class Adjoint:
    base: "MeanRecipe"

    def __str__(self):
        return f"adjoint({self.base})"


MeanRecipe = Union[Leaf, Deform, Compose, Adjoint]

A = Leaf("A")
H = Leaf("H")
G = Leaf("G")
LE = Leaf("LE")


def P(r: float) -> Leaf:
    r = float(r)
    if r == 0.0 or not -1.0 <= r <= 1.0:
        raise ParamOutOfRange(f"power {r!r} outside [-1, 1] without 0")
    return Leaf("P", r)


def deform(base: MeanRecipe, sigma: RepresentingMean) -> Deform:
    node = Deform(base, sigma)
    validate(node)
    return node


def compose(outer: MeanRecipe, weights, inner) -> Compose:
    node = Compose(outer, tuple(Fraction(w) if not isinstance(w, Fraction) else w for w in weights), tuple(inner))
    validate(node)
    return node


def adjoint(base: MeanRecipe) -> Adjoint:
    return Adjoint(base)


# --- class membership ----------------------------------------------------------


@dataclass(frozen=True)
class ClassTags:
    """Structural membership in the derived classes.

    ``plus``/``minus``: built from ``A, G`` (resp. ``H, G``) by
    deformations with geometrically convex (concave) ``sigma`` and
    compositions. ``zero_plus``/``zero_minus``: deformations only, with
    power monotone increasing (decreasing) ``sigma``. Adjoints swap the
    signs. Tags are sufficient conditions, not a complete decision.
    """

    derived: bool
    plus: bool
    minus: bool
    zero_plus: bool
    zero_minus: bool


@lru_cache(maxsize=256)
def _classify_cached(sigma: RepresentingMean):
    return kubo_ando.classify(sigma)


def class_tags(recipe: MeanRecipe) -> ClassTags:
    if isinstance(recipe, Leaf):
        if recipe.kind == "A":
            return ClassTags(True, True, False, True, False)
        if recipe.kind == "H":
            return ClassTags(True, False, True, False, True)
        if recipe.kind == "G":
            return ClassTags(True, True, True, True, True)
        if recipe.kind == "P":
            pos = recipe.r > 0
            return ClassTags(True, pos, not pos, pos, not pos)
        return ClassTags(False, False, False, False, False)
    if isinstance(recipe, Deform):
        b = class_tags(recipe.base)
        c = _classify_cached(recipe.sigma)
        return ClassTags(
            b.derived,
            b.plus and c.gcv,
            b.minus and c.gcc,
            b.zero_plus and c.pmi,
            b.zero_minus and c.pmd,
        )
    if isinstance(recipe, Compose):
        parts = [class_tags(recipe.outer)] + [class_tags(m) for m in recipe.inner]
        return ClassTags(
            all(p.derived for p in parts),
            all(p.plus for p in parts),
            all(p.minus for p in parts),
            False,
            False,
        )
    if isinstance(recipe, Adjoint):
        b = class_tags(recipe.base)
        return ClassTags(b.derived, b.minus, b.plus, b.zero_minus, b.zero_plus)
    raise RecipeInvalid(f"unknown node {recipe!r}")


def deform_depth(recipe: MeanRecipe) -> int:
    if isinstance(recipe, Leaf):
        return 0
    if isinstance(recipe, Deform):
        return 1 + deform_depth(recipe.base)
    if isinstance(recipe, Compose):
        return max(deform_depth(m) for m in (recipe.outer,) + recipe.inner)
    return deform_depth(recipe.base)


def validate(recipe: MeanRecipe) -> None:
    """Raise ``RecipeInvalid`` unless every node is well formed."""
    if isinstance(recipe, Leaf):
        if recipe.kind not in ("A", "H", "G", "LE", "P"):
            raise RecipeInvalid(f"unknown leaf {recipe.kind!r}")
        if recipe.kind == "P" and (recipe.r is None or recipe.r == 0 or not -1 <= recipe.r <= 1):
            raise RecipeInvalid(f"power {recipe.r!r} outside [-1, 1] without 0")
        return
    if isinstance(recipe, Deform):
        validate(recipe.base)
        if recipe.sigma.is_left_trivial:
            raise RecipeInvalid("cannot deform by the left trivial mean")
        if not class_tags(recipe.base).derived:
            raise RecipeInvalid(f"deformation base {recipe.base} is not a derived mean")
    elif isinstance(recipe, Compose):
        validate(recipe.outer)
        for m in recipe.inner:
            validate(m)
        if not recipe.inner or len(recipe.weights) != len(recipe.inner):
            raise RecipeInvalid("compose needs one weight per inner mean")
        if any(w <= 0 for w in recipe.weights) or sum(recipe.weights) != 1:
            raise RecipeInvalid("compose weights must be positive and sum to 1")
    elif isinstance(recipe, Adjoint):
        validate(recipe.base)
    else:
        raise RecipeInvalid(f"unknown node {recipe!r}")
    if deform_depth(recipe) > MAX_DEPTH:
        raise RecipeInvalid(f"deformation nesting deeper than {MAX_DEPTH}")


# --- parsing -------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?:\s*/\s*\d+)?)|(?P<name>[A-Za-z_]+)|(?P<punct>[(),;:]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r} at {tok[2]}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def done(self):
        if self.i != len(self.toks):
            tok = self.peek()
            raise ParseError(f"trailing input at {tok[2]}: {tok[1]!r}")

    def number(self) -> Fraction:
        tok = self.take("num")
        return Fraction(tok[1].replace(" ", ""))

    def sigma(self) -> RepresentingMean:
        name = self.take("name")[1]
        if name in ("left", "right"):
            return kubo_ando.builtin(name)
        self.take("punct", "(")
        if name in ("arith", "harm", "geom"):
            t = float(self.number())
            out = kubo_ando.builtin(name, t)
        elif name == "adjoint":
            out = kubo_ando.adjoint(self.sigma())
        elif name == "transpose":
            out = kubo_ando.transpose(self.sigma())
        elif name == "pow":
            base = self.sigma()
            self.take("punct", ",")
            out = kubo_ando.power_modify(base, float(self.number()))
        else:
            raise ParseError(f"unknown two-variable mean {name!r}")
        self.take("punct", ")")
        return out

    def recipe(self) -> MeanRecipe:
        name = self.take("name")[1]
        if name in ("A", "H", "G", "LE"):
            return Leaf(name)
        self.take("punct", "(")
        if name == "P":
            out = P(float(self.number()))
        elif name == "deform":
            base = self.recipe()
            self.take("punct", ",")
            out = Deform(base, self.sigma())
        elif name == "compose":
            outer = self.recipe()
            self.take("punct", ";")
            weights, inner = [], []
            while True:
                weights.append(self.number())
                self.take("punct", ":")
                inner.append(self.recipe())
                if self.peek()[1] != ",":
                    break
                self.take("punct", ",")
            out = Compose(outer, tuple(weights), tuple(inner))
        elif name == "adjoint":
            out = Adjoint(self.recipe())
        else:
            raise ParseError(f"unknown mean {name!r}")
        self.take("punct", ")")
        return out


def parse_sigma(text: str) -> RepresentingMean:
    p = _Parser(text)
    out = p.sigma()
    p.done()
    return out


def parse_recipe(text: str) -> MeanRecipe:
    """Parse and validate a recipe string."""
    p = _Parser(text)
    try:
        out = p.recipe()
    except ParamOutOfRange as exc:
        raise ParseError(str(exc)) from exc
    p.done()
    validate(out)
    return out


# --- evaluation ------------------------------------------------------------------------


class Evaluator:
    """Callable ``mu -> M(mu)`` that remembers its last result.

    Nested solves restart from the previous value, which is close to the
    next one when an outer fixed-point iteration is converging.
    """

    def __init__(self, recipe: MeanRecipe, cfg: means.SolverConfig | None = None, nested: bool = False):
        self.recipe = recipe
        self.cfg = cfg or means.SolverConfig()
        self.nested = nested
        self.last: np.ndarray | None = None
        self.trace: means.ConvergenceTrace | None = None
        inner_cfg = self.cfg.inner()
        if isinstance(recipe, Deform):
            self.children = [Evaluator(recipe.base, inner_cfg, True)]
        elif isinstance(recipe, Compose):
            self.children = [Evaluator(recipe.outer, inner_cfg, True)] + [
                Evaluator(m, inner_cfg, True) for m in recipe.inner
            ]
        elif isinstance(recipe, Adjoint):
            self.children = [Evaluator(recipe.base, self.cfg, nested)]
        else:
            self.children = []

    def _start_cfg(self, dim: int) -> means.SolverConfig:
        if self.last is not None and self.last.shape == (dim, dim):
            return self.cfg.with_start(means.Given(self.last))
        return self.cfg

    def __call__(self, mu: DiscreteMeasure) -> np.ndarray:
        r = self.recipe
        if isinstance(r, Leaf):
            if r.kind == "A":
                x = means.arithmetic_mean(mu)
            elif r.kind == "H":
                x = means.harmonic_mean(mu)
            elif r.kind == "LE":
                x = means.log_euclidean_mean(mu)
            elif r.kind == "G":
                x, self.trace = means.karcher_mean(mu, self._start_cfg(mu.dim))
            else:
                method = "exp" if self.nested else "auto"
                x, self.trace = means.power_mean(r.r, mu, self._start_cfg(mu.dim), method=method, full_output=True)
        elif isinstance(r, Deform):
            x, self.trace = means.deform_solve(self.children[0], r.sigma, mu, self._start_cfg(mu.dim))
        elif isinstance(r, Compose):
            vals = np.stack([c(mu) for c in self.children[1:]])
            x = self.children[0](DiscreteMeasure._trusted(vals, r.weights))
        else:
            x = hpd.matrix_inv(self.children[0](inverse(mu)))
        self.last = x
        return x


def evaluator(recipe: MeanRecipe | str, cfg: means.SolverConfig | None = None) -> Evaluator:
    if isinstance(recipe, str):
        recipe = parse_recipe(recipe)
    else:
        validate(recipe)
    return Evaluator(recipe, cfg)


def eval_recipe(recipe: MeanRecipe | str, mu: DiscreteMeasure, cfg: means.SolverConfig | None = None) -> np.ndarray:
    """Evaluate a recipe on a measure with fresh solver state."""
    return evaluator(recipe, cfg)(mu)


def eval_recipe_with_trace(recipe, mu, cfg=None):
    ev = evaluator(recipe, cfg)
    x = ev(mu)
    return x, ev.trace
