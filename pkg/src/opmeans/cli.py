"""Command line entry point: ``opmeans {mean,distance,order,verify}``.

Results go to stdout (or ``--out``) as JSON. Errors go to stderr as JSON
with exit code 2 for solver non-convergence and 3 for bad input; ``verify``
exits with 1 when any property fails.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import means, order, recipe, suite, transport
from .errors import MonotoneViolation, NoConvergence, OpMeansError
from .measure import DiscreteMeasure

EXIT_OK, EXIT_FAILURES, EXIT_NO_CONVERGENCE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def matrix_json(x) -> dict:
    """``{"dim", "data"}``; floats are written in shortest round-trip form."""
    x = np.asarray(x, dtype=float)
    return {"dim": int(x.shape[0]), "data": x.tolist()}


def _load_measure(path) -> DiscreteMeasure:
    if path is None:
        raise InputError("a measure file is required")
    try:
        with open(path) as fh:
            return DiscreteMeasure.from_dict(json.load(fh))
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed measure file {path}: {exc}") from exc


def _solver_config(args) -> means.SolverConfig:
    try:
        return means.SolverConfig(iter_tol=args.tol_iter, residual_tol=args.tol_res, max_iter=args.max_iter)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(obj, out):
    text = json.dumps(suite._jsonable(obj), indent=2, allow_nan=False)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _residual(ev, x, mu) -> float:
    if ev.trace is not None and ev.trace.steps:
        return float(ev.trace.residual)
    return 0.0


def cmd_mean(args) -> int:
    mu = _load_measure(args.measure)
    if not args.recipe:
        raise InputError("--recipe is required")
    ev = recipe.evaluator(args.recipe, _solver_config(args))
    x = ev(mu)
    out = matrix_json(x)
    out.update(
        recipe=str(ev.recipe),
        seed=args.seed,
        residual=_residual(ev, x, mu),
        iterations=ev.trace.iterations if ev.trace else 0,
        status=ev.trace.status if ev.trace else "closed_form",
    )
    if ev.trace is not None:
        out["trace"] = ev.trace.to_dict()
    _emit(out, args.out)
    return EXIT_OK


def _parse_metric(text: str):
    if text == "thompson-delta":
        return "thompson-delta", None
    if text == "winf":
        return "winf", None
    if text.startswith("wp:"):
        try:
            p = float(text[3:])
        except ValueError as exc:
            raise InputError(f"bad exponent in {text!r}") from exc
        return "wp", p
    raise InputError(f"unknown metric {text!r}; use thompson-delta, wp:<p> or winf")


def cmd_distance(args) -> int:
    kind, p = _parse_metric(args.metric)
    mu, nu = _load_measure(args.measure), _load_measure(args.measure_b)
    if kind == "thompson-delta":
        value = order.delta_T(mu, nu)
    elif kind == "winf":
        value = transport.wasserstein_inf(mu, nu)
    else:
        value = transport.wasserstein_p(mu, nu, p)
    _emit({"metric": args.metric, "value": float(value), "seed": args.seed}, args.out)
    return EXIT_OK


def _verdict_json(v: order.OrderVerdict):
    if v.leq:
        return {"coupling": [[f"{x.numerator}/{x.denominator}" for x in row] for row in v.coupling.plan]}
    c = v.certificate
    return {
        "certificate": {
            "rows": list(c.rows),
            "cols": list(c.cols),
            "mass_rows": f"{c.mass_rows.numerator}/{c.mass_rows.denominator}",
            "mass_cols": f"{c.mass_cols.numerator}/{c.mass_cols.denominator}",
        }
    }


def cmd_order(args) -> int:
    mu, nu = _load_measure(args.measure), _load_measure(args.measure_b)
    leq, geq = order.stochastic_leq(mu, nu), order.stochastic_leq(nu, mu)
    _emit({"leq": leq.leq, "geq": geq.leq, "mu_nu": _verdict_json(leq), "nu_mu": _verdict_json(geq), "seed": args.seed}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = {}
    if args.suite:
        try:
            with open(args.suite) as fh:
                config = json.load(fh)
        except FileNotFoundError as exc:
            raise InputError(f"no such file: {args.suite}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed suite config: {exc}") from exc
    if args.seed is not None:
        config["seed"] = args.seed
    try:
        report = suite.run_suite(config)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    for e in report["properties"]:
        tag = "explore" if e.get("exploratory") else ("FAIL" if e["failures"] else "ok")
        print(f"{tag:7s} {e['property']:32s} {e['failures']:4d}/{e['trials']:<5d} {e['statement']}", file=sys.stderr)
    text = suite.report_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_FAILURES if report["total_failures"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opmeans", description="Operator means of discrete measures of positive definite matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, measures=1):
        p.add_argument("--measure", help="measure JSON file")
        if measures == 2:
            p.add_argument("--measure-b", help="second measure JSON file")
        p.add_argument("--seed", type=int, default=None, help="recorded in the output")
        p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("mean", help="evaluate a mean recipe on a measure")
    common(p)
    p.add_argument("--recipe", help='e.g. "P(0.5)" or "deform(A, geom(0.3))"')
    p.add_argument("--tol-iter", type=float, default=means.SolverConfig.iter_tol)
    p.add_argument("--tol-res", type=float, default=means.SolverConfig.residual_tol)
    p.add_argument("--max-iter", type=int, default=means.SolverConfig.max_iter)
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("distance", help="distance between two measures")
    common(p, 2)
    p.add_argument("--metric", default="thompson-delta", help="thompson-delta, wp:<p> or winf")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("order", help="decide the stochastic order both ways")
    common(p, 2)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("verify", help="run the randomized property suite")
    p.add_argument("--suite", help="suite config JSON file")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_verify)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (NoConvergence, MonotoneViolation) as exc:
        return _fail(EXIT_NO_CONVERGENCE, exc)
    except (InputError, OpMeansError, ValueError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())
