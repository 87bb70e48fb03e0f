"""Command-line front end.

Every subcommand prints one record: ``command``, ``parameters``, ``result``,
``diagnostics``, ``table`` (a list of rows, possibly empty) and ``version``.
JSON is the default; ``--csv`` prints the table (or the flattened result
when there is no table).  Exit status is 0 on success, 2 for usage errors
and invalid parameters, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import conformal, counterex, radial, ricci, symfun
from .cone import (Circular, ConeSpec, ExtremalLargest, ExtremalSmallest, GammaK, NegDualGammaK, OrderedLinear,
                   lambda_star_class)
from .numerics import NumericalError, ToleranceProfile, use_tolerances

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3

CONE_FAMILIES = ("gamma-k", "neg-dual-gamma-k", "ordered-linear", "circular", "extremal-largest",
                 "extremal-smallest")


class UsageError(ValueError):
    """Invalid combination of command-line parameters."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # one-line diagnostic, exit status 2
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def _plain(obj: Any) -> Any:
    """Convert results to JSON-ready values; non-finite floats become strings."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if is_dataclass(obj):
        return _plain(asdict(obj))
    return obj


_SPECIAL = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _restore(obj: Any) -> Any:
    if isinstance(obj, str) and obj in _SPECIAL:
        return _SPECIAL[obj]
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    return obj


def make_record(command: str, parameters: dict, result: dict, diagnostics: dict | None = None,
                table: list[dict] | None = None) -> dict:
    return _plain({"command": command, "parameters": parameters, "result": result,
                   "diagnostics": diagnostics or {}, "table": table or [], "version": __version__})


def dumps_record(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


def parse_record(text: str) -> dict:
    """Inverse of ``dumps_record`` (non-finite values come back as floats)."""
    return _restore(json.loads(text))


def _flatten(prefix: str, obj: Any, out: list[dict]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append({"key": prefix, "value": json.dumps(obj) if isinstance(obj, list) else obj})


def dumps_csv(record: dict) -> str:
    rows = record["table"]
    if not rows:
        rows = []
        _flatten("", record["result"], rows)
    buf = io.StringIO()
    fields = list(rows[0].keys()) if rows else ["key", "value"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in row.items()})
    return buf.getvalue()


def _cell(text: str) -> Any:
    if text in ("True", "False"):
        return text == "True"
    if text in _SPECIAL:
        return _SPECIAL[text]
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text.startswith(("[", "{")):
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            pass
    return text


def parse_csv(text: str) -> list[dict]:
    return [{k: _cell(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def build_cone(family: str, n: int, k: int | None = None, weights: str | None = None, c: float | None = None,
               mu: float | None = None) -> ConeSpec:
    def need(name, value):
        if value is None:
            raise UsageError(f"cone family {family} needs --{name}")
        return value

    if family == "gamma-k":
        return GammaK(n, need("k", k))
    if family == "neg-dual-gamma-k":
        return NegDualGammaK(n, need("k", k))
    if family == "ordered-linear":
        w = _floats(need("weights", weights))
        if len(w) != n:
            raise UsageError(f"--weights needs {n} entries")
        return OrderedLinear(n, w)
    if family == "circular":
        return Circular(n, need("c", c))
    if family == "extremal-largest":
        return ExtremalLargest(n, need("mu", mu))
    if family == "extremal-smallest":
        return ExtremalSmallest(n, need("mu", mu))
    raise UsageError(f"unknown cone family {family!r}; choose from {', '.join(CONE_FAMILIES)}")


def parse_cone_spec(text: str, n: int) -> ConeSpec:
    """Compact form: ``gamma-K``, ``neg-dual-gamma-K``, ``ordered-linear:w1,...,wn``,
    ``circular:c``, ``extremal-largest:mu``, ``extremal-smallest:mu``."""
    name, _, arg = text.partition(":")
    if name.startswith("neg-dual-gamma-") and name[len("neg-dual-gamma-"):].isdigit():
        return NegDualGammaK(n, int(name[len("neg-dual-gamma-"):]))
    if name.startswith("gamma-") and name[len("gamma-"):].isdigit():
        return GammaK(n, int(name[len("gamma-"):]))
    if not arg:
        raise UsageError(f"cannot parse cone {text!r}")
    if name == "ordered-linear":
        return build_cone(name, n, weights=arg)
    try:
        value = float(arg)
    except ValueError:
        raise UsageError(f"cannot parse cone parameter in {text!r}") from None
    if name == "circular":
        return Circular(n, value)
    if name in ("extremal-largest", "extremal-smallest"):
        return build_cone(name, n, mu=value)
    raise UsageError(f"cannot parse cone {text!r}")


def _add_cone_args(p: argparse.ArgumentParser, family_flags: Sequence[str] = ("--family",)) -> None:
    p.add_argument(*family_flags, dest="family", choices=CONE_FAMILIES, help="cone family")
    p.add_argument("--cone", help="compact cone form, e.g. gamma-2 or ordered-linear:2,1,1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--weights")
    p.add_argument("--c", type=float)
    p.add_argument("--mu", type=float)


def _cone_from_args(args) -> ConeSpec:
    if args.cone and args.family:
        raise UsageError("give either --cone or a family flag, not both")
    if args.cone:
        return parse_cone_spec(args.cone, args.n)
    if not args.family:
        raise UsageError("a cone is required (--cone or a family flag)")
    return build_cone(args.family, args.n, args.k, args.weights, args.c, args.mu)


def _cone_params(args) -> dict:
    keys = ("family", "cone", "n", "k", "weights", "c", "mu")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_cone_info(args) -> dict:
    cone = _cone_from_args(args)
    cls = lambda_star_class(cone)
    result = {
        "cone": cone.label, "mu_plus": cls.mu_plus, "mu_minus": cls.mu_minus,
        "lambda_star": cls.plus.position, "neg_lambda_star": cls.minus.position,
        "dual": cone.dual().label,
    }
    diag = {"closed_mu_plus": cone.closed_mu_plus(), "closed_mu_minus": cone.closed_mu_minus(),
            "lambda_star_margin": cls.plus.margin, "neg_lambda_star_margin": cls.minus.margin}
    return make_record("cone info", _cone_params(args), result, diag)


def cmd_radial_classify(args) -> dict:
    cone = _cone_from_args(args)
    cases = radial.enumerate_families(cone)
    table = [{"case": c.case, "family": c.family, "mu": c.mu if c.mu is not None else "", "constraint": c.constraint}
             for c in cases]
    return make_record("radial classify", _cone_params(args), {"cone": cone.label, "cases": len(cases)}, {}, table)


def cmd_radial_dirichlet(args) -> dict:
    cone = _cone_from_args(args)
    prob = radial.DirichletAnnulus(args.a, args.b, args.alpha, args.beta)
    rep = radial.solve_dirichlet(cone, prob)
    params = {**_cone_params(args), "a": args.a, "b": args.b, "alpha": args.alpha, "beta": args.beta,
              "samples": args.samples}
    result = {"solvable": rep.solvable, "regularity": rep.regularity, "clause": rep.clause,
              "mu_plus": rep.mu_plus, "mu_minus": rep.mu_minus,
              "profile": rep.profile.describe() if rep.profile else None}
    table, worst = [], 0.0
    if rep.profile is not None:
        kink = rep.profile.kink
        for r in np.linspace(args.a, args.b, args.samples):
            r = float(r)
            row = {"r": r, "v": rep.profile.v(r)}
            if kink is not None and abs(r - kink) <= 1e-12 * r:
                row["cone_boundary_residual"] = ""
            else:
                res = radial.boundary_residual(cone, rep.profile, r, args.n)
                worst = max(worst, res)
                row["cone_boundary_residual"] = res
            table.append(row)
    diag = {"boundary_value_residual": rep.boundary_residual, "max_cone_boundary_residual": worst,
            "predicate": radial.dirichlet_predicate(rep.mu_plus, rep.mu_minus, args.beta - args.alpha,
                                                    math.log(args.b / args.a))}
    return make_record("radial dirichlet", params, result, diag, table)


def cmd_ode_run(args) -> dict:
    setup = counterex.OdeSetup(args.gamma, args.v0, args.w0)
    traj = counterex.integrate_ode(setup, window=args.window, threshold=args.threshold)
    lo, hi = float(traj.times[0]), float(traj.times[-1])
    table = []
    for t in np.linspace(lo, hi, args.samples):
        t = float(min(max(t, lo), hi))
        v, w = traj.state(t)
        table.append({"t": t, "v": v, "w": w, "phi": math.exp(v),
                      "first_integral": counterex.first_integral(setup.delta, v, w)})
    params = {"gamma": args.gamma, "v0": args.v0, "w0": args.w0, "window": args.window,
              "threshold": args.threshold, "samples": args.samples}
    result = {"existence_predicate": counterex.existence_predicate(setup), "integration_verdict": traj.verdict,
              "forward": traj.forward, "backward": traj.backward, "delta": setup.delta}
    diag = {"first_integral_drift": traj.drift, "drift_tolerance": traj.drift_tolerance,
            "accepted_points": int(traj.times.size)}
    return make_record("ode run", params, result, diag, table)


def cmd_blowup(args) -> dict:
    fam = counterex.gradient_blowup(args.kind, args.n, args.j, samples=args.samples, seed=args.seed)
    table = [{"quantity": k, "value": v} for k, v in fam.report.values.items()]
    table += [{"quantity": f"check:{k}", "value": bool(v)} for k, v in fam.report.checks.items()]
    result = {"kind": fam.kind, "passed": fam.report.passed, "params": fam.params,
              "f": fam.f.name if fam.f else None, "cone": fam.cone.label if fam.cone else None}
    params = {"kind": args.kind, "n": args.n, "j": args.j, "samples": args.samples, "seed": args.seed}
    return make_record("counterexample blowup", params, result, {}, table)


SYMFUN_FAMILIES = ("sigma-k", "sigma-k-root", "g-p", "lambda-pq", "circular", "ordered-linear")


def _symfun_from_args(args) -> tuple[symfun.SymFun, ConeSpec]:
    n = args.n
    if args.gauge_from:
        cone = parse_cone_spec(args.gauge_from, n)
        f = symfun.gauge_from_cone(cone, args.shape)
        return f, cone
    fam = args.family
    if fam is None:
        raise UsageError("give --family or --gauge-from")
    if fam in ("sigma-k", "sigma-k-root"):
        if args.k is None:
            raise UsageError(f"{fam} needs --k")
        f = symfun.sigma_k(n, args.k) if fam == "sigma-k" else symfun.sigma_k_root(n, args.k)
    elif fam == "g-p":
        if args.p is None:
            raise UsageError("g-p needs --p")
        f = symfun.g_p(n, args.p)
    elif fam == "lambda-pq":
        if args.p is None or args.q is None:
            raise UsageError("lambda-pq needs --p and --q")
        f = symfun.lambda_pq(n, args.p, args.q)
    elif fam == "circular":
        if args.c is None:
            raise UsageError("circular needs --c")
        f = symfun.circular(n, args.c)
    else:
        if args.weights is None:
            raise UsageError("ordered-linear needs --weights")
        f = symfun.ordered_linear(_floats(args.weights))
        if f.n != n:
            raise UsageError(f"--weights needs {n} entries")
    return f, f.domain


def cmd_symfun_check(args) -> dict:
    f, cone = _symfun_from_args(args)
    rep = symfun.verify_structural(f, cone, samples=args.samples, seed=args.seed)
    table = [{"condition": r.name, "passed": r.passed, "worst": r.worst,
              "witness": list(r.witness) if r.witness else [], "note": r.note} for r in rep.results]
    params = {k: getattr(args, k) for k in ("family", "gauge_from", "shape", "n", "k", "p", "q", "c", "weights",
                                            "samples", "seed") if getattr(args, k) is not None}
    return make_record("symfun check", params, {"function": rep.function, "cone": rep.cone,
                                                "all_passed": rep.all_passed}, {}, table)


def cmd_verify_bubble(args) -> dict:
    rng = np.random.default_rng(args.seed)
    n, a, b = args.n, args.a, args.b
    target = 2.0 * b * b / (a * a)
    table, worst_a, worst_fd = [], 0.0, 0.0
    for i in range(args.count):
        center = rng.normal(size=n)
        x = center + rng.uniform(-1, 1, size=n) / math.sqrt(n)
        v = conformal.bubble(n, a, b, center)
        ana = conformal.mobius_hessian(v, x).matrix
        fd = conformal.mobius_hessian(v.without_derivatives(), x).matrix
        da = float(np.linalg.norm(ana - target * np.eye(n), 2))
        dfd = float(np.linalg.norm(fd - target * np.eye(n), 2))
        worst_a, worst_fd = max(worst_a, da), max(worst_fd, dfd)
        table.append({"sample": i, "analytic_deviation": da, "fd_deviation": dfd})
    params = {"n": n, "a": a, "b": b, "count": args.count, "seed": args.seed}
    result = {"expected_multiple": target, "max_deviation": worst_a, "max_fd_deviation": worst_fd,
              "within_analytic_tolerance": worst_a <= 1e-9, "within_fd_tolerance": worst_fd <= 1e-5}
    return make_record("verify bubble", params, result, {}, table)


def cmd_ricci_constants(args) -> dict:
    j = args.j if args.j is not None else args.n
    ratio = ricci.constraint_ratio(args.example, args.n, args.i, j, args.p)
    b = args.b if args.b is not None else args.a * ratio
    chk = ricci.bubble_constants(args.example, args.n, args.a, b, args.i, j, args.p, seed=args.seed)
    params = {"example": args.example, "n": args.n, "a": args.a, "b": b, "i": args.i, "j": j, "p": args.p,
              "seed": args.seed}
    result = {"value": chk.value, "expected": 1.0, "passed": chk.passed, "constraint": chk.constraint,
              "constraint_value": chk.constraint_value, "constraint_met": chk.constraint_met}
    return make_record("ricci constants", params, result)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _output_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", action="store_true", help="print the table as CSV instead of JSON")
    common.add_argument("--out", type=Path, help="write output to this file instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="confhess", description="Conformal Hessian eigenvalue computations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _output_options()
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    cone = groups.add_parser("cone").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = cone.add_parser("info", parents=[common], help="mu invariants and position of (1,-1,...,-1)")
    _add_cone_args(p)
    p.set_defaults(func=cmd_cone_info)

    rad = groups.add_parser("radial").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = rad.add_parser("classify", parents=[common], help="radial boundary-solution families for a cone")
    _add_cone_args(p, ("--family-cone", "--family"))
    p.set_defaults(func=cmd_radial_classify)
    p = rad.add_parser("dirichlet", parents=[common], help="radial Dirichlet problem on an annulus")
    _add_cone_args(p)
    for name in ("a", "b", "alpha", "beta"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--samples", type=_positive_int, default=11)
    p.set_defaults(func=cmd_radial_dirichlet)

    ode = groups.add_parser("ode").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ode.add_parser("run", parents=[common], help="integrate the one-variable ODE forward and backward")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--w0", type=float, required=True)
    p.add_argument("--window", type=float, default=50.0)
    p.add_argument("--threshold", type=float, default=1e8)
    p.add_argument("--samples", type=_positive_int, default=21)
    p.set_defaults(func=cmd_ode_run)

    ce = groups.add_parser("counterexample").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ce.add_parser("blowup", parents=[common], help="gradient blow-up sequence member and its verification")
    p.add_argument("--kind", choices=[k.value for k in counterex.BlowupKind], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--samples", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_blowup)

    sf = groups.add_parser("symfun").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = sf.add_parser("check", parents=[common], help="sampled structural conditions")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=SYMFUN_FAMILIES)
    src.add_argument("--gauge-from", help="compact cone form; checks the gauge of {margin > 1}")
    p.add_argument("--shape", choices=("convex", "concave"), help="declared convexity of the gauge")
    p.add_argument("--n", type=int, required=True)
    for name in ("k", "p", "q"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--weights")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_symfun_check)

    ver = groups.add_parser("verify").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ver.add_parser("bubble", parents=[common], help="deviation of A[v] from 2 b^2 a^-2 I on a bubble")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--count", type=_positive_int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_bubble)

    ric = groups.add_parser("ricci").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ric.add_parser("constants", parents=[common], help="curvature constants of the bubble")
    p.add_argument("--example", choices=("ricci-single", "ricci-range", "weitzenboeck"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, help="default: the value meeting the example's constraint")
    p.add_argument("--i", type=int, default=2)
    p.add_argument("--j", type=int)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ricci_constants)
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, str, argparse.Namespace]:
    """Parse and execute; returns ``(exit status, output or diagnostic, parsed args)``."""
    args = build_parser().parse_args(argv)
    previous = None
    try:
        previous = use_tolerances(ToleranceProfile.from_env())
        record = args.func(args)
    except (NumericalError, ArithmeticError) as exc:
        return EXIT_NUMERICAL, f"confhess: numerical failure: {exc}", args
    except (UsageError, ValueError, TypeError) as exc:
        return EXIT_USAGE, f"confhess: error: {exc}", args
    finally:
        if previous is not None:
            use_tolerances(previous)
    return EXIT_OK, dumps_csv(record) if args.csv else dumps_record(record), args


def main(argv: Sequence[str] | None = None) -> int:
    status, text, args = run(argv)
    if status != EXIT_OK:
        print(" ".join(text.split()), file=sys.stderr)
        return status
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
