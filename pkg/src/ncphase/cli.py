"""Command-line front end: ``ncphase <command> [options]``.

Exit status: 0 success, 1 an identity check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .exceptions import DomainError, StructuralError
from .lie import StructureConstants, check_jacobi
from .models import MODEL_NAMES, ModelSpec, build_model, verify_model
from .qdeform import q_multinomial
from .realization import verify_commutators, weyl_realization
from .report import Report
from .series import TruncatedSeries
from .star import (StarProduct, check_associativity, d_function_diffop, d_function_ode,
                   d_function_oracle)
from .twist import check_coassociativity, coproduct_from_d, ln_twist, ln_twist_check

MAX_ORDER = 8
MAX_DIM = 6

MODEL_HELP = {
    "kappa": "[xh_mu, xh_nu] = i l (a_mu xh_nu - a_nu xh_mu); --a sets the vector a",
    "tensorial": "vector plus antisymmetric tensorial coordinates, [xh_mu, xh_nu] = i l xh_(mu nu); --n base dimension",
    "theta": "constant [xh_mu, xh_nu] = i l theta_{mu nu}; --theta rows separated by ';'",
    "snyder": "Snyder space with symmetric ordering, graded by beta; --n dimension",
}


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _rationals(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _max_order() -> int:
    env = os.environ.get("NCPHASE_MAX_ORDER")
    if env is None:
        return MAX_ORDER
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"NCPHASE_MAX_ORDER must be an integer, got {env!r}") from None


def _check_guards(args):
    order = getattr(args, "order", None)
    if order is not None:
        if order < 0:
            raise UsageError("order must be non-negative")
        if order > _max_order():
            raise UsageError(f"order {order} exceeds the limit {_max_order()} (set NCPHASE_MAX_ORDER to raise it)")
    n = getattr(args, "n", None)
    if n is not None and not 1 <= n <= MAX_DIM:
        raise UsageError(f"dimension must be between 1 and {MAX_DIM}")


def _model(args) -> ModelSpec:
    a = _rationals(args.a) if getattr(args, "a", None) else None
    theta = None
    if getattr(args, "theta", None):
        theta = [_rationals(row) for row in args.theta.split(";")]
    n = args.n
    if a is not None and n is None:
        n = len(a)
    if theta is not None and n is None:
        n = len(theta)
    dim = len(a) if a is not None else n
    if dim is not None and dim > MAX_DIM:
        raise UsageError(f"dimension must be between 1 and {MAX_DIM}")
    return build_model(args.model, args.order if args.order is not None else 1, n, a, theta)


def _structure(args) -> tuple[StructureConstants, ModelSpec | None]:
    if args.file:
        try:
            with open(args.file) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from None
        C = StructureConstants.from_json(doc)
        if C.n > MAX_DIM * (MAX_DIM + 1) // 2:
            raise UsageError("structure constants too large")
        return C, None
    if not args.model:
        raise UsageError("give --model or --file")
    spec = _model(args)
    if spec.structure is None:
        raise UsageError(f"model {spec.name!r} is not of Lie type")
    return spec.structure, spec


def _emit(args, text_lines: Sequence[str], payload: dict):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _report_payload(reports: Sequence[Report]) -> list[dict]:
    out = []
    for r in reports:
        res = {",".join(map(str, k)) if isinstance(k, tuple) else str(k): getattr(v, "render", lambda: str(v))()
               for k, v in r.nonzero().items()}
        out.append({"name": r.name, "ok": r.ok, "residuals": res})
    return out


def _report_lines(reports: Sequence[Report]) -> list[str]:
    out = []
    for r in reports:
        out.append(f"{r.name}: {'ok' if r.ok else 'FAILED'}")
        if not r.ok:
            out.extend("  " + line for line in Report(r.name, r.nonzero(), r.notes).lines())
    return out


# -- commands ----------------------------------------------------------------------

def cmd_jacobi(args) -> int:
    C, _ = _structure(args)
    bad = check_jacobi(C.tensor(), C.signature)
    lines = ["valid"] if not bad else ["invalid"] + [f"violation at {t}" for t in bad]
    _emit(args, lines, {"valid": not bad, "violations": [list(t) for t in bad], "structure": C.to_json_dict()})
    return 0 if not bad else 1


def cmd_weyl(args) -> int:
    C, _ = _structure(args)
    R = weyl_realization(C, args.order)
    lines = [f"xh{m} = {op.render()}" for m, op in enumerate(R.operators)]
    _emit(args, lines, {"order": args.order, "structure": C.to_json_dict(),
                        "realization": [op.render() for op in R.operators]})
    return 0


def _d_function(C, order, method):
    if method == "ode":
        return d_function_ode(C, order)
    if method == "diffop":
        return d_function_diffop(weyl_realization(C, order))
    return d_function_oracle(C, order)


def cmd_dfunc(args) -> int:
    C, _ = _structure(args)
    D = _d_function(C, args.order, args.method)
    lines = [f"D{m} = {c.render()}" for m, c in enumerate(D.components)]
    _emit(args, lines, {"order": args.order, "method": args.method, "structure": C.to_json_dict(),
                        "D": [c.render() for c in D.components]})
    return 0


def cmd_coproduct(args) -> int:
    C, _ = _structure(args)
    delta = coproduct_from_d(d_function_ode(C, args.order))
    lines = [f"Delta(p{m}) = {c.render()}" for m, c in enumerate(delta.components)]
    _emit(args, lines, {"order": args.order, "structure": C.to_json_dict(),
                        "coproduct": [c.render() for c in delta.components]})
    return 0


def cmd_star(args) -> int:
    if args.model and not args.file:
        spec = _model(args)
        R = weyl_realization(spec.structure, args.order) if spec.structure is not None else spec.realization
    else:
        C, _ = _structure(args)
        R = weyl_realization(C, args.order)
    f_exp, g_exp = _ints(args.f), _ints(args.g)
    if len(f_exp) != R.n or len(g_exp) != R.n:
        raise UsageError(f"--f and --g need {R.n} exponents")
    S = StarProduct(R)
    f = TruncatedSeries.monomial(S.coord_table, R.order, {"x": f_exp})
    g = TruncatedSeries.monomial(S.coord_table, R.order, {"x": g_exp})
    out = S(f, g).truncate(args.order)
    _emit(args, [out.render()], {"order": args.order, "f": f.render(), "g": g.render(), "product": out.render()})
    return 0


def cmd_twist_check(args) -> int:
    C, _ = _structure(args)
    rep = ln_twist_check(C, args.order, args.form)
    lines = [f"ln F = {ln_twist(C, args.order).render()}"] + _report_lines([rep])
    _emit(args, lines, {"order": args.order, "form": args.form, "structure": C.to_json_dict(),
                        "checks": _report_payload([rep])})
    return 0 if rep.ok else 1


def cmd_snyder(args) -> int:
    spec = build_model("snyder", args.order, args.n or 4)
    R = spec.realization
    assoc = check_associativity(d_function_diffop(R))
    w = assoc.witness()
    lines = [f"phi1 = {spec.expectations['phi1'].render()}",
             f"phi2 = {spec.expectations['phi2'].render()}"]
    lines += [f"xh{m} = {op.render()}" for m, op in enumerate(R.operators)]
    lines.append("associative" if w is None else
                 f"nonassociative: component {w[0]}, term {w[2]}*{w[3]}")
    _emit(args, lines, {"order": args.order, "phi1": spec.expectations["phi1"].render(),
                        "phi2": spec.expectations["phi2"].render(),
                        "realization": [op.render() for op in R.operators],
                        "associative": w is None,
                        "witness": None if w is None else {"component": str(w[0]), "coefficient": str(w[2]),
                                                           "monomial": w[3]}})
    return 0


def cmd_qmultinomial(args) -> int:
    m = _ints(args.exponents)
    if not m or any(v < 0 for v in m):
        raise UsageError("exponents must be non-negative integers")
    if len(m) > MAX_DIM or sum(m) > 10:
        raise UsageError(f"at most {MAX_DIM} generators and total degree 10")
    lq = q_multinomial(m)
    _emit(args, [lq.render()], {"exponents": m, "coefficient": lq.render(),
                                "note": "q symbols use 1-based generator labels"})
    return 0


def cmd_model_list(args) -> int:
    _emit(args, [f"{name}: {MODEL_HELP[name]}" for name in MODEL_NAMES],
          {"models": [{"name": name, "description": MODEL_HELP[name]} for name in MODEL_NAMES]})
    return 0


def generic_checks(C: StructureConstants, order: int) -> list[Report]:
    W = weyl_realization(C, order)
    D = d_function_ode(C, order)
    reports = [Report("jacobi", {t: 1 for t in check_jacobi(C)}),
               Report("commutators", verify_commutators(W, C))]
    for name, other in (("diffop", d_function_diffop(W)), ("oracle", d_function_oracle(C, order))):
        reports.append(Report(f"d-function {name}", {m: a - b for m, (a, b) in
                                                       enumerate(zip(D.components, other.components))}))
    reports.append(check_associativity(D))
    reports.append(check_coassociativity(coproduct_from_d(D)))
    return reports


def cmd_verify_all(args) -> int:
    if args.file:
        C, _ = _structure(args)
        reports = generic_checks(C, args.order)
    else:
        if not args.model:
            raise UsageError("give --model or --file")
        reports = verify_model(_model(args))
    ok = all(r.ok for r in reports)
    _emit(args, _report_lines(reports) + ["all checks passed" if ok else "some checks FAILED"],
          {"ok": ok, "checks": _report_payload(reports)})
    return 0 if ok else 1


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--model", choices=MODEL_NAMES)
    source.add_argument("--file", help="structure constants as JSON {n, signature, C: [[mu, nu, lam, 'a/b']]}")
    source.add_argument("--a", help="kappa vector, e.g. 1,0")
    source.add_argument("--theta", help="antisymmetric matrix rows, e.g. '0,1;-1,0'")
    source.add_argument("--n", type=int)

    def order(p, default):
        p.add_argument("--order", type=int, default=default)

    parser = argparse.ArgumentParser(prog="ncphase", description="Exact computations for noncommutative phase spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jacobi", parents=[common, source], help="check the Jacobi identity")
    p.set_defaults(func=cmd_jacobi, order=None)
    p = sub.add_parser("weyl", parents=[common, source], help="Weyl realization")
    order(p, 3)
    p.set_defaults(func=cmd_weyl)
    p = sub.add_parser("dfunc", parents=[common, source], help="deformed momentum addition D(k, q)")
    order(p, 3)
    p.add_argument("--method", choices=("ode", "diffop", "oracle"), default="ode")
    p.set_defaults(func=cmd_dfunc)
    p = sub.add_parser("star", parents=[common, source], help="star product of two monomials")
    order(p, 3)
    p.add_argument("--f", required=True, help="exponents of the left monomial, e.g. 1,0")
    p.add_argument("--g", required=True, help="exponents of the right monomial")
    p.set_defaults(func=cmd_star)
    p = sub.add_parser("coproduct", parents=[common, source], help="coproduct of momenta")
    order(p, 3)
    p.set_defaults(func=cmd_coproduct)
    p = sub.add_parser("twist-check", parents=[common, source], help="logarithm of the twist to second order")
    order(p, 2)
    p.add_argument("--form", choices=("display", "expanded"), default="display")
    p.set_defaults(func=cmd_twist_check)
    p = sub.add_parser("snyder", parents=[common], help="Snyder realization with symmetric ordering")
    order(p, 2)
    p.add_argument("--n", type=int, default=4)
    p.set_defaults(func=cmd_snyder)
    p = sub.add_parser("qmultinomial", parents=[common], help="q-deformed multinomial coefficient")
    p.add_argument("--exponents", required=True, help="e.g. 2,1")
    p.set_defaults(func=cmd_qmultinomial)
    p = sub.add_parser("model-list", parents=[common], help="list built-in models")
    p.set_defaults(func=cmd_model_list)
    p = sub.add_parser("verify-all", parents=[common, source], help="run every golden identity for a model")
    order(p, 3)
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _check_guards(args)
        return args.func(args)
    except (UsageError, StructuralError, DomainError) as exc:
        print(f"ncphase: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
