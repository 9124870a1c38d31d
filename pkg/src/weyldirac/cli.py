"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .holonomy import TransportError, length_transport, transport
from .report import CheckResult, CheckStatus, Report, from_equiv
from .riemann import christoffel, ricci, riemann, scalar_curvature
from .scenario import ScenarioError, catalog_names, load_scenario
from .symbolic import EvalDomainError, ParseError, equiv, func, parse_expr
from .verify import CHECK_IDS, verify_paper
from .weyl import (GaugeFunction, gauge_transform, is_integrable, length_curvature, verify_2D,
                   verify_2O, weyl_scalar_curvature)


def _fmt_float(x: float) -> str:
    return f"{x:.15g}"


def _vec(v) -> str:
    return "(" + ", ".join(_fmt_float(float(x)) for x in np.atleast_1d(v)) + ")"


def cmd_verify(args) -> int:
    only = [s.strip() for s in args.only.split(",") if s.strip()] if args.only else None
    report = verify_paper(flip_w_sign=args.flip_w_sign, only=only)
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return 0 if report.ok else 1


def cmd_christoffel(args) -> int:
    s = load_scenario(args.scenario)
    c = s.chart.coords
    conn = christoffel(s.metric)
    printed = False
    for (l, m, n), e in conn.nonzero():
        if m <= n:
            print(f"Gamma^{c[l]}_{{{c[m]} {c[n]}}} = {e}")
            printed = True
    if not printed:
        print("all Christoffel symbols vanish")
    return 0


def cmd_curvature(args) -> int:
    s = load_scenario(args.scenario)
    c = s.chart.coords
    R4 = riemann(christoffel(s.metric))
    for (l, a, m, n), e in R4.nonzero():
        if m < n:
            print(f"Riemann^{c[l]}_{{{c[a]} {c[m]} {c[n]}}} = {e}")
    for (a, b), e in ricci(R4).nonzero():
        if a <= b:
            print(f"Ricci_{{{c[a]} {c[b]}}} = {e}")
    print(f"R = {scalar_curvature(s.metric)}")
    return 0


def cmd_weyl(args) -> int:
    s = load_scenario(args.scenario)
    c = s.chart.coords
    W = s.weyl_structure()
    for i, e in enumerate(W.w.values()):
        print(f"w_{c[i]} = {e}")
    for (m, n), e in length_curvature(W.w).nonzero():
        if m < n:
            print(f"W_{{{c[m]} {c[n]}}} = {e}")
    print(f"integrable: {'yes' if is_integrable(W.w) else 'no'}")
    report = Report()
    report.add(verify_2D(W))
    if s.chart.dim == 4:
        report.add(verify_2O(W))
    sys.stdout.write(report.to_text())
    return 0 if report.ok else 1


def cmd_gauge(args) -> int:
    s = load_scenario(args.scenario)
    c = s.chart.coords
    fields = {**s.fields, "mu": c}
    lam = parse_expr(args.lam, fields)
    W = s.weyl_structure()
    W2 = gauge_transform(W, GaugeFunction(lam))
    for (i, j), e in W2.g.g.nonzero():
        if i <= j:
            print(f"g~_{{{c[i]} {c[j]}}} = {e}")
    for i, e in enumerate(W2.w.values()):
        print(f"w~_{c[i]} = {e}")
    report = Report()
    report.add(CheckResult("2K", CheckStatus.PASS if W2.connection == W.connection else CheckStatus.FAIL,
                           "Weyl connection unchanged"))
    report.add(from_equiv("2K", equiv(W2.g.volume_density, func("exp", 4 * lam) * W.g.volume_density),
                          "sqrt(-g) -> exp(4*lambda) sqrt(-g)"))
    same = weyl_scalar_curvature(W2) == weyl_scalar_curvature(W) * func("exp", -2 * lam)
    report.add(CheckResult("2K", CheckStatus.PASS if same else CheckStatus.FAIL,
                           "R_hat -> exp(-2*lambda) R_hat"))
    sys.stdout.write(report.to_text())
    return 0 if report.ok else 1


def cmd_transport(args) -> int:
    s = load_scenario(args.scenario)
    loop = s.loop_path(args.steps)
    B0 = s.B0 or tuple(1.0 if i == 0 else 0.0 for i in range(s.chart.dim))
    if s.weyl is None:
        r = transport(christoffel(s.metric), loop, B0, g=s.metric, constants=s.constants)
        print("connection: levi-civita")
    else:
        W = s.weyl_structure()
        r = transport(W.connection, loop, B0, g=s.metric, constants=s.constants)
        print("connection: weyl")
    print(f"steps: {loop.steps}")
    print(f"initial: {_vec(r.initial)}")
    print(f"final: {_vec(r.final)}")
    print(f"initial length: {_fmt_float(r.initial_length)}")
    print(f"final length: {_fmt_float(r.final_length)}")
    if r.rotation_angle is not None:
        print(f"rotation angle: {_fmt_float(r.rotation_angle)}")
    if s.weyl is not None:
        lt = length_transport(s.weyl_structure(), loop, 1.0, constants=s.constants)
        print(f"length ratio: {_fmt_float(lt.length_ratio)}")
        print(f"exp(loop integral of w): {_fmt_float(lt.extra['exact_ratio'])}")
        print(f"first-order prediction: {_fmt_float(1.0 + lt.predicted_delta)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weyldirac",
                                description="Symbolic Weyl geometry checks and transport numerics.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-paper", help="run the full identity and transport suite")
    v.add_argument("--json", action="store_true", help="machine-readable report")
    v.add_argument("--flip-w-sign", action="store_true", help="use w = +2 d log(beta) (negative control)")
    v.add_argument("--only", metavar="IDS", help=f"comma-separated subset of: {', '.join(CHECK_IDS)}")
    v.set_defaults(func=cmd_verify)

    names = ", ".join(catalog_names())
    for name, fn, text in (("christoffel", cmd_christoffel, "print Christoffel symbols"),
                           ("curvature", cmd_curvature, "print Riemann, Ricci and R"),
                           ("weyl", cmd_weyl, "print W_{mn} and run the Weyl identity checks"),
                           ("gauge", cmd_gauge, "apply a gauge transformation")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("scenario", help=f"scenario file or catalog name ({names})")
        sp.set_defaults(func=fn)
        if name == "gauge":
            sp.add_argument("--lambda", dest="lam", default="mu",
                            help="gauge function (default: a field mu of all coordinates)")
    t = sub.add_parser("transport", help="parallel transport around the scenario loop")
    t.add_argument("scenario")
    t.add_argument("--steps", type=int, default=None)
    t.set_defaults(func=cmd_transport)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ParseError, TransportError, EvalDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
