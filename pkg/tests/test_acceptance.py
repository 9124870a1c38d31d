"""The twelve acceptance criteria, each at its stated tolerance.

Run under pytest for a summary section, or directly with
``python3 tests/test_acceptance.py`` for the PASS/FAIL lines alone.
"""

from __future__ import annotations

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from weyldirac import actions as A
from weyldirac.actions import Gen
from weyldirac.holonomy import LoopPath, holonomy_defect, length_transport, transport
from weyldirac.report import CheckStatus
from weyldirac.riemann import christoffel, covariant_deriv, ricci, riemann, scalar_curvature
from weyldirac.scenario import catalog, catalog_metrics
from weyldirac.symbolic import Equivalence, Num, canonical, func, is_zero, parse_expr
from weyldirac.tensor import Chart, Metric, TensorField, gradient
from weyldirac.verify import area_study, potential_corpus
from weyldirac.weyl import (GaugeFunction, WeylStructure, colon_deriv, gauge_transform, length_curvature,
                            verify_2O, weyl_scalar_curvature)

P = parse_expr


def c01_metric_compatibility(runs=None):
    bad = [s.name for s in catalog_metrics()
           if not covariant_deriv(s.metric.g, christoffel(s.metric)).is_zero()]
    return not bad, f"nabla g = 0 on 7 catalog metrics (failing: {bad or 'none'})"


def c02_inverse_metric_law(runs=None):
    bad = []
    for s in catalog_metrics():
        W = WeylStructure.symbolic(s.metric)
        lhs, gi, d = colon_deriv(s.metric.inverse, W), s.metric.inverse, s.chart.dim
        if any(lhs[m, n, l] != canonical(-2 * gi[m, n] * W.w[l])
               for m in range(d) for n in range(d) for l in range(d)):
            bad.append(s.name)
    return not bad, f"g^mn_:l = -2 g^mn w_l with symbolic w (failing: {bad or 'none'})"


def c03_convention_anchors(runs=None):
    R = scalar_curvature(catalog("sphere2").metric)
    ric = ricci(riemann(christoffel(catalog("schw4").metric)))
    ok = R == Num(2) and all(is_zero(c) for c in ric.values())
    return ok, f"unit sphere R = {R}; Schwarzschild Ricci zero: {ric.is_zero()}"


def c04_integrability(runs=None):
    chart = Chart(("t", "x", "y", "z"))
    corpus = potential_corpus(chart)
    zero = all(length_curvature(gradient(chart, phi)).is_zero() for phi in corpus)
    has_log = P("c*log(beta)", {"beta": chart.coords}) in corpus
    flat = Chart(("x", "y"))
    W = length_curvature(TensorField.covector(flat, [0, P("k*x")]))
    anti = W[0, 0] == Num(0) and W[1, 1] == Num(0) and W[0, 1] == P("-k") and W[1, 0] == P("k")
    ok = zero and has_log and len(corpus) >= 10 and anti
    return ok, f"{len(corpus)} gradient potentials give W = 0; W(0, kx) = antisym(-k): {anti}"


def c05_gauge_suite(runs=None):
    failures = []
    for name in ("flat4", "conf4"):
        g = catalog(name).metric
        lam = g.chart.field("lam2")
        W = WeylStructure.symbolic(g)
        W2 = gauge_transform(W, GaugeFunction(lam))
        e = lambda n: func("exp", n * lam)
        checks = {
            "g": W2.g.g == W.g.g.map(lambda c: c * e(2)),
            "w": W2.w == W.w + gradient(g.chart, lam),
            "Gamma_hat": W2.connection == W.connection,
            "sqrt_g": canonical(W2.g.volume_density) == canonical(e(4) * W.g.volume_density),
            "R_hat": weyl_scalar_curvature(W2) == canonical(e(-2) * weyl_scalar_curvature(W)),
        }
        failures += [f"{name}:{k}" for k, v in checks.items() if not v]
    return not failures, f"all canonical on flat4, conf4 (failing: {failures or 'none'})"


def c06_weyl_scalar_identity(runs=None):
    out, ok = [], True
    for name in ("conf4", "m4"):
        W = WeylStructure.symbolic(catalog(name).metric)
        r = verify_2O(W)
        ctrl = verify_2O(W, w2_sign=-1)
        ok &= r.payload["equivalence"] == Equivalence.EQUAL.value and ctrl.status is CheckStatus.FAIL
        out.append(f"{name} {r.payload['equivalence']}, control {ctrl.status.value}")
    return ok, "; ".join(out)


def c07_integrable_reduction(runs=None):
    I = A.dirac_integrand().drop(Gen.B4, Gen.LM)
    out = A.substitute_w_form(I, integrable=True)
    parts = A.w_form_contributions(I)
    ok = (out.support() == {Gen.R, Gen.DB2} and out[Gen.R] == Num(-1)
          and out[Gen.DB2] == canonical(A.SIGMA + 6)
          and parts[Gen.B2W2] == canonical(4 * A.SIGMA) and parts[Gen.BWDB] == canonical(-4 * A.SIGMA)
          and is_zero(parts[Gen.B2W2] + parts[Gen.BWDB]))
    return ok, f"reduced: {out}; 4 sigma terms sum to {canonical(parts[Gen.B2W2] + parts[Gen.BWDB])}"


def c08_conformal_chain(runs=None):
    I1, I2 = A.cgr_I1(), A.cgr_I2()
    residual = [g.name for g in (Gen.DB2, Gen.B2W2, Gen.BWDB, Gen.B2DIVW) if not is_zero(I1[g])]
    i1 = I1.support() == {Gen.R} and I1[Gen.R] == P("1/m^2") and not residual
    i2 = I2.support() == {Gen.DB2} and I2[Gen.DB2] == P("-4*(alpha - 3/2)/m^2")
    rosen = A.rosen_integrand(cosmological=False, matter=False)
    res = A.match_actions(A.assemble_cgr(), rosen)
    res0 = A.match_actions(A.assemble_cgr(0), rosen)
    match = res.ok and res.solution["sigma"] == P("-4*alpha")
    match0 = res0.ok and res0.solution["sigma"] == Num(0)
    ok = i1 and i2 and match and match0
    return ok, (f"I1 = {I1}; I2 = {I2}; sigma = {res.solution.get('sigma')}; "
                f"alpha = 0 gives sigma = {res0.solution.get('sigma')}")


def c09_sphere_holonomy(runs=None):
    s = catalog("sphere2")
    conn = christoffel(s.metric)
    errors, angle, drift = [], None, None
    for N in (1024, 2048, 4096):
        r = transport(conn, s.loop_path(N), (1.0, 0.0), g=s.metric)
        # a rotation by pi sends B0 to -B0
        errors.append(float(np.linalg.norm(r.final - np.array([-1.0, 0.0]))))
        angle, drift = r.rotation_angle, abs(r.final_length - r.initial_length)
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    ok = abs(angle - math.pi) <= 1e-6 and min(orders) >= 3.8 and drift <= 1e-9
    return ok, (f"|angle - pi| = {abs(angle - math.pi):.2e}, RK4 orders "
                f"{orders[0]:.2f}, {orders[1]:.2f}, drift {drift:.1e}")


def c10_weyl_length_law(runs=None):
    sq = catalog("square_weyl")
    r = length_transport(sq.weyl_structure(), sq.loop_path(4096), 1.0, constants=sq.constants)
    err = abs(r.length_ratio - math.exp(0.1))
    integrable = []
    gw = catalog("gradient_weyl")
    integrable.append(length_transport(gw.weyl_structure(), gw.loop_path(4096)).length_ratio)
    chart = Chart(("x", "y"))
    flat = Metric.diagonal(chart, [1, 1])
    Wg = WeylStructure(flat, gradient(chart, P("x^2*y + exp(x)*sin(y)")))
    circle = LoopPath(chart, [P("cos(2*pi*t)"), P("1 + sin(2*pi*t)")], 4096)
    integrable.append(length_transport(Wg, circle).length_ratio)
    worst = max(abs(x - 1.0) for x in integrable)
    orders = area_study()["orders"]
    ok = err <= 1e-8 and worst <= 1e-9 and min(orders) >= 1.8
    return ok, (f"|ratio - e^0.1| = {err:.1e}; integrable |ratio - 1| <= {worst:.1e}; "
                f"area error orders {', '.join(f'{o:.2f}' for o in orders)}")


def c11_holonomy_defect(runs=None):
    conn = christoffel(catalog("sphere2").metric)
    eps_list = (2e-2, 1e-2, 5e-3)
    errs = []
    for eps in eps_list:
        r = holonomy_defect(conn, (1.0, 0.0), eps, (0, 1), (0.6, 0.8))
        errs.append(float(np.linalg.norm(r.extra["delta"] - r.predicted_delta)))
    scaled = [e / eps ** 2 for e, eps in zip(errs, eps_list)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    ok = min(orders) >= 2.8 and scaled[0] > scaled[1] > scaled[2]
    return ok, (f"|dB - B R eps^2| / eps^2 = {', '.join(f'{x:.2e}' for x in scaled)}; "
                f"orders {orders[0]:.2f}, {orders[1]:.2f}")


def _verify(*args):
    return subprocess.run([sys.executable, "-m", "weyldirac", "verify-paper", *args],
                          capture_output=True, text=True, encoding="utf-8")


def c12_cli_contract(runs=None):
    if runs is None:
        runs = {"text": _verify(), "text_again": _verify(), "json": _verify("--json"),
                "flip": _verify("--flip-w-sign")}
    text, again, js, flip = runs["text"], runs["text_again"], runs["json"], runs["flip"]
    lines = text.stdout.splitlines()
    all_pass = text.returncode == 0 and all(l.split()[2] == "PASS" for l in lines[:-1]) \
        and lines[-1] == "OVERALL PASS"
    i1_fail = flip.returncode == 1 and any(l.startswith("CHECK I1 FAIL") for l in flip.stdout.splitlines())
    doc = json.loads(js.stdout)
    same = {c["id"]: c["status"] for c in doc["checks"]} == {l.split()[1]: l.split()[2] for l in lines[:-1]}
    identical = text.stdout == again.stdout
    ok = all_pass and i1_fail and same and identical and js.returncode == 0
    return ok, (f"exit {text.returncode} with {len(lines) - 1} checks; flip exit {flip.returncode}, "
                f"I1 FAIL: {i1_fail}; json verdicts match: {same}; byte-identical: {identical}")


CRITERIA = [
    (1, "metric compatibility", c01_metric_compatibility),
    (2, "inverse-metric colon law", c02_inverse_metric_law),
    (3, "convention anchors", c03_convention_anchors),
    (4, "integrability", c04_integrability),
    (5, "gauge suite", c05_gauge_suite),
    (6, "Weyl scalar identity", c06_weyl_scalar_identity),
    (7, "integrable reduction", c07_integrable_reduction),
    (8, "conformal-frame chain", c08_conformal_chain),
    (9, "sphere holonomy", c09_sphere_holonomy),
    (10, "Weyl length law", c10_weyl_length_law),
    (11, "holonomy defect", c11_holonomy_defect),
    (12, "CLI contract", c12_cli_contract),
]


def _line(n: int, title: str, ok: bool, detail: str) -> str:
    return f"ACCEPTANCE {n:02d} {'PASS' if ok else 'FAIL'} {title}: {detail}"


@pytest.mark.parametrize("n,title,fn", CRITERIA, ids=[f"{n:02d}-{t.replace(' ', '-')}" for n, t, _ in CRITERIA])
def test_criterion(n, title, fn, request):
    from .conftest import ACCEPTANCE_LINES
    runs = request.getfixturevalue("verify_runs") if n == 12 else None
    ok, detail = fn(runs)
    line = _line(n, title, ok, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [(n, t, *fn()) for n, t, fn in CRITERIA]
    for n, t, ok, detail in results:
        print(_line(n, t, ok, detail))
    sys.exit(0 if all(r[2] for r in results) else 1)
