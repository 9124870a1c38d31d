"""The full identity and transport check suite behind ``verify-paper``."""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from . import actions as A
from .actions import Gen
from .holonomy import holonomy_defect, length_transport, transport
from .report import CheckResult, CheckStatus, Report, combine, from_equiv
from .riemann import RicciConvention, christoffel, metric_compatibility, ricci, riemann, scalar_curvature
from .scenario import Scenario, catalog, catalog_metrics
from .symbolic import Equivalence, Sym, canonical, diff, equiv, func, is_zero, parse_expr
from .tensor import Chart, Metric, TensorField, contract_with_inverse, gradient
from .weyl import (GaugeFunction, WeylStructure, gauge_transform, is_integrable, length_curvature,
                   verify_2D, verify_2O, weyl_scalar_curvature)

CHECK_IDS = ("2B", "2.3", "2D", "2F", "2K", "2O", "R2.1", "2L", "I1", "I2", "2.16",
             "2A", "2C", "2E", "2G")

# what each check certifies, one entry per id
CHECK_ANCHORS = {
    "2B": "Levi-Civita connection is metric compatible",
    "2.3": "curvature sign anchors (unit sphere, Schwarzschild)",
    "2D": "colon derivative of the inverse metric",
    "2F": "length curvature of a gradient vanishes",
    "2K": "gauge weights of g, w, Gamma_hat, sqrt(-g), R_hat",
    "2O": "Weyl scalar in terms of R, div w and |w|^2",
    "R2.1": "integrable reduction of the Weyl-Dirac integrand",
    "2L": "composite Weyl vector W = w + c d log(beta)",
    "I1": "first conformal-frame integral",
    "I2": "second conformal-frame integral",
    "2.16": "matching sigma = -4 alpha",
    "2A": "Levi-Civita transport preserves length",
    "2C": "small-loop holonomy follows the curvature",
    "2E": "first-order length change from the enclosed W flux",
    "2G": "closed-loop length law exp(loop integral of w)",
}


def _exact(check_id: str, ok: bool, detail: str, **payload) -> CheckResult:
    return CheckResult(check_id, CheckStatus.PASS if ok else CheckStatus.FAIL, detail, payload)


def _bound(check_id: str, value: float, limit: float, detail: str, **payload) -> CheckResult:
    ok = bool(value <= limit)
    return CheckResult(check_id, CheckStatus.PASS if ok else CheckStatus.FAIL,
                       f"{detail}: {value:.3e} <= {limit:.0e}" if ok else f"{detail}: {value:.3e} > {limit:.0e}",
                       dict(payload, value=value, limit=limit))


def pure_gauge_w(chart: Chart, w_sign: int = 1, beta: str = "beta") -> TensorField:
    """w = -2 w_sign d log(beta)."""
    b = chart.field(beta)
    return TensorField.covector(chart, [canonical(-2 * w_sign * diff(b, x) / b) for x in chart.coords],
                                name="w")


# -- individual checks ------------------------------------------------------

def check_2B(scenarios: list[Scenario]) -> CheckResult:
    parts = [_exact(s.name, metric_compatibility(s.metric).is_zero(), "nabla g = 0")
             for s in scenarios]
    return combine("2B", parts, f"metric compatibility on {len(parts)} catalog metrics")


def check_2_3() -> CheckResult:
    sphere = catalog("sphere2").metric
    R = scalar_curvature(sphere)
    schw = catalog("schw4").metric
    parts = [
        _exact("sphere2", R == canonical(2), f"R = {R}"),
        _exact("schw4", ricci(riemann(christoffel(schw))).is_zero(), "Ricci = 0"),
        _exact("flat4", scalar_curvature(catalog("flat4").metric) == canonical(0), "R = 0"),
    ]
    return combine("2.3", parts, "curvature anchors: unit sphere R = 2, Schwarzschild Ricci = 0")


def check_2D(scenarios: list[Scenario]) -> CheckResult:
    parts = [verify_2D(WeylStructure.symbolic(s.metric), s.name) for s in scenarios]
    return combine("2D", parts, "g^{mn}_{:l} = -2 g^{mn} w_l with symbolic w")


def potential_corpus(chart: Chart) -> list:
    x, y = chart.coords[0], chart.coords[1]
    texts = [f"{x}*{y}", f"sin({x}*{y})", f"exp({y})*{x}^2", f"log(1 + {x}^2)", "c*log(beta)",
             "beta^2", f"sqrt(1 + {y}^2)", f"tan({x})*{y}", "psi*beta", "cos(psi)",
             f"{x}^3/(1 + {y}^2)", "exp(psi)*log(beta)"]
    fields = {"beta": chart.coords, "psi": chart.coords}
    return [parse_expr(t, fields) for t in texts]


def check_2F() -> CheckResult:
    chart = Chart(("t", "x", "y", "z"))
    parts = []
    for i, phi in enumerate(potential_corpus(chart)):
        parts.append(_exact(f"grad[{i}]", length_curvature(gradient(chart, phi)).is_zero(),
                            f"W(d {phi}) = 0"))
    flat = Chart(("x", "y"))
    k = Sym("k")
    W = length_curvature(TensorField.covector(flat, [0, k * Sym("x")]))
    parts.append(_exact("(0,kx)", W[0, 1] == canonical(-k) and W[1, 0] == canonical(k),
                        f"W_xy = {W[0, 1]}, W_yx = {W[1, 0]}"))
    parts.append(_exact("not-integrable", not is_integrable(TensorField.covector(flat, [0, k * Sym("x")])),
                        "(0, kx) is not integrable"))
    return combine("2F", parts, f"length curvature of {len(parts) - 2} gradients vanishes")


def gauge_parts(s: Scenario) -> list[CheckResult]:
    chart = s.chart
    mu, nu = chart.field("mu"), chart.field("nu")
    W = WeylStructure.symbolic(s.metric, quantities={"beta": chart.field("beta"), "Q": Sym("q")})
    W2 = gauge_transform(W, GaugeFunction(mu))
    e = lambda n: func("exp", mu * n)
    d = chart.dim
    g_ok = all(W2.g[i, j] == canonical(e(2) * W.g[i, j]) for i in range(d) for j in range(d))
    w_ok = W2.w == W.w + gradient(chart, mu)
    vol = equiv(W2.g.volume_density, e(4) * W.g.volume_density)
    Rhat = weyl_scalar_curvature(W2) == canonical(e(-2) * weyl_scalar_curvature(W))
    W3 = gauge_transform(W2, nu)
    W4 = gauge_transform(W, mu + nu)
    group = W3.g.g == W4.g.g and W3.w == W4.w and W3.quantities == W4.quantities
    tag = s.name
    return [
        _exact(f"{tag}:g", g_ok, "g -> exp(2 mu) g"),
        _exact(f"{tag}:w", w_ok, "w -> w + d mu"),
        _exact(f"{tag}:Gamma_hat", W2.connection == W.connection, "Weyl connection unchanged"),
        from_equiv(f"{tag}:sqrt_g", vol, "sqrt(-g) -> exp(4 mu) sqrt(-g)"),
        _exact(f"{tag}:R_hat", Rhat, "R_hat -> exp(-2 mu) R_hat"),
        _exact(f"{tag}:beta", W2.quantities["beta"] == canonical(e(-1) * chart.field("beta")),
               "beta -> exp(-mu) beta"),
        _exact(f"{tag}:flagged", W2.unweighted == ("Q",), "unweighted quantity left alone and flagged"),
        _exact(f"{tag}:group", group, "two transformations compose additively"),
    ]


def check_2K() -> CheckResult:
    parts = gauge_parts(catalog("flat4")) + gauge_parts(catalog("conf4"))
    return combine("2K", parts, "gauge weights on flat4 and conf4 with symbolic mu")


def check_2O() -> CheckResult:
    parts = []
    for name in ("conf4", "m4"):
        W = WeylStructure.symbolic(catalog(name).metric)
        r = verify_2O(W, check_id=name)
        parts.append(r)
        if r.payload.get("equivalence") != Equivalence.EQUAL.value:
            parts.append(CheckResult(f"{name}:exact", CheckStatus.FAIL,
                                     "identity not established canonically"))
        control = verify_2O(W, w2_sign=-1, check_id=f"{name}:control")
        parts.append(_exact(f"{name}:control", control.status is CheckStatus.FAIL,
                            "sign-flipped |w|^2 term is rejected"))
        mirror = verify_2O(W, convention=RicciConvention.SPHERE_POSITIVE)
        parts.append(_exact(f"{name}:sphere-positive", mirror.status is CheckStatus.FAIL,
                            "these signs need the weyl-dirac Ricci contraction"))
    return combine("2O", parts, "R_hat = R - 6 div w + 6 |w|^2 (Ricci convention weyl-dirac)")


def check_R21(w_sign: int = 1) -> CheckResult:
    I = A.dirac_integrand().drop(Gen.B4, Gen.LM)
    out = A.substitute_w_form(I, w_sign=w_sign, integrable=True)
    contrib = A.w_form_contributions(I, w_sign)
    target = A.Integrand({Gen.R: -1, Gen.DB2: A.SIGMA + 6})
    parts = [
        _exact("reduction", out.same_terms(target), f"reduced integrand: {out}"),
        _exact("cancel", is_zero(contrib[Gen.B2W2] + contrib[Gen.BWDB]),
               f"{contrib[Gen.B2W2]} + ({contrib[Gen.BWDB]}) = 0"),
    ]
    for s in catalog_metrics():
        g = s.metric
        beta = s.chart.field("beta")
        w = pure_gauge_w(s.chart, w_sign)
        db2 = contract_with_inverse(g, gradient(s.chart, beta), gradient(s.chart, beta))
        w2 = beta ** 2 * contract_with_inverse(g, w, w)
        bwdb = beta * contract_with_inverse(g, w, gradient(s.chart, beta))
        parts.append(from_equiv(f"{s.name}:|w|^2", equiv(w2, 4 * db2), "beta^2 |w|^2 = 4 (d beta)^2"))
        parts.append(from_equiv(f"{s.name}:w.dbeta", equiv(bwdb, -2 * db2), "beta w.d beta = -2 (d beta)^2"))
    return combine("R2.1", parts, "integrable Weyl-Dirac reduction to -beta^2 R + (sigma+6)(d beta)^2")


def check_2L(w_sign: int = 1) -> CheckResult:
    chart = Chart(("t", "x", "y", "z"))
    beta = chart.field("beta")
    w = pure_gauge_w(chart, w_sign)
    c2 = A.compose_2L(w, 2, beta)
    c0 = A.compose_2L(w, 0, beta)
    cc = A.compose_2L(w, A.C, beta)
    expected = TensorField.covector(chart, [(A.C - 2) * diff(beta, x) / beta for x in chart.coords])
    parts = [
        _exact("c=2", c2.is_zero(), "W = 0"),
        _exact("c=0", c0 == w, "W = w"),
        _exact("general", cc == expected, "W = (c-2) d log(beta)"),
        _exact("integrable", is_integrable(cc), "W_{mn} = 0 for every c"),
    ]
    return combine("2L", parts, "W = w + c d log(beta)")


def check_I1(w_sign: int = 1) -> CheckResult:
    parts = []
    target = A.Integrand({Gen.R: 1 / A.M ** 2})
    for conv in (RicciConvention.SPHERE_POSITIVE, RicciConvention.WEYL_DIRAC):
        steps = dict(A.cgr_I1_steps(w_sign, conv))
        final = steps["w-form"]
        residual = {g.name: str(final[g]) for g in (Gen.DB2, Gen.B2W2, Gen.BWDB, Gen.B2DIVW)
                    if not is_zero(final[g])}
        ok = final[Gen.R] == target[Gen.R] and not residual and len(final.ledger) == 1
        parts.append(_exact(conv.value, ok, f"I1 = {final}",
                            residual=residual, ledger=[str(t) for t in final.ledger]))
    ibp = dict(A.cgr_I1_steps(w_sign, RicciConvention.WEYL_DIRAC))["ibp"]
    parts.append(_exact("ibp", ibp[Gen.BWDB] == canonical(12 / A.M ** 2),
                        f"after integration by parts: {ibp}"))
    return combine("I1", parts, "first CGR integral reduces to (1/m^2) beta^2 R")


def check_I2() -> CheckResult:
    I2 = A.cgr_I2()
    expected = canonical(-4 * (A.ALPHA - parse_expr("3/2")) / A.M ** 2)
    parts = [
        _exact("general", I2.support() == {Gen.DB2} and I2[Gen.DB2] == expected, f"I2 = {I2}"),
        _exact("alpha=3/2", A.cgr_I2(parse_expr("3/2")).support() == frozenset(), "vanishes at alpha = 3/2"),
        _exact("gamma", A.cgr_I2(keep_gamma=True)[Gen.DB2] == canonical(-4 * A.GAMMA / A.M ** 2),
               "-4 gamma / m^2"),
    ]
    return combine("I2", parts, "second CGR integral is -(4 gamma / m^2)(d beta)^2")


def check_2_16() -> CheckResult:
    cgr = A.assemble_cgr()
    rosen = A.rosen_integrand(cosmological=False, matter=False)
    res = A.match_actions(cgr, rosen)
    sigma = res.solution.get("sigma")
    parts = [_exact("sigma", res.ok and sigma == canonical(-4 * A.ALPHA), f"sigma = {sigma}")]
    if res.ok:
        same = A.normalized(rosen.subs({"sigma": sigma})).same_terms(A.normalized(cgr))
        parts.append(_exact("identical", same, "integrands agree after substitution"))
    r0 = A.match_actions(A.assemble_cgr(0), rosen)
    parts.append(_exact("alpha=0", r0.ok and r0.solution.get("sigma") == canonical(0),
                        f"sigma = {r0.solution.get('sigma')} (Dirac choice)"))
    rl = A.match_actions(cgr, A.rosen_integrand(matter=False))
    parts.append(_exact("span", rl.status is A.MatchStatus.NO_SOLUTION, rl.reason))
    return combine("2.16", parts, "CGR matches the integrable Weyl-Dirac form for sigma = -4 alpha")


# -- holonomy ---------------------------------------------------------------

def check_2A(steps: int = 4096) -> CheckResult:
    parts = []
    for name in ("sphere2", "gradient_weyl", "square_weyl"):
        s = catalog(name)
        loop = s.loop_path(steps)
        r = transport(christoffel(s.metric), loop, s.B0, g=s.metric, constants=s.constants)
        parts.append(_bound(name, abs(r.final_length - r.initial_length), 1e-9, "|B| drift"))
    return combine("2A", parts, "Levi-Civita transport preserves length")


def rk4_order_study(Ns=(1024, 2048, 4096)) -> dict:
    s = catalog("sphere2")
    conn = christoffel(s.metric)
    theta0 = math.pi / 3
    exact_angle = (-2 * math.pi * math.cos(theta0)) % (2 * math.pi)
    errors, angles = [], []
    for N in Ns:
        r = transport(conn, s.loop_path(N), s.B0, g=s.metric)
        c, sn = math.cos(exact_angle), math.sin(exact_angle)
        exact = np.array([c * s.B0[0] - sn * s.B0[1] * math.sin(theta0),
                          (sn * s.B0[0]) / math.sin(theta0) + c * s.B0[1]])
        errors.append(float(np.linalg.norm(r.final - exact)))
        angles.append(r.rotation_angle)
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(len(Ns) - 1)]
    return {"N": list(Ns), "errors": errors, "orders": orders, "angles": angles,
            "exact_angle": exact_angle}


def defect_study(eps_list=(2e-2, 1e-2, 5e-3)) -> dict:
    s = catalog("sphere2")
    conn = christoffel(s.metric)
    errs, deltas, preds, flipped = [], [], [], []
    for eps in eps_list:
        r = holonomy_defect(conn, (1.0, 0.3), eps, (0, 1), (0.3, 0.8))
        rr = holonomy_defect(conn, (1.0, 0.3), eps, (0, 1), (0.3, 0.8), reverse=True)
        delta = r.extra["delta"]
        errs.append(float(np.linalg.norm(delta - r.predicted_delta)))
        deltas.append(delta.tolist())
        preds.append(r.predicted_delta.tolist())
        flipped.append(float(np.linalg.norm(rr.extra["delta"] + r.predicted_delta)))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(eps_list) - 1)]
    return {"eps": list(eps_list), "errors": errs, "orders": orders, "delta": deltas,
            "predicted": preds, "reversed_errors": flipped}


def check_2C() -> CheckResult:
    st = rk4_order_study()
    df = defect_study()
    angle_err = abs(st["angles"][-1] - math.pi)
    parts = [
        _bound("angle", angle_err, 1e-6, "latitude pi/3 rotation - pi at N=4096"),
        _exact("rk4-order", min(st["orders"]) >= 3.8,
               "RK4 order " + ", ".join(f"{o:.2f}" for o in st["orders"]), errors=st["errors"]),
        _exact("defect-order", min(df["orders"]) >= 2.8,
               "defect error order " + ", ".join(f"{o:.2f}" for o in df["orders"]), errors=df["errors"]),
        _bound("defect-ratio", df["errors"][-1] / df["eps"][-1] ** 2, 1e-2,
               "|dB - B R eps^2| / eps^2 at eps=5e-3"),
        _exact("orientation", all(e < 0.05 * np.linalg.norm(p) for e, p in zip(df["reversed_errors"], df["predicted"])),
               "reversed loop flips the leading term"),
    ]
    return combine("2C", parts, "holonomy around small loops follows the curvature")


def _weyl_flat(k) -> WeylStructure:
    chart = Chart(("x", "y"))
    g = Metric.diagonal(chart, [1, 1])
    return WeylStructure(g, TensorField.covector(chart, [0, canonical(parse_expr(str(k)) * Sym("x"))]))


def area_study(scales=(1.0, 0.5, 0.25), k: float = 0.1) -> dict:
    s = catalog("square_weyl")
    loop = s.loop_path()
    errs = []
    for eps in scales:
        r = length_transport(_weyl_flat(parse_expr(f"{k}*{eps}")), loop)
        errs.append(abs(r.length_ratio - 1.0 - r.predicted_delta))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(scales) - 1)]
    return {"scales": list(scales), "errors": errs, "orders": orders}


def check_2E() -> CheckResult:
    st = area_study()
    return _exact("2E", min(st["orders"]) >= 1.8,
                  "first-order area prediction error order " + ", ".join(f"{o:.2f}" for o in st["orders"]),
                  **st)


def check_2G() -> CheckResult:
    sq = catalog("square_weyl")
    W = sq.weyl_structure()
    loop = sq.loop_path()
    r = length_transport(W, loop, 1.0, constants=sq.constants)
    gw = catalog("gradient_weyl")
    rg = length_transport(gw.weyl_structure(), gw.loop_path(), 1.0)
    full = transport(W.connection, loop, sq.B0, g=sq.metric, constants=sq.constants)
    parts = [
        _bound("square", abs(r.length_ratio - math.exp(0.1)), 1e-8, "B_final/B_0 - e^0.1"),
        _bound("exp-law", abs(r.length_ratio - r.extra["exact_ratio"]), 1e-8, "ratio - exp(loop integral of w)"),
        _bound("integrable", abs(rg.length_ratio - 1.0), 1e-9, "gradient w: ratio - 1"),
        _bound("vector", abs(full.length_ratio - r.length_ratio), 1e-6,
               "Weyl-connection vector transport vs length law"),
    ]
    return combine("2G", parts, "closed-loop length change is exp(loop integral of w)")


# -- driver -----------------------------------------------------------------

def build_checks(flip_w_sign: bool = False) -> list[tuple[str, Callable[[], CheckResult]]]:
    s = -1 if flip_w_sign else 1
    cat = catalog_metrics
    return [
        ("2B", lambda: check_2B(cat())),
        ("2.3", check_2_3),
        ("2D", lambda: check_2D(cat())),
        ("2F", check_2F),
        ("2K", check_2K),
        ("2O", check_2O),
        ("R2.1", lambda: check_R21(s)),
        ("2L", lambda: check_2L(s)),
        ("I1", lambda: check_I1(s)),
        ("I2", check_I2),
        ("2.16", check_2_16),
        ("2A", check_2A),
        ("2C", check_2C),
        ("2E", check_2E),
        ("2G", check_2G),
    ]


def verify_paper(flip_w_sign: bool = False, only: Iterable[str] | None = None) -> Report:
    wanted = set(only) if only else None
    if wanted:
        unknown = wanted - set(CHECK_IDS)
        if unknown:
            raise ValueError(f"unknown check id(s): {', '.join(sorted(unknown))}")
    report = Report()
    for check_id, fn in build_checks(flip_w_sign):
        if wanted is None or check_id in wanted:
            report.add(fn())
    return report
