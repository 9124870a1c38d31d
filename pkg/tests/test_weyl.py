"""Weyl connection, length curvature, gauge transformations and the Weyl scalar."""

import numpy as np
import pytest
from hypothesis import given

from weyldirac.report import CheckStatus
from weyldirac.riemann import RicciConvention, christoffel, covariant_deriv, divergence, scalar_curvature
from weyldirac.scenario import catalog, catalog_metrics
from weyldirac.symbolic import Equivalence, Num, equiv, eval_numeric, func, parse_expr
from weyldirac.tensor import Chart, Metric, TensorError, TensorField, contract_with_inverse, gradient
from weyldirac.verify import pure_gauge_w
from weyldirac.weyl import (DEFAULT_WEIGHTS, GaugeFunction, WeylStructure, colon_deriv, gauge_transform,
                            is_integrable, length_curvature, verify_2D, verify_2O, w_norm2,
                            weyl_connection, weyl_scalar_curvature)

from . import oracles
from .strategies import expr_text

P = parse_expr
FLAT2 = Chart(("x", "y"))


def _flat(chart):
    return Metric.diagonal(chart, [1] * chart.dim)


class TestConnection:
    def test_zero_w_is_levi_civita(self):
        g = catalog("sphere2").metric
        W = weyl_connection(g, TensorField.covector(g.chart, [0, 0]))
        assert W.gamma == christoffel(g).gamma

    def test_flat_closed_form(self):
        g = catalog("flat4").metric
        W = WeylStructure.symbolic(g)
        w = W.w
        eta = [-1, 1, 1, 1]
        for l in range(4):
            for m in range(4):
                for n in range(4):
                    expected = (eta[m] * eta[l] * w[l] if m == n else Num(0)) \
                        - (w[m] if l == n else 0) - (w[n] if l == m else 0)
                    assert W.connection[l, m, n] == expected + Num(0)

    def test_sphere_numeric(self):
        g = catalog("sphere2").metric
        w = TensorField.covector(g.chart, [P("theta^2 + 1"), 0])
        conn = weyl_connection(g, w)
        th = 0.9
        gam = oracles.christoffel_fd(oracles.sphere, (th, 0.0))
        G = oracles.sphere((th, 0.0))
        wl = np.array([th ** 2 + 1, 0.0])
        wu = np.linalg.solve(G, wl)
        d = np.eye(2)
        expected = gam + np.einsum("mn,l->lmn", G, wu) - np.einsum("ln,m->lmn", d, wl) \
            - np.einsum("lm,n->lmn", d, wl)
        for l in range(2):
            for m in range(2):
                for n in range(2):
                    assert eval_numeric(conn[l, m, n], {"theta": th, "phi": 0.0}) == \
                        pytest.approx(expected[l, m, n], abs=1e-8)

    def test_rejects_vector(self):
        g = _flat(FLAT2)
        with pytest.raises(TensorError):
            weyl_connection(g, TensorField.vector(FLAT2, [0, 1]))


class TestColonDerivative:
    @pytest.mark.parametrize("scenario", catalog_metrics(), ids=lambda s: s.name)
    def test_inverse_metric_law(self, scenario):
        r = verify_2D(WeylStructure.symbolic(scenario.metric))
        assert r.status is CheckStatus.PASS

    def test_broken_law_is_detected(self):
        g = catalog("polar2").metric
        W = WeylStructure.symbolic(g)
        wrong = WeylStructure(g, W.w.scaled(-1))
        # feed the colon derivative of one structure to the law of the other
        lhs = colon_deriv(g.inverse, wrong)
        assert any(lhs[m, n, l] != -2 * g.inverse[m, n] * W.w[l] + Num(0)
                   for m in range(2) for n in range(2) for l in range(2))

    def test_zero_w_is_semicolon(self):
        g = catalog("sphere2").metric
        W = WeylStructure(g, TensorField.covector(g.chart, [0, 0]))
        B = TensorField.vector(g.chart, [P("sin(phi)"), P("theta")])
        assert colon_deriv(B, W) == covariant_deriv(B, christoffel(g))

    def test_scalar_is_comma(self):
        W = WeylStructure.symbolic(catalog("sphere2").metric)
        f = TensorField.scalar(W.chart, P("theta*phi"))
        assert colon_deriv(f, W).values() == (P("phi"), P("theta"))


class TestLengthCurvature:
    def test_linear_example(self):
        w = TensorField.covector(FLAT2, [0, P("k*x")])
        W = length_curvature(w)
        assert W[0, 1] == P("-k") and W[1, 0] == P("k")
        assert not is_integrable(w)

    def test_zero(self):
        assert is_integrable(TensorField.covector(FLAT2, [0, 0]))

    @pytest.mark.parametrize("w_sign", [1, -1])
    def test_pure_gauge_weyl_vector(self, w_sign):
        assert is_integrable(pure_gauge_w(Chart(("t", "x", "y", "z")), w_sign))

    @given(expr_text)
    def test_gradients_are_integrable(self, text):
        assert is_integrable(gradient(FLAT2, P(text)))

    def test_field_potentials(self):
        chart = Chart(("t", "x", "y", "z"))
        fields = {"beta": chart.coords, "psi": chart.coords}
        for text in ("c*log(beta)", "psi*beta^2", "exp(psi)*sin(t*x)", "sqrt(beta)*z"):
            assert length_curvature(gradient(chart, P(text, fields))).is_zero()


class TestGauge:
    def test_zero_gauge_is_identity(self):
        W = WeylStructure.symbolic(catalog("conf4").metric, quantities={"beta": P("b")})
        W2 = gauge_transform(W, 0)
        assert W2.g.g == W.g.g and W2.w == W.w and W2.quantities == W.quantities

    def test_default_weights(self):
        for key, n in {"g": 2, "g_inv": -2, "sqrt_g": 4, "Gamma_hat": 0, "B": 1}.items():
            assert DEFAULT_WEIGHTS[key] == n

    def test_weight_table_required(self):
        with pytest.raises(TensorError):
            WeylStructure(_flat(FLAT2), TensorField.covector(FLAT2, [0, 0]), weights={"g": 2})

    @pytest.mark.parametrize("name", ["flat4", "conf4"])
    def test_transformation_laws(self, name):
        g = catalog(name).metric
        chart = g.chart
        lam = chart.field("mu")
        W = WeylStructure.symbolic(g)
        W2 = gauge_transform(W, GaugeFunction(lam))
        assert W2.g.g == W.g.g.map(lambda c: c * func("exp", 2 * lam))
        assert W2.w == W.w + gradient(chart, lam)
        assert W2.connection == W.connection
        assert equiv(W2.g.volume_density, func("exp", 4 * lam) * W.g.volume_density).status \
            is not Equivalence.UNEQUAL
        assert weyl_scalar_curvature(W2) == weyl_scalar_curvature(W) * func("exp", -2 * lam) + Num(0)

    def test_group_law(self):
        g = catalog("conf4").metric
        chart = g.chart
        W = WeylStructure.symbolic(g, quantities={"beta": chart.field("beta")})
        l1, l2 = chart.field("mu"), P("t*x + sin(z)")
        a = gauge_transform(gauge_transform(W, l1), l2)
        b = gauge_transform(W, l1 + l2)
        assert a.g.g == b.g.g and a.w == b.w and a.quantities == b.quantities

    def test_unknown_quantity_flagged(self):
        W = WeylStructure.symbolic(_flat(FLAT2), quantities={"beta": P("b"), "Q": P("q")})
        W2 = gauge_transform(W, P("x"))
        assert W2.quantities["Q"] == P("q")
        assert W2.quantities["beta"] == P("b*exp(-x)")
        assert W2.unweighted == ("Q",)


class TestWeylScalar:
    def test_zero_w(self):
        g = catalog("sphere2").metric
        W = WeylStructure(g, TensorField.covector(g.chart, [0, 0]))
        assert weyl_scalar_curvature(W) == scalar_curvature(g)

    @pytest.mark.parametrize("name", ["conf4", "m4"])
    def test_identity_weyl_dirac(self, name):
        W = WeylStructure.symbolic(catalog(name).metric)
        r = verify_2O(W)
        assert r.status is CheckStatus.PASS
        assert r.payload["equivalence"] == "EQUAL"

    @pytest.mark.parametrize("name", ["conf4", "m4"])
    def test_sign_flipped_control_fails_with_witness(self, name):
        W = WeylStructure.symbolic(catalog(name).metric)
        r = verify_2O(W, w2_sign=-1)
        assert r.status is CheckStatus.FAIL
        assert r.payload.get("witness")

    def test_sphere_positive_form_has_opposite_signs(self):
        W = WeylStructure.symbolic(catalog("m4").metric)
        lhs = weyl_scalar_curvature(W, RicciConvention.SPHERE_POSITIVE)
        R = scalar_curvature(W.g)
        assert lhs == R + 6 * divergence(W.g, W.w) - 6 * w_norm2(W) + Num(0)

    def test_flat_zero_w_trivial(self):
        g = catalog("flat4").metric
        W = WeylStructure(g, TensorField.covector(g.chart, [0] * 4))
        assert verify_2O(W).status is CheckStatus.PASS

    @pytest.mark.parametrize("w_sign", [1, -1])
    def test_norm_bookkeeping(self, w_sign):
        for s in catalog_metrics():
            beta = s.chart.field("beta")
            w = pure_gauge_w(s.chart, w_sign)
            db = gradient(s.chart, beta)
            lhs = beta ** 2 * contract_with_inverse(s.metric, w, w)
            assert equiv(lhs, 4 * contract_with_inverse(s.metric, db, db)).status is Equivalence.EQUAL
