"""Charts, tensor fields and metrics."""

import pytest

from weyldirac.scenario import catalog, catalog_metrics
from weyldirac.symbolic import Equivalence, Num, equiv, eval_numeric, parse_expr
from weyldirac.tensor import (DOWN, UP, Chart, Metric, SingularMetricError, SymmetryError, TensorError,
                              TensorField, comma, inverse_metric, lower_index, partial_deriv, raise_index)

P = parse_expr
SPHERE = Chart(("theta", "phi"))


def _identity(d):
    return [[1 if i == j else 0 for j in range(d)] for i in range(d)]


class TestChart:
    def test_dimension_bounds(self):
        with pytest.raises(TensorError):
            Chart(())
        with pytest.raises(TensorError):
            Chart(tuple(f"x{i}" for i in range(9)))
        assert Chart(tuple(f"x{i}" for i in range(8))).dim == 8

    def test_distinct_coordinates(self):
        with pytest.raises(TensorError, match="distinct"):
            Chart(("x", "x"))

    def test_default_sample_point(self):
        assert Chart(("x", "y")).sample_point() == {"x": 0.7, "y": 0.7}


class TestTensorField:
    def test_component_count(self):
        with pytest.raises(TensorError, match="expected 4 components"):
            TensorField(Chart(("x", "y")), (DOWN, DOWN), [1, 2, 3])

    def test_declared_symmetry_enforced(self):
        chart = Chart(("x", "y"))
        with pytest.raises(SymmetryError):
            TensorField(chart, (DOWN, DOWN), [0, "x", "y", 0], symmetry=((0, 1, 1),))
        TensorField(chart, (DOWN, DOWN), [0, P("x"), P("-x"), 0], symmetry=((0, 1, -1),))

    def test_metric_rejects_asymmetric_rows(self):
        with pytest.raises(SymmetryError):
            Metric(Chart(("x", "y")), [[1, P("x")], [P("y"), 1]])

    def test_singular_metric_rejected(self):
        with pytest.raises(SingularMetricError):
            Metric(Chart(("x", "y")), [[1, 1], [1, 1]])


class TestInverse:
    def test_sphere(self):
        g = Metric.diagonal(SPHERE, [1, P("sin(theta)^2")])
        inv = inverse_metric(g)
        assert inv[0, 0] == Num(1) and inv[0, 1] == Num(0)
        assert inv[1, 1] == P("1/sin(theta)^2")

    def test_general_2d_adjugate(self):
        chart = Chart(("x", "y"))
        g = Metric(chart, [[P("a"), P("b")], [P("b"), P("c")]], sample_overrides={"a": 2.0})
        inv = g.inverse
        det = P("a*c - b^2")
        assert inv[0, 0] == P("c") / det
        assert inv[0, 1] == -P("b") / det
        assert inv[1, 1] == P("a") / det

    @pytest.mark.parametrize("scenario", catalog_metrics(), ids=lambda s: s.name)
    def test_catalog_inverse_is_exact(self, scenario):
        g = scenario.metric
        d = g.dim
        for i in range(d):
            for j in range(d):
                s = sum((g.inverse[i, k] * g[k, j] for k in range(d)), Num(0))
                assert equiv(s, Num(int(i == j))).status is Equivalence.EQUAL

    @pytest.mark.parametrize("scenario", catalog_metrics(), ids=lambda s: s.name)
    def test_catalog_inverse_numeric_spot_check(self, scenario):
        import numpy as np
        g = scenario.metric
        point = scenario.chart.sample_point(g.g.values(), g.sample_overrides)
        G = np.array([[eval_numeric(g[i, j], point) for j in range(g.dim)] for i in range(g.dim)])
        Gi = np.array([[eval_numeric(g.inverse[i, j], point) for j in range(g.dim)] for i in range(g.dim)])
        assert np.allclose(G @ Gi, np.eye(g.dim), atol=1e-12)


class TestRaiseLower:
    def test_sphere_vector(self):
        g = Metric.diagonal(SPHERE, [1, P("sin(theta)^2")])
        w = TensorField.covector(SPHERE, [0, 1])
        up = raise_index(w, 0, g)
        assert up.variance == (UP,)
        assert up[0] == Num(0) and up[1] == P("sin(theta)^-2")

    def test_flat_is_identity(self):
        chart = Chart(("x", "y", "z"))
        g = Metric(chart, _identity(3))
        w = TensorField.covector(chart, [P("x*y"), P("exp(z)"), 3])
        assert raise_index(w, 0, g).values() == w.values()

    @pytest.mark.parametrize("scenario", catalog_metrics(), ids=lambda s: s.name)
    def test_round_trip(self, scenario):
        chart, g = scenario.chart, scenario.metric
        w = TensorField.covector(chart, [chart.field(f"w{i}") for i in range(chart.dim)])
        assert lower_index(raise_index(w, 0, g), 0, g) == w
        t = TensorField(chart, (DOWN, DOWN), [P(f"{i}*{chart.coords[j]}") for i in range(chart.dim)
                                              for j in range(chart.dim)])
        assert lower_index(raise_index(t, 1, g), 1, g) == t

    def test_wrong_variance(self):
        g = Metric.diagonal(SPHERE, [1, P("sin(theta)^2")])
        with pytest.raises(TensorError):
            lower_index(TensorField.covector(SPHERE, [0, 1]), 0, g)

    def test_slot_out_of_range(self):
        g = Metric.diagonal(SPHERE, [1, P("sin(theta)^2")])
        with pytest.raises((TensorError, IndexError)):
            raise_index(TensorField.covector(SPHERE, [0, 1]), 3, g)


class TestPartial:
    def test_metric_component(self):
        g = Metric.diagonal(SPHERE, [1, P("sin(theta)^2")])
        assert partial_deriv(g.g, "theta")[1, 1] == P("2*sin(theta)*cos(theta)")

    def test_constant_tensor(self):
        chart = Chart(("x", "y"))
        assert partial_deriv(TensorField.covector(chart, [3, P("1/2")]), 0).is_zero()

    def test_linear_weyl_vector(self):
        chart = Chart(("x", "y"))
        w = TensorField.covector(chart, [0, P("k*x")])
        assert partial_deriv(w, "x").values() == (Num(0), P("k"))

    @pytest.mark.parametrize("name", ["conf4", "m4", "schw4"])
    def test_partials_commute(self, name):
        g = catalog(name).metric.g
        for a in range(4):
            for b in range(a + 1, 4):
                assert partial_deriv(partial_deriv(g, a), b) == partial_deriv(partial_deriv(g, b), a)

    def test_comma_appends_down_slot(self):
        chart = Chart(("x", "y"))
        v = TensorField.vector(chart, [P("x*y"), P("y^2")])
        c = comma(v)
        assert c.variance == (UP, DOWN)
        assert c[1, 1] == P("2*y") and c[0, 0] == P("y")
