"""Weyl connection, length curvature, gauge transformations and the Weyl scalar."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .report import CheckResult, from_equiv
from .riemann import (Connection, ConnectionKind, RicciConvention, christoffel,
                      covariant_deriv, divergence, ricci, riemann)
from .symbolic import (Equivalence, EquivResult, Expr, as_expr, canonical, diff, equiv, func,
                       is_zero)
from .symbolic.canonical import to_rf, to_tree
from .tensor import (DOWN, Chart, Metric, TensorError, TensorField, _rf_sum,
                     contract_with_inverse, gradient, raise_index)

# Weyl weights: a quantity of weight n picks up exp(n*lambda) under a gauge change.
DEFAULT_WEIGHTS: dict[str, int] = {
    "g": 2,
    "g_inv": -2,
    "sqrt_g": 4,
    "Gamma_hat": 0,
    "B": 1,
    "beta": -1,
    "R_hat": -2,
}


def weyl_connection(g: Metric, w: TensorField) -> Connection:
    """Gamma^l_{mn} + g_{mn} w^l - delta^l_n w_m - delta^l_m w_n."""
    if w.variance != (DOWN,):
        raise TensorError("the Weyl vector must be a covector")
    if w.chart != g.chart:
        raise TensorError("Weyl vector and metric live on different charts")
    d = g.dim
    gamma = christoffel(g)
    w_up = raise_index(w, 0, g)
    comps = {}
    for l in range(d):
        for m in range(d):
            for n in range(m, d):
                terms = [to_rf(gamma[l, m, n])]
                if not is_zero(g[m, n]) and not is_zero(w_up[l]):
                    terms.append(to_rf(g[m, n]) * to_rf(w_up[l]))
                if l == n:
                    terms.append(-to_rf(w[m]))
                if l == m:
                    terms.append(-to_rf(w[n]))
                val = to_tree(_rf_sum(terms))
                comps[l, m, n] = val
                comps[l, n, m] = val
    return Connection(g.chart, comps, ConnectionKind.WEYL)


def length_curvature(w: TensorField) -> TensorField:
    """W_{mn} = d_n w_m - d_m w_n."""
    if w.variance != (DOWN,):
        raise TensorError("length curvature needs a covector")
    chart = w.chart
    d = chart.dim
    dw = [[diff(w[m], chart.coords[n]) for n in range(d)] for m in range(d)]
    comps = [dw[m][n] - dw[n][m] for m in range(d) for n in range(d)]
    return TensorField(chart, (DOWN, DOWN), comps, symmetry=((0, 1, -1),), name="W")


def is_integrable(w: TensorField) -> bool:
    return length_curvature(w).is_zero()


@dataclass(frozen=True)
class GaugeFunction:
    """The local gauge parameter lambda(x)."""

    lam: Expr

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", canonical(as_expr(self.lam)))

    def factor(self, weight: int) -> Expr:
        return func("exp", self.lam * weight)


@dataclass(frozen=True)
class WeylStructure:
    """A metric with a Weyl covector, a weight table and optional weighted scalars.

    ``quantities`` holds extra named scalars (such as ``beta``) that ride
    along under gauge transformations; ``unweighted`` lists names that had
    no weight in the table the last time a transformation was applied.
    """

    g: Metric
    w: TensorField
    weights: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    quantities: Mapping[str, Expr] = field(default_factory=dict)
    unweighted: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.w.variance != (DOWN,) or self.w.chart != self.g.chart:
            raise TensorError("w must be a covector on the metric's chart")
        for key in ("g", "g_inv", "sqrt_g", "Gamma_hat", "B"):
            if key not in self.weights:
                raise TensorError(f"weight table lacks {key!r}")

    @property
    def chart(self) -> Chart:
        return self.g.chart

    @cached_property
    def connection(self) -> Connection:
        # frozen inputs, so this can never go stale
        return weyl_connection(self.g, self.w)

    @classmethod
    def symbolic(cls, g: Metric, prefix: str = "w", **kwargs) -> "WeylStructure":
        """Weyl covector with one free field component per coordinate."""
        w = TensorField.covector(g.chart, [g.chart.field(f"{prefix}{i}") for i in range(g.dim)],
                                 name=prefix)
        return cls(g, w, **kwargs)


def colon_deriv(t: TensorField, W: WeylStructure) -> TensorField:
    """Covariant derivative built from the Weyl connection."""
    return covariant_deriv(t, W.connection)


def gauge_transform(W: WeylStructure, gauge: GaugeFunction | Expr | str) -> WeylStructure:
    """g -> e^{2 lam} g, w -> w + d lam, weighted scalars -> e^{n lam} q."""
    if not isinstance(gauge, GaugeFunction):
        gauge = GaugeFunction(gauge)
    chart = W.chart
    d = chart.dim
    scale = gauge.factor(W.weights["g"])
    rows = [[W.g[i, j] * scale for j in range(d)] for i in range(d)]
    g2 = Metric(chart, rows, name=W.g.name, sample_overrides=W.g.sample_overrides)
    w2 = W.w + gradient(chart, gauge.lam)
    quantities = {}
    flagged = []
    for name, value in W.quantities.items():
        n = W.weights.get(name)
        if n is None:
            quantities[name] = value
            flagged.append(name)
        else:
            quantities[name] = canonical(value * gauge.factor(n))
    return WeylStructure(g2, TensorField.covector(chart, w2.values(), name=W.w.name),
                         dict(W.weights), quantities, tuple(flagged))


def weyl_scalar_curvature(W: WeylStructure,
                          convention: RicciConvention = RicciConvention.SPHERE_POSITIVE) -> Expr:
    """Scalar curvature of the Weyl connection, contracted with g^{sn}."""
    return contract_with_inverse(W.g, ricci(riemann(W.connection), convention))


def w_norm2(W: WeylStructure) -> Expr:
    return contract_with_inverse(W.g, W.w, W.w)


def weyl_identity_rhs(W: WeylStructure, convention: RicciConvention = RicciConvention.WEYL_DIRAC,
                      w2_sign: int = 1) -> Expr:
    """R - 6 div w + 6 |w|^2, with R in the same Ricci convention as the left side."""
    R = contract_with_inverse(W.g, ricci(riemann(christoffel(W.g)), convention))
    div = divergence(W.g, W.w)
    return canonical(R - 6 * div + 6 * w2_sign * w_norm2(W))


def verify_2O(W: WeylStructure, convention: RicciConvention = RicciConvention.WEYL_DIRAC,
              w2_sign: int = 1, check_id: str = "2O") -> CheckResult:
    """Compare the Weyl scalar with R - 6 div w + 6 |w|^2."""
    lhs = weyl_scalar_curvature(W, convention)
    rhs = weyl_identity_rhs(W, convention, w2_sign)
    res = equiv(lhs, rhs)
    sign = "+" if w2_sign > 0 else "-"
    return from_equiv(check_id, res,
                      f"R_hat = R - 6 div w {sign} 6 |w|^2 (Ricci convention {convention.value})",
                      convention=convention.value)


def verify_2D(W: WeylStructure, check_id: str = "2D") -> CheckResult:
    """g^{mn}_{:l} = -2 g^{mn} w_l, exactly."""
    lhs = colon_deriv(W.g.inverse, W)
    d = W.g.dim
    gi = W.g.inverse
    bad = []
    for m in range(d):
        for n in range(d):
            for l in range(d):
                if lhs[m, n, l] != canonical(-2 * gi[m, n] * W.w[l]):
                    bad.append((m, n, l))
    res = EquivResult(Equivalence.UNEQUAL if bad else Equivalence.EQUAL)
    return from_equiv(check_id, res, "g^{mn}_{:l} = -2 g^{mn} w_l", mismatches=bad)
