"""Levi-Civita connection, covariant derivatives and curvature."""

from __future__ import annotations

import enum
import itertools
from fractions import Fraction

from .symbolic import Expr, diff, is_zero
from .symbolic.canonical import RF, to_rf, to_tree
from .tensor import (DOWN, UP, Chart, Metric, TensorError, TensorField, _rf_sum,
                     contract_with_inverse)


_HALF = Fraction(1, 2)


class ConnectionKind(enum.Enum):
    LEVI_CIVITA = "levi-civita"
    WEYL = "weyl"


class RicciConvention(enum.Enum):
    """Which Riemann slot is contracted to form the Ricci tensor.

    SPHERE_POSITIVE: R_{sn} = R^l_{s l n}; the unit 2-sphere has R = +2.
    WEYL_DIRAC: R_{sn} = R^l_{s n l}, the opposite overall sign, under which
    -beta^2 R + 6 (d beta)^2 is Weyl-gauge invariant up to a divergence.
    """

    SPHERE_POSITIVE = "sphere-positive"
    WEYL_DIRAC = "weyl-dirac"

    @property
    def sign(self) -> int:
        return 1 if self is RicciConvention.SPHERE_POSITIVE else -1


class Connection:
    """Symmetric affine connection; ``self[l, m, n]`` is Gamma^l_{mn}."""

    def __init__(self, chart: Chart, components, kind: ConnectionKind = ConnectionKind.LEVI_CIVITA,
                 validate: bool = True) -> None:
        self.chart = chart
        self.kind = kind
        self.gamma = TensorField(chart, (UP, DOWN, DOWN), components,
                                 symmetry=((1, 2, 1),), name="Gamma", validate=validate)

    def __getitem__(self, idx) -> Expr:
        return self.gamma[idx]

    @property
    def dim(self) -> int:
        return self.chart.dim

    def rf(self, l: int, m: int, n: int) -> RF:
        return to_rf(self.gamma[l, m, n])

    def __eq__(self, other) -> bool:
        return isinstance(other, Connection) and self.gamma == other.gamma

    def __hash__(self) -> int:
        return hash(self.gamma)

    def nonzero(self):
        return self.gamma.nonzero()


def christoffel(g: Metric) -> Connection:
    """Gamma^l_{mn} = 1/2 g^{ls} (d_n g_{ms} + d_m g_{ns} - d_s g_{mn})."""
    d = g.dim
    coords = g.chart.coords
    dg = [[[to_rf(diff(g[m, n], coords[s])) for n in range(d)] for m in range(d)] for s in range(d)]
    first = {}
    for s in range(d):
        for m in range(d):
            for n in range(m, d):
                first[s, m, n] = (dg[n][m][s] + dg[m][n][s] - dg[s][m][n]).scale(_HALF)
    gi = g.inverse
    comps = {}
    for l in range(d):
        for m in range(d):
            for n in range(m, d):
                terms = []
                for s in range(d):
                    gls = gi[l, s]
                    if is_zero(gls) or first[s, m, n].is_zero():
                        continue
                    terms.append(to_rf(gls) * first[s, m, n])
                val = to_tree(_rf_sum(terms))
                comps[l, m, n] = val
                comps[l, n, m] = val
    return Connection(g.chart, comps, ConnectionKind.LEVI_CIVITA)


def covariant_deriv(t: TensorField, conn: Connection) -> TensorField:
    """One extra covariant slot; one correction term per index (rank <= 2).

    B^m_{;n} = d_n B^m + B^s Gamma^m_{sn},  B_{m;n} = d_n B_m - B_s Gamma^s_{mn}.
    """
    if t.rank > 2:
        raise TensorError(f"covariant derivative supports rank <= 2, got {t.rank}")
    if t.chart != conn.chart:
        raise TensorError("tensor and connection live on different charts")
    d = t.chart.dim
    coords = t.chart.coords
    comps = []
    for idx in itertools.product(range(d), repeat=t.rank + 1):
        base, n = idx[:-1], idx[-1]
        terms = [to_rf(diff(t[base], coords[n]))]
        for slot, var in enumerate(t.variance):
            for s in range(d):
                src = list(base)
                src[slot] = s
                ts = t[tuple(src)]
                if is_zero(ts):
                    continue
                if var is UP:
                    gam = conn[base[slot], s, n]
                    if not is_zero(gam):
                        terms.append(to_rf(ts) * to_rf(gam))
                else:
                    gam = conn[s, base[slot], n]
                    if not is_zero(gam):
                        terms.append(-(to_rf(ts) * to_rf(gam)))
        comps.append(to_tree(_rf_sum(terms)))
    return TensorField(t.chart, t.variance + (DOWN,), comps, validate=False,
                       name=f"{t.name};")


def riemann(conn: Connection) -> TensorField:
    """R^l_{smn} = -d_n G^l_{sm} + d_m G^l_{sn} - G^a_{sm} G^l_{an} + G^a_{sn} G^l_{am}."""
    d = conn.dim
    coords = conn.chart.coords
    G = [[[conn.rf(l, m, n) for n in range(d)] for m in range(d)] for l in range(d)]
    dG = {}

    def dgam(l, s, m, n):
        key = (l, s, m, n)
        if key not in dG:
            dG[key] = to_rf(diff(conn[l, s, m], coords[n]))
        return dG[key]

    comps = {}
    zero = to_tree(RF({}))
    for l, s in itertools.product(range(d), repeat=2):
        for m in range(d):
            comps[l, s, m, m] = zero
            for n in range(m + 1, d):
                terms = [-dgam(l, s, m, n), dgam(l, s, n, m)]
                for a in range(d):
                    if not G[a][s][m].is_zero() and not G[l][a][n].is_zero():
                        terms.append(-(G[a][s][m] * G[l][a][n]))
                    if not G[a][s][n].is_zero() and not G[l][a][m].is_zero():
                        terms.append(G[a][s][n] * G[l][a][m])
                r = _rf_sum(terms)
                comps[l, s, m, n] = to_tree(r)
                comps[l, s, n, m] = to_tree(-r)
    return TensorField(conn.chart, (UP, DOWN, DOWN, DOWN), comps,
                       symmetry=((2, 3, -1),), name="Riemann", validate=False)


def ricci(riem: TensorField, convention: RicciConvention = RicciConvention.SPHERE_POSITIVE) -> TensorField:
    d = riem.chart.dim
    comps = []
    for s in range(d):
        for n in range(d):
            if convention is RicciConvention.SPHERE_POSITIVE:
                terms = [to_rf(riem[l, s, l, n]) for l in range(d)]
            else:
                terms = [to_rf(riem[l, s, n, l]) for l in range(d)]
            comps.append(to_tree(_rf_sum(terms)))
    return TensorField(riem.chart, (DOWN, DOWN), comps, name="Ricci", validate=False)


def scalar_from_ricci(g: Metric, ric: TensorField) -> Expr:
    return contract_with_inverse(g, ric)


def scalar_curvature(g: Metric, convention: RicciConvention = RicciConvention.SPHERE_POSITIVE) -> Expr:
    return scalar_from_ricci(g, ricci(riemann(christoffel(g)), convention))


def divergence(g: Metric, w: TensorField, conn: Connection | None = None) -> Expr:
    """nabla_l w^l = g^{mn} nabla_m w_n for a covector ``w``."""
    conn = conn or christoffel(g)
    dw = covariant_deriv(w, conn)  # dw[n, m] = nabla_m w_n
    return contract_with_inverse(g, dw)


def metric_compatibility(g: Metric, conn: Connection | None = None) -> TensorField:
    """nabla_l g_{mn}; zero for the Levi-Civita connection."""
    return covariant_deriv(g.g, conn or christoffel(g))
