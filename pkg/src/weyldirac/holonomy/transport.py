"""Parallel transport of vectors and lengths around closed loops."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..riemann import Connection, riemann
from ..symbolic import EvalDomainError, Expr, as_expr, diff, lambdify, parse_expr
from ..symbolic.numeric import sample_names
from ..tensor import Chart, Metric, TensorError, TensorField
from ..weyl import WeylStructure, length_curvature
from .kernels import rk4_linear

DEFAULT_STEPS = 4096
MIN_STEPS = 16
CLOSURE_TOL = 1e-12


class TransportError(ValueError):
    pass


def _free_names(exprs, skip=()) -> list[str]:
    return [n for n in sample_names(*exprs) if n not in skip]


def _compile(exprs: Sequence[Expr], args: Sequence[str], constants: Mapping[str, float]):
    """Vectorized evaluator returning an array of shape (len(exprs), *arg.shape)."""
    exprs = [as_expr(e) for e in exprs]
    missing = [n for n in _free_names(exprs) if n not in args and n not in constants]
    if missing:
        raise TransportError(f"unbound symbols: {', '.join(missing)}")
    fn = lambdify(exprs, args, backend="numpy", constants=constants)

    def run(*arrays):
        shape = np.shape(arrays[0])
        with np.errstate(all="raise"):
            try:
                vals = fn(*arrays)
            except (FloatingPointError, ZeroDivisionError, ValueError) as exc:
                raise EvalDomainError(f"evaluation failed on the path ({exc})", exprs[0]) from None
        out = np.empty((len(exprs),) + shape)
        for i, v in enumerate(vals):
            out[i] = np.broadcast_to(np.asarray(v, dtype=float), shape)
        if not np.all(np.isfinite(out)):
            raise EvalDomainError("non-finite value on the path", exprs[0])
        return out

    return run


@dataclass
class Curve:
    """Numeric path: ``x(t)`` and ``dx/dt(t)`` on arrays of t in [0, 1]."""

    dim: int
    x: Callable[[np.ndarray], np.ndarray]
    xdot: Callable[[np.ndarray], np.ndarray]


def straight_segment(a: Sequence[float], b: Sequence[float]) -> Curve:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return Curve(len(a), lambda t: a[:, None] + np.outer(b - a, t),
                 lambda t: np.repeat((b - a)[:, None], np.size(t), axis=1))


class LoopPath:
    """Closed curve x(t), t in [0, 1], given per coordinate as expressions in t.

    ``coords`` holds one expression per coordinate, or a list of pieces (each
    a per-coordinate list in a local parameter t in [0, 1]) traversed in
    order.  ``periods`` maps coordinate names to a period; a coordinate that
    returns shifted by a whole number of periods counts as closed.
    """

    def __init__(self, chart: Chart, coords: Sequence, steps: int = DEFAULT_STEPS,
                 param: str = "t", constants: Mapping[str, float] | None = None,
                 periods: Mapping[str, float] | None = None) -> None:
        pieces = list(coords) if coords and isinstance(coords[0], (list, tuple)) else [coords]
        if any(len(p) != chart.dim for p in pieces):
            raise TransportError(f"loop needs {chart.dim} coordinate expressions per piece")
        if steps < MIN_STEPS:
            raise TransportError(f"at least {MIN_STEPS} steps are required, got {steps}")
        if steps % len(pieces):
            raise TransportError(f"steps ({steps}) must divide evenly among {len(pieces)} pieces")
        self.chart = chart
        self.param = param
        self.pieces = tuple(tuple(parse_expr(c) if isinstance(c, str) else as_expr(c) for c in p)
                            for p in pieces)
        self.steps = int(steps)
        self.constants = dict(constants or {})
        self.periods = dict(periods or {})
        self.curves = []
        for p in self.pieces:
            x = _compile(p, [param], self.constants)
            xd = _compile([diff(e, param) for e in p], [param], self.constants)
            self.curves.append(Curve(chart.dim, x, xd))
        ends = [c.x(np.array([0.0, 1.0])) for c in self.curves]
        for a, b in zip(ends, ends[1:]):
            if np.max(np.abs(a[:, 1] - b[:, 0])) > CLOSURE_TOL:
                raise TransportError("loop pieces do not join up")
        gap = ends[-1][:, 1] - ends[0][:, 0]
        for i, name in enumerate(chart.coords):
            period = self.periods.get(name)
            if period:
                gap[i] -= period * round(gap[i] / period)
        if np.max(np.abs(gap)) > CLOSURE_TOL:
            raise TransportError(f"loop is not closed: |x(1) - x(0)| = {np.max(np.abs(gap)):.3e}")

    @property
    def steps_per_piece(self) -> int:
        return self.steps // len(self.pieces)

    def with_steps(self, steps: int) -> "LoopPath":
        return LoopPath(self.chart, self.pieces, steps, self.param, self.constants, self.periods)

    def start(self) -> np.ndarray:
        return self.curves[0].x(np.array([0.0]))[:, 0]


@dataclass
class TransportResult:
    final: np.ndarray
    initial: np.ndarray
    initial_length: float
    final_length: float
    predicted_delta: np.ndarray | float | None = None
    rotation_angle: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def length_ratio(self) -> float:
        return self.final_length / self.initial_length


class NumericConnection:
    """Connection components compiled for evaluation along paths."""

    def __init__(self, conn: Connection, constants: Mapping[str, float] | None = None) -> None:
        self.conn = conn
        self.chart = conn.chart
        d = conn.dim
        self.constants = dict(constants or {})
        exprs = [conn[l, s, n] for l in range(d) for s in range(d) for n in range(d)]
        self._gamma = _compile(exprs, self.chart.coords, self.constants)

    def gamma(self, pts: np.ndarray) -> np.ndarray:
        """Shape (npts, d, d, d): [p, l, s, n] = Gamma^l_{sn}."""
        d = self.chart.dim
        vals = self._gamma(*pts)
        return np.moveaxis(vals.reshape(d, d, d, -1), -1, 0)

    def system(self, curve: Curve, steps: int) -> np.ndarray:
        """A[j]^l_s = -Gamma^l_{sn} dx^n/dt on the half-step grid."""
        t = np.linspace(0.0, 1.0, 2 * steps + 1)
        G = self.gamma(curve.x(t))
        xd = curve.xdot(t).T  # (npts, d)
        return -np.einsum("plsn,pn->pls", G, xd)


def _metric_at(g: Metric, point: np.ndarray, constants: Mapping[str, float]) -> np.ndarray:
    d = g.dim
    f = _compile([g[i, j] for i in range(d) for j in range(d)], g.chart.coords, constants)
    return f(*[np.array([v]) for v in point])[:, 0].reshape(d, d)


def metric_length(G: np.ndarray, B: np.ndarray) -> float:
    """sqrt(|g_{mn} B^m B^n|)."""
    return math.sqrt(abs(float(B @ G @ B)))


def _rotation_angle(G: np.ndarray, b0: np.ndarray, b1: np.ndarray) -> float:
    """Angle from b0 to b1 in an orthonormal frame at the base point, in [0, 2 pi)."""
    L = np.linalg.cholesky(G)  # needs a Riemannian 2D metric
    u, v = L.T @ b0, L.T @ b1
    ang = math.atan2(u[0] * v[1] - u[1] * v[0], float(u @ v))
    return ang % (2.0 * math.pi)


def _transport_curves(nc: NumericConnection, curves: Sequence[Curve], B0: np.ndarray,
                      steps: int, backend: str | None) -> np.ndarray:
    B = np.asarray(B0, dtype=float)
    h = 1.0 / steps
    for c in curves:
        B = rk4_linear(nc.system(c, steps), B, h, backend)
    return B


def _check_steps(loop: LoopPath, steps: int | None) -> int:
    steps = steps or loop.steps
    if steps < MIN_STEPS:
        raise TransportError(f"at least {MIN_STEPS} steps are required, got {steps}")
    if steps % len(loop.curves):
        raise TransportError(f"steps ({steps}) must divide evenly among {len(loop.curves)} pieces")
    return steps


def transport(conn: Connection, loop: LoopPath, B0: Sequence[float], g: Metric | None = None,
              steps: int | None = None, backend: str | None = None,
              constants: Mapping[str, float] | None = None) -> TransportResult:
    """RK4 solution of dB^m/dt = -B^s Gamma^m_{sn} dx^n/dt around ``loop``.

    Lengths use ``g`` when given (else the Euclidean norm of the components).
    """
    steps = _check_steps(loop, steps)
    consts = {**loop.constants, **(constants or {})}
    nc = NumericConnection(conn, consts)
    B0 = np.asarray(B0, dtype=float)
    B1 = _transport_curves(nc, loop.curves, B0, steps // len(loop.curves), backend)
    start = loop.start()
    G = _metric_at(g, start, consts) if g is not None else np.eye(conn.dim)
    angle = None
    if conn.dim == 2 and np.all(np.linalg.eigvalsh(G) > 0):
        angle = _rotation_angle(G, B0, B1)
    return TransportResult(B1, B0, metric_length(G, B0), metric_length(G, B1),
                           rotation_angle=angle, extra={"steps": steps, "start": start})


# ---------------------------------------------------------------------------
# length transport

def _gauss_legendre(f: Callable[[np.ndarray], np.ndarray], panels: int = 64, order: int = 16) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    t = (0.5 * (b - a) * nodes[None, :] + 0.5 * (b + a)).ravel()
    wts = (0.5 * (b - a) * weights[None, :]).ravel()
    return float(np.sum(f(t) * wts))


def line_integral(w: TensorField, loop: LoopPath, constants: Mapping[str, float] | None = None) -> float:
    """Closed-loop integral of w_n dx^n by composite Gauss-Legendre quadrature."""
    consts = {**loop.constants, **(constants or {})}
    fw = _compile(list(w.values()), w.chart.coords, consts)
    return sum(_gauss_legendre(lambda t, c=c: np.sum(fw(*c.x(t)) * c.xdot(t), axis=0))
               for c in loop.curves)


def cone_flux(w: TensorField, loop: LoopPath, constants: Mapping[str, float] | None = None,
              order: int = 48) -> float:
    """Flux of d(w) through the cone from the loop centroid.

    X(s, t) = c + s (x(t) - c); the integrand is
    (d_m w_n - d_n w_m) dX^m/ds dX^n/dt = -W_{mn} dX^m/ds dX^n/dt.
    """
    consts = {**loop.constants, **(constants or {})}
    d = w.chart.dim
    Wmn = length_curvature(w)
    fW = _compile([Wmn[m, n] for m in range(d) for n in range(d)], w.chart.coords, consts)
    tq = np.linspace(0.0, 1.0, 4097)[:-1]
    c = np.mean([cv.x(tq).mean(axis=1) for cv in loop.curves], axis=0)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    s_nodes, s_w = 0.5 * (nodes + 1.0), 0.5 * weights

    def along_t(t: np.ndarray, curve: Curve) -> np.ndarray:
        x, xd = curve.x(t), curve.xdot(t)
        total = np.zeros_like(t)
        for s, ws in zip(s_nodes, s_w):
            X = c[:, None] + s * (x - c[:, None])
            Xs, Xt = x - c[:, None], s * xd
            Wv = fW(*X).reshape(d, d, -1)
            total += ws * -np.einsum("mnp,mp,np->p", Wv, Xs, Xt)
        return total

    return sum(_gauss_legendre(lambda t, cv=cv: along_t(t, cv)) for cv in loop.curves)


def length_transport(W: WeylStructure, loop: LoopPath, B0_len: float = 1.0,
                     steps: int | None = None, backend: str | None = None,
                     constants: Mapping[str, float] | None = None) -> TransportResult:
    """RK4 solution of dB/dt = B w_n dx^n/dt, with exact and first-order predictions."""
    steps = _check_steps(loop, steps)
    consts = {**loop.constants, **(constants or {})}
    fw = _compile(list(W.w.values()), W.chart.coords, consts)
    per = steps // len(loop.curves)
    t = np.linspace(0.0, 1.0, 2 * per + 1)
    B = np.array([float(B0_len)])
    for c in loop.curves:
        a = np.sum(fw(*c.x(t)) * c.xdot(t), axis=0)
        B = rk4_linear(a[:, None, None], B, 1.0 / per, backend)
    B1 = float(B[0])
    oint = line_integral(W.w, loop, consts)
    flux = cone_flux(W.w, loop, consts)
    return TransportResult(np.array([B1]), np.array([float(B0_len)]), float(B0_len), B1,
                           predicted_delta=float(B0_len) * flux,
                           extra={"steps": steps, "loop_integral": oint, "flux": flux,
                                  "exact_ratio": math.exp(oint)})


# ---------------------------------------------------------------------------
# holonomy defect

def parallelogram(corner: Sequence[float], eps: float, plane: tuple[int, int],
                  dim: int) -> list[Curve]:
    """Coordinate parallelogram: +eps along plane[1], +eps along plane[0], then back."""
    mu, nu = plane
    p0 = np.asarray(corner, dtype=float)
    e_mu, e_nu = np.zeros(dim), np.zeros(dim)
    e_mu[mu], e_nu[nu] = eps, eps
    pts = [p0, p0 + e_nu, p0 + e_nu + e_mu, p0 + e_mu, p0]
    return [straight_segment(a, b) for a, b in zip(pts[:-1], pts[1:])]


def riemann_at(conn: Connection, point: Sequence[float],
               constants: Mapping[str, float] | None = None) -> np.ndarray:
    d = conn.dim
    R = riemann(conn)
    f = _compile([R[idx] for idx in R.indices()], conn.chart.coords, dict(constants or {}))
    return f(*[np.array([v]) for v in point])[:, 0].reshape((d,) * 4)


def holonomy_defect(conn: Connection, corner: Sequence[float], eps: float,
                    plane: tuple[int, int], B0: Sequence[float], steps: int = 256,
                    reverse: bool = False, backend: str | None = None,
                    constants: Mapping[str, float] | None = None) -> TransportResult:
    """Transport around the eps-parallelogram at ``corner``.

    ``predicted_delta`` is B^s R^l_{s mu nu} eps^2 with R taken at the corner;
    ``reverse`` runs the loop the other way round.
    """
    d = conn.dim
    if not (0 <= plane[0] < d and 0 <= plane[1] < d) or plane[0] == plane[1]:
        raise TensorError(f"invalid plane {plane}")
    consts = dict(constants or {})
    nc = NumericConnection(conn, consts)
    curves = parallelogram(corner, eps, plane, d)
    if reverse:
        curves = [Curve(c.dim, (lambda c: lambda t: c.x(1.0 - t))(c),
                        (lambda c: lambda t: -c.xdot(1.0 - t))(c)) for c in reversed(curves)]
    B0 = np.asarray(B0, dtype=float)
    B1 = _transport_curves(nc, curves, B0, steps, backend)
    R = riemann_at(conn, corner, consts)
    pred = np.einsum("s,lsmn->lmn", B0, R)[:, plane[0], plane[1]] * eps ** 2
    return TransportResult(B1, B0, float(np.linalg.norm(B0)), float(np.linalg.norm(B1)),
                           predicted_delta=pred, extra={"delta": B1 - B0, "eps": eps})
