"""Charts and dense tensor fields with Expr components."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Mapping, Sequence

from .symbolic import Expr, Sym, as_expr, diff, eval_numeric, is_zero
from .symbolic.canonical import RF, canonical, rf_const, to_rf, to_tree
from .symbolic.expr import symbol_text

MAX_DIM = 8
SAMPLE_VALUE = 0.7


class TensorError(ValueError):
    pass


class SymmetryError(TensorError):
    pass


class SingularMetricError(TensorError):
    pass


class Variance(enum.Enum):
    UP = "up"
    DOWN = "down"

    def flipped(self) -> "Variance":
        return Variance.DOWN if self is Variance.UP else Variance.UP


UP, DOWN = Variance.UP, Variance.DOWN


@dataclass(frozen=True)
class Chart:
    coords: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(self.coords))
        if not 1 <= len(self.coords) <= MAX_DIM:
            raise TensorError(f"chart dimension must be in 1..{MAX_DIM}, got {len(self.coords)}")
        if len(set(self.coords)) != len(self.coords):
            raise TensorError(f"coordinate names must be distinct: {self.coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def symbols(self) -> tuple[Sym, ...]:
        return tuple(Sym(c) for c in self.coords)

    def field(self, name: str) -> Sym:
        """A scalar field symbol depending on every coordinate."""
        return Sym(name, self.coords)

    def index(self, coord: str | int) -> int:
        if isinstance(coord, int):
            if not 0 <= coord < self.dim:
                raise TensorError(f"coordinate index {coord} out of range")
            return coord
        return self.coords.index(coord)

    def sample_point(self, exprs: Sequence[Expr] = (), overrides: Mapping[str, float] | None = None) -> dict:
        """Default numeric point: every symbol at 0.7 unless overridden."""
        point = {c: SAMPLE_VALUE for c in self.coords}
        for e in exprs:
            for s in e.free_symbols():
                point.setdefault(symbol_text(s), SAMPLE_VALUE)
        point.pop("pi", None)
        point.update(overrides or {})
        return point


def _rf_sum(items) -> RF:
    out = RF({})
    for r in items:
        if not r.is_zero():
            out = out + r
    return out


class TensorField:
    """Dense components indexed by tuples, with variance and symmetry metadata.

    ``symmetry`` entries are ``(i, j, +1)`` for symmetric and ``(i, j, -1)``
    for antisymmetric slot pairs; they are validated on construction.
    """

    def __init__(self, chart: Chart, variance: Sequence[Variance], components,
                 symmetry: Sequence[tuple[int, int, int]] = (), weight: int | None = None,
                 name: str = "", validate: bool = True) -> None:
        self.chart = chart
        self.variance = tuple(variance)
        n = chart.dim ** len(self.variance)
        if isinstance(components, Mapping):
            comps = [components.get(idx, 0) for idx in self.indices()]
        else:
            comps = list(components)
        if len(comps) != n:
            raise TensorError(f"expected {n} components, got {len(comps)}")
        self._comps = tuple(canonical(as_expr(c)) for c in comps)
        self.symmetry = tuple(symmetry)
        self.weight = weight
        self.name = name
        if validate:
            self._check_symmetry()

    # construction -----------------------------------------------------
    @classmethod
    def from_function(cls, chart: Chart, variance: Sequence[Variance], fn: Callable[..., Expr],
                      **kwargs) -> "TensorField":
        rank = len(variance)
        comps = [fn(*idx) for idx in itertools.product(range(chart.dim), repeat=rank)]
        return cls(chart, variance, comps, **kwargs)

    @classmethod
    def scalar(cls, chart: Chart, value, **kwargs) -> "TensorField":
        return cls(chart, (), [value], **kwargs)

    @classmethod
    def covector(cls, chart: Chart, comps: Sequence, **kwargs) -> "TensorField":
        return cls(chart, (DOWN,), comps, **kwargs)

    @classmethod
    def vector(cls, chart: Chart, comps: Sequence, **kwargs) -> "TensorField":
        return cls(chart, (UP,), comps, **kwargs)

    # access -------------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.variance)

    def indices(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.chart.dim), repeat=len(self.variance))

    def _flat(self, idx: tuple[int, ...]) -> int:
        d = self.chart.dim
        k = 0
        for i in idx:
            if not 0 <= i < d:
                raise IndexError(f"index {idx} out of range for dim {d}")
            k = k * d + i
        return k

    def __getitem__(self, idx) -> Expr:
        if not isinstance(idx, tuple):
            idx = (idx,)
        if len(idx) != self.rank:
            raise IndexError(f"rank-{self.rank} tensor indexed with {len(idx)} indices")
        return self._comps[self._flat(idx)]

    def items(self) -> Iterator[tuple[tuple[int, ...], Expr]]:
        return zip(self.indices(), self._comps)

    @property
    def components(self) -> dict[tuple[int, ...], Expr]:
        return dict(self.items())

    def values(self) -> tuple[Expr, ...]:
        return self._comps

    def is_zero(self) -> bool:
        return all(is_zero(c) for c in self._comps)

    def nonzero(self) -> list[tuple[tuple[int, ...], Expr]]:
        return [(i, c) for i, c in self.items() if not is_zero(c)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, TensorField) and self.chart == other.chart
                and self.variance == other.variance and self._comps == other._comps)

    def __hash__(self) -> int:
        return hash((self.chart, self.variance, self._comps))

    def __repr__(self) -> str:
        v = "".join("^" if x is UP else "_" for x in self.variance)
        return f"TensorField({self.name or '?'}{v}, dim={self.chart.dim})"

    # algebra -------------------------------------------------------------
    def map(self, fn: Callable[[Expr], Expr], **kwargs) -> "TensorField":
        kwargs.setdefault("symmetry", self.symmetry)
        kwargs.setdefault("weight", self.weight)
        return TensorField(self.chart, self.variance, [fn(c) for c in self._comps], **kwargs)

    def _like(self, other: "TensorField") -> None:
        if other.chart != self.chart or other.variance != self.variance:
            raise TensorError("tensor shapes differ")

    def __add__(self, other: "TensorField") -> "TensorField":
        self._like(other)
        return TensorField(self.chart, self.variance,
                           [a + b for a, b in zip(self._comps, other._comps)], validate=False)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._like(other)
        return TensorField(self.chart, self.variance,
                           [a - b for a, b in zip(self._comps, other._comps)], validate=False)

    def scaled(self, factor) -> "TensorField":
        f = as_expr(factor)
        return self.map(lambda c: c * f, validate=False)

    # validation ------------------------------------------------------------
    def _check_symmetry(self) -> None:
        for i, j, sign in self.symmetry:
            for idx, c in self.items():
                if idx[i] >= idx[j]:
                    continue
                swapped = list(idx)
                swapped[i], swapped[j] = swapped[j], swapped[i]
                other = self[tuple(swapped)]
                expected = other if sign > 0 else -other
                if c != expected:
                    kind = "symmetric" if sign > 0 else "antisymmetric"
                    raise SymmetryError(
                        f"{self.name or 'tensor'} declared {kind} in slots ({i},{j}) "
                        f"but component {idx} = {c} vs {tuple(swapped)} = {other}")


def _matrix_rf(rows) -> list[list[RF]]:
    return [[to_rf(as_expr(c)) for c in row] for row in rows]


def _gauss_jordan(a: list[list[RF]]) -> tuple[list[list[RF]], RF]:
    """Exact inverse and determinant over the rational-function field."""
    n = len(a)
    m = [row[:] + [rf_const(1 if i == j else 0) for j in range(n)] for i, row in enumerate(a)]
    det = rf_const(1)
    for col in range(n):
        pivot = None
        best = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                size = len(m[r][col].num) + len(m[r][col].den)
                if best is None or size < best:
                    pivot, best = r, size
        if pivot is None:
            raise SingularMetricError("metric determinant is canonically zero")
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det = det * p
        pinv = p.inv()
        m[col] = [x * pinv if not x.is_zero() else x for x in m[col]]
        for r in range(n):
            if r == col or m[r][col].is_zero():
                continue
            f = m[r][col]
            m[r] = [x - f * y if not y.is_zero() else x for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m], det


class Metric:
    """Symmetric covariant 2-tensor with cached exact inverse and determinant."""

    def __init__(self, chart: Chart, rows, name: str = "g",
                 sample_overrides: Mapping[str, float] | None = None) -> None:
        n = chart.dim
        rows = [[canonical(as_expr(c)) for c in row] for row in rows]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise TensorError(f"metric must be {n}x{n}")
        self.chart = chart
        self.name = name
        self.g = TensorField(chart, (DOWN, DOWN), [c for row in rows for c in row],
                             symmetry=((0, 1, 1),), weight=2, name=name)
        self.sample_overrides = dict(sample_overrides or {})
        self._check_sample_point()

    @classmethod
    def diagonal(cls, chart: Chart, diag: Sequence, **kwargs) -> "Metric":
        n = chart.dim
        rows = [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls(chart, rows, **kwargs)

    def __getitem__(self, idx) -> Expr:
        return self.g[idx]

    @property
    def dim(self) -> int:
        return self.chart.dim

    def _check_sample_point(self) -> None:
        point = self.chart.sample_point(self.g.values(), self.sample_overrides)
        value = eval_numeric(self.det, point)
        if value == 0.0:
            raise SingularMetricError(f"metric {self.name} is singular at the sample point")

    @cached_property
    def _inverse_and_det(self):
        inv, det = _gauss_jordan(_matrix_rf([[self.g[i, j] for j in range(self.dim)]
                                             for i in range(self.dim)]))
        return inv, det

    @cached_property
    def det(self) -> Expr:
        return to_tree(self._inverse_and_det[1])

    @cached_property
    def inverse(self) -> TensorField:
        inv, _ = self._inverse_and_det
        return TensorField(self.chart, (UP, UP), [to_tree(inv[i][j]) for i in range(self.dim)
                                                  for j in range(self.dim)],
                           symmetry=((0, 1, 1),), weight=-2, name=self.name + "^-1")

    @cached_property
    def volume_density(self) -> Expr:
        """sqrt(|det g|) with the sign fixed at the sample point."""
        from .symbolic.canonical import power
        point = self.chart.sample_point((self.det,), self.sample_overrides)
        sign = -1 if eval_numeric(self.det, point) < 0 else 1
        return power(self.det * sign, "1/2")


def inverse_metric(g: Metric) -> TensorField:
    return g.inverse


def _contract_slot(t: TensorField, slot: int, m: TensorField, variance: Variance,
                   weight: int | None) -> TensorField:
    if not 0 <= slot < t.rank:
        raise TensorError(f"slot {slot} out of range for rank {t.rank}")
    d = t.chart.dim
    new_var = list(t.variance)
    new_var[slot] = variance
    comps = []
    for idx in t.indices():
        terms = []
        for s in range(d):
            ms = m[idx[slot], s]
            if is_zero(ms):
                continue
            src = list(idx)
            src[slot] = s
            c = t[tuple(src)]
            if is_zero(c):
                continue
            terms.append(to_rf(ms) * to_rf(c))
        comps.append(to_tree(_rf_sum(terms)))
    return TensorField(t.chart, new_var, comps, weight=weight, name=t.name, validate=False)


def raise_index(t: TensorField, slot: int, g: Metric) -> TensorField:
    if t.variance[slot] is not DOWN:
        raise TensorError(f"slot {slot} is already contravariant")
    return _contract_slot(t, slot, g.inverse, UP, None if t.weight is None else t.weight - 2)


def lower_index(t: TensorField, slot: int, g: Metric) -> TensorField:
    if t.variance[slot] is not UP:
        raise TensorError(f"slot {slot} is already covariant")
    return _contract_slot(t, slot, g.g, DOWN, None if t.weight is None else t.weight + 2)


def partial_deriv(t: TensorField, nu: int | str) -> TensorField:
    """Componentwise comma derivative; the variance is unchanged."""
    x = t.chart.coords[t.chart.index(nu)]
    return TensorField(t.chart, t.variance, [diff(c, x) for c in t.values()],
                       symmetry=t.symmetry, validate=False, name=f"{t.name},{x}")


def comma(t: TensorField) -> TensorField:
    """All coordinate derivatives, appended as a trailing covariant slot."""
    d = t.chart.dim
    parts = [partial_deriv(t, nu) for nu in range(d)]
    comps = [parts[idx[-1]][idx[:-1]] for idx in itertools.product(range(d), repeat=t.rank + 1)]
    return TensorField(t.chart, t.variance + (DOWN,), comps, validate=False)


def gradient(chart: Chart, f) -> TensorField:
    f = as_expr(f)
    return TensorField.covector(chart, [diff(f, x) for x in chart.coords], name="d" + str(f))


def contract_with_inverse(g: Metric, a: TensorField, b: TensorField | None = None) -> Expr:
    """g^{mu nu} a_mu b_nu for covectors, or g^{mu nu} a_{mu nu} for rank-2 a."""
    gi = g.inverse
    terms = []
    d = g.dim
    for i in range(d):
        for j in range(d):
            gij = gi[i, j]
            if is_zero(gij):
                continue
            x = to_rf(a[i, j]) if b is None else to_rf(a[i]) * to_rf(b[j])
            if not x.is_zero():
                terms.append(to_rf(gij) * x)
    return to_tree(_rf_sum(terms))
