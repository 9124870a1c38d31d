"""Line-based scenario files and the built-in catalog.

Sections::

    [chart]   dim = N / coords = a, b, ...
    [metric]  g[i][j] = <expr>      (unset off-diagonals are 0)
    [weyl]    w[i] = <expr>
    [fields]  name = depends_on_all | depends_on(a, b)
    [params]  name = <number> | symbolic
    [sample]  name = <number>       (sample-point overrides)
    [loop]    x[i] = <expr in t> [| <next piece> ...] / steps = N /
              period[i] = <expr> / B0 = b0, b1, ...
    [flags]   key = true | false

``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .holonomy import LoopPath
from .symbolic import Expr, ParseError, as_expr, eval_numeric, parse_expr
from .symbolic.expr import symbol_text
from .symbolic.numeric import NAMED_CONSTANTS
from .tensor import Chart, Metric, SymmetryError, TensorError, TensorField
from .weyl import WeylStructure

CATALOG = ("flat2", "polar2", "sphere2", "flat4", "conf4", "m4", "schw4")
SECTIONS = ("chart", "metric", "weyl", "fields", "params", "sample", "loop", "flags")

_INDEXED = re.compile(r"^(g|w|x|period)((?:\[\d+\])+)$")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "") -> None:
        where = f"{source}:{line}: " if line is not None else (f"{source}: " if source else "")
        super().__init__(where + message)
        self.line = line


@dataclass
class Scenario:
    name: str
    chart: Chart
    metric: Metric
    fields: dict[str, tuple[str, ...]] = field(default_factory=dict)
    params: dict[str, float | None] = field(default_factory=dict)
    sample: dict[str, float] = field(default_factory=dict)
    weyl: tuple[Expr, ...] | None = None
    loop: tuple[tuple[Expr, ...], ...] | None = None
    steps: int | None = None
    periods: dict[str, float] = field(default_factory=dict)
    B0: tuple[float, ...] | None = None
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def constants(self) -> dict[str, float]:
        """Numeric parameter values, for numerics only."""
        return {k: v for k, v in self.params.items() if v is not None}

    def weyl_structure(self) -> WeylStructure:
        if self.weyl is None:
            return WeylStructure.symbolic(self.metric)
        return WeylStructure(self.metric, TensorField.covector(self.chart, self.weyl, name="w"))

    def loop_path(self, steps: int | None = None) -> LoopPath:
        if self.loop is None:
            raise ScenarioError("scenario has no [loop] section", source=self.name)
        return LoopPath(self.chart, self.loop, steps or self.steps or 4096,
                        constants=self.constants, periods=self.periods)


class _Parser:
    def __init__(self, text: str, source: str) -> None:
        self.source = source
        self.raw: dict[str, list[tuple[int, str, str]]] = {s: [] for s in SECTIONS}
        section = None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise self.error("malformed section header", lineno)
                section = line[1:-1].strip().lower()
                if section not in SECTIONS:
                    raise self.error(f"unknown section [{section}]", lineno)
                continue
            if section is None:
                raise self.error("entry before any section header", lineno)
            if "=" not in line:
                raise self.error("expected 'key = value'", lineno)
            key, value = (p.strip() for p in line.split("=", 1))
            self.raw[section].append((lineno, key, value))

    def error(self, message: str, line: int | None = None) -> ScenarioError:
        return ScenarioError(message, line, self.source)

    def expr(self, text: str, lineno: int, fields, allowed: set[str]) -> Expr:
        try:
            e = parse_expr(text, fields)
        except ParseError as exc:
            raise self.error(f"cannot parse {text!r}: {exc}", lineno) from None
        for s in e.free_symbols():
            name = s.name if (s.deps or s.derivs) else symbol_text(s)
            if name not in allowed and name not in NAMED_CONSTANTS:
                raise self.error(f"undeclared symbol {name!r}", lineno)
        return e

    def number(self, text: str, lineno: int) -> float:
        try:
            return eval_numeric(parse_expr(text))
        except Exception as exc:
            raise self.error(f"expected a number, got {text!r} ({exc})", lineno) from None

    @staticmethod
    def indices(key: str) -> tuple[str, tuple[int, ...]] | None:
        m = _INDEXED.match(key.replace(" ", ""))
        if not m:
            return None
        return m.group(1), tuple(int(i) for i in re.findall(r"\d+", m.group(2)))

    def build(self, name: str) -> Scenario:
        chart_kv = {k: (n, v) for n, k, v in self.raw["chart"]}
        if "coords" not in chart_kv:
            raise self.error("[chart] needs coords")
        coords = tuple(c.strip() for c in chart_kv["coords"][1].split(",") if c.strip())
        if "dim" in chart_kv:
            lineno, dim = chart_kv["dim"]
            if not dim.isdigit() or int(dim) != len(coords):
                raise self.error(f"dim = {dim} does not match {len(coords)} coords", lineno)
        try:
            chart = Chart(coords)
        except TensorError as exc:
            raise self.error(str(exc)) from None

        fields: dict[str, tuple[str, ...]] = {}
        for lineno, key, value in self.raw["fields"]:
            v = value.replace(" ", "")
            if v == "depends_on_all":
                fields[key] = coords
            else:
                m = re.fullmatch(r"depends_on\(([^)]*)\)", v)
                deps = tuple(d for d in m.group(1).split(",") if d) if m else ()
                if not m or any(d not in coords for d in deps):
                    raise self.error(f"bad field declaration {value!r}", lineno)
                fields[key] = tuple(c for c in coords if c in deps)

        params: dict[str, float | None] = {}
        for lineno, key, value in self.raw["params"]:
            params[key] = None if value == "symbolic" else self.number(value, lineno)
        sample = {key: self.number(value, lineno) for lineno, key, value in self.raw["sample"]}
        allowed = set(coords) | set(fields) | set(params)

        d = chart.dim
        given: dict[tuple[int, int], tuple[int, Expr]] = {}
        for lineno, key, value in self.raw["metric"]:
            idx = self.indices(key)
            if not idx or idx[0] != "g" or len(idx[1]) != 2 or max(idx[1]) >= d:
                raise self.error(f"bad metric entry {key!r}", lineno)
            given[idx[1]] = (lineno, self.expr(value, lineno, fields, allowed))
        rows = [[0] * d for _ in range(d)]
        for (i, j), (lineno, e) in given.items():
            other = given.get((j, i))
            if other is not None and other[1] != e:
                raise self.error(f"metric is not symmetric: g[{i}][{j}] != g[{j}][{i}]", lineno)
            rows[i][j] = rows[j][i] = e
        if not given:
            raise self.error("[metric] is empty")
        overrides = {**{k: v for k, v in params.items() if v is not None}, **sample}
        try:
            metric = Metric(chart, rows, name="g", sample_overrides=overrides)
        except (TensorError, SymmetryError, ArithmeticError) as exc:
            raise self.error(f"invalid metric: {exc}") from None

        weyl = None
        if self.raw["weyl"]:
            comps: list = [as_expr(0)] * d
            for lineno, key, value in self.raw["weyl"]:
                idx = self.indices(key)
                if not idx or idx[0] != "w" or len(idx[1]) != 1 or idx[1][0] >= d:
                    raise self.error(f"bad weyl entry {key!r}", lineno)
                comps[idx[1][0]] = self.expr(value, lineno, fields, allowed)
            weyl = tuple(comps)

        loop = steps = B0 = None
        periods: dict[str, float] = {}
        if self.raw["loop"]:
            pieces_by_coord: dict[int, list[Expr]] = {}
            for lineno, key, value in self.raw["loop"]:
                idx = self.indices(key)
                if key == "steps":
                    if not value.isdigit():
                        raise self.error(f"steps must be a positive integer, got {value!r}", lineno)
                    steps = int(value)
                elif key == "B0":
                    B0 = tuple(self.number(v, lineno) for v in value.split(","))
                    if len(B0) != d:
                        raise self.error(f"B0 needs {d} components", lineno)
                elif idx and idx[0] == "x" and len(idx[1]) == 1 and idx[1][0] < d:
                    pieces_by_coord[idx[1][0]] = [
                        self.expr(p, lineno, {}, set(params) | {"t"}) for p in value.split("|")]
                elif idx and idx[0] == "period" and len(idx[1]) == 1 and idx[1][0] < d:
                    periods[coords[idx[1][0]]] = self.number(value, lineno)
                else:
                    raise self.error(f"bad loop entry {key!r}", lineno)
            if sorted(pieces_by_coord) != list(range(d)):
                raise self.error("[loop] needs x[i] for every coordinate")
            counts = {len(p) for p in pieces_by_coord.values()}
            if len(counts) != 1:
                raise self.error("every x[i] needs the same number of pieces")
            loop = tuple(tuple(pieces_by_coord[i][k] for i in range(d)) for k in range(counts.pop()))

        flags = {}
        for lineno, key, value in self.raw["flags"]:
            if value.lower() not in ("true", "false"):
                raise self.error(f"flag {key} must be true or false", lineno)
            flags[key] = value.lower() == "true"

        return Scenario(name, chart, metric, fields, params, sample, weyl, loop, steps,
                        periods, B0, flags)


def parse_scenario(text: str, name: str = "<scenario>") -> Scenario:
    return _Parser(text, name).build(name)


def load_scenario(path) -> Scenario:
    """Load a scenario file, or a catalog entry by bare name (``sphere2``)."""
    p = Path(path)
    if not p.exists() and str(path) in catalog_names():
        return catalog(str(path))
    if not p.exists():
        raise ScenarioError(f"no such scenario: {path}")
    return parse_scenario(p.read_text(encoding="utf-8"), p.name)


def catalog_names() -> list[str]:
    files = resources.files("weyldirac.catalog")
    return sorted(f.name[:-4] for f in files.iterdir() if f.name.endswith(".scn"))


def catalog(name: str) -> Scenario:
    text = resources.files("weyldirac.catalog").joinpath(f"{name}.scn").read_text(encoding="utf-8")
    return parse_scenario(text, name)


def catalog_metrics() -> list[Scenario]:
    """The seven reference metrics."""
    return [catalog(n) for n in CATALOG]
