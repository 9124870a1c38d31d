"""Floating-point evaluation, randomized equivalence and code generation."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .canonical import canonical
from .expr import Add, Expr, Func, Mul, Num, Pow, Sym, as_expr, symbol_text

# Symbols that evaluate to a constant when left unbound.
NAMED_CONSTANTS = {"pi": math.pi}


class EvalDomainError(ArithmeticError):
    """Evaluation left a function's domain; ``subexpr`` is the culprit."""

    def __init__(self, message: str, subexpr: Expr) -> None:
        super().__init__(f"{message}: {subexpr}")
        self.subexpr = subexpr


class UnboundSymbolError(KeyError):
    pass


def _lookup(s: Sym, values: Mapping[str, float]) -> float:
    key = symbol_text(s)
    if key in values:
        return float(values[key])
    if key in NAMED_CONSTANTS:
        return NAMED_CONSTANTS[key]
    raise UnboundSymbolError(key)


def _pow(base: float, exp: Fraction, node: Expr) -> float:
    if base == 0.0 and exp < 0:
        raise EvalDomainError("division by zero", node)
    if exp.denominator == 1:
        try:
            return base ** exp.numerator
        except OverflowError:
            raise EvalDomainError("overflow", node) from None
    if base < 0:
        if exp.denominator % 2 == 0:
            raise EvalDomainError("even root of a negative number", node)
        return -((-base) ** float(exp))
    return base ** float(exp)


def eval_numeric(e: Expr, bindings: Mapping | None = None) -> float:
    """Evaluate in IEEE doubles; every free symbol must be bound."""
    values = {(k.name if isinstance(k, Sym) else k): v for k, v in (bindings or {}).items()}
    e = as_expr(e)
    memo: dict = {}

    def ev(node: Expr) -> float:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, Num):
            out = node.value.numerator / node.value.denominator
        elif isinstance(node, Sym):
            out = _lookup(node, values)
        elif isinstance(node, Add):
            out = math.fsum(ev(a) for a in node.args)
        elif isinstance(node, Mul):
            out = 1.0
            for a in node.args:
                out *= ev(a)
        elif isinstance(node, Pow):
            out = _pow(ev(node.base), node.exp, node)
        elif isinstance(node, Func):
            x = ev(node.arg)
            name = node.name
            if name == "exp":
                try:
                    out = math.exp(x)
                except OverflowError:
                    raise EvalDomainError("overflow", node) from None
            elif name == "log":
                if x <= 0:
                    raise EvalDomainError("log of a non-positive number", node)
                out = math.log(x)
            elif name == "sqrt":
                if x < 0:
                    raise EvalDomainError("sqrt of a negative number", node)
                out = math.sqrt(x)
            elif name == "sin":
                out = math.sin(x)
            elif name == "cos":
                out = math.cos(x)
            else:
                c = math.cos(x)
                if c == 0.0:
                    raise EvalDomainError("tan at a pole", node)
                out = math.sin(x) / c
        else:  # pragma: no cover
            raise TypeError(type(node))
        if math.isnan(out) or math.isinf(out):
            raise EvalDomainError("non-finite value", node)
        memo[id(node)] = out
        return out

    return ev(e)


class Equivalence(enum.Enum):
    EQUAL = "EQUAL"
    LIKELY_EQUAL = "LIKELY_EQUAL"
    UNEQUAL = "UNEQUAL"


@dataclass(frozen=True)
class EquivResult:
    status: Equivalence
    witness: dict = field(default_factory=dict)
    lhs_value: float | None = None
    rhs_value: float | None = None
    points: int = 0

    def __bool__(self) -> bool:
        return self.status is not Equivalence.UNEQUAL


EQUIV_SEED = 20260101
SAMPLE_BOX = (0.2, 1.5)


def sample_names(*exprs: Expr) -> list[str]:
    names = set()
    for e in exprs:
        for s in e.free_symbols():
            names.add(symbol_text(s))
    return sorted(n for n in names if n not in NAMED_CONSTANTS)


def equiv(a, b, *, points: int = 20, rtol: float = 1e-9, seed: int = EQUIV_SEED,
          box: tuple[float, float] = SAMPLE_BOX, budget: int = 400) -> EquivResult:
    """Decide ``a == b``: canonical identity, else agreement at random points."""
    ca, cb = canonical(as_expr(a)), canonical(as_expr(b))
    if ca == cb:
        return EquivResult(Equivalence.EQUAL)
    names = sample_names(ca, cb)
    rng = random.Random(seed)
    lo, hi = box
    agreed = 0
    for _ in range(budget):
        point = {n: rng.uniform(lo, hi) for n in names}
        try:
            va = eval_numeric(ca, point)
            vb = eval_numeric(cb, point)
        except EvalDomainError:
            continue
        if abs(va - vb) > rtol * max(1.0, abs(va), abs(vb)):
            return EquivResult(Equivalence.UNEQUAL, point, va, vb, agreed + 1)
        agreed += 1
        if agreed >= points:
            return EquivResult(Equivalence.LIKELY_EQUAL, {}, None, None, agreed)
    # no usable point at all: nothing contradicts, but nothing confirms either
    return EquivResult(Equivalence.UNEQUAL if agreed == 0 else Equivalence.LIKELY_EQUAL,
                       {}, None, None, agreed)


# -- code generation -------------------------------------------------------

def _src(node: Expr, names: Mapping[str, str], mod: str) -> str:
    if isinstance(node, Num):
        v = node.value
        return repr(v.numerator / v.denominator)
    if isinstance(node, Sym):
        key = symbol_text(node)
        if key in names:
            return names[key]
        if key in NAMED_CONSTANTS:
            return repr(NAMED_CONSTANTS[key])
        raise UnboundSymbolError(key)
    if isinstance(node, Add):
        return "(" + " + ".join(_src(a, names, mod) for a in node.args) + ")"
    if isinstance(node, Mul):
        return "(" + " * ".join(_src(a, names, mod) for a in node.args) + ")"
    if isinstance(node, Pow):
        base = _src(node.base, names, mod)
        e = node.exp
        if e.denominator == 1:
            return f"({base} ** {e.numerator})"
        if e.denominator == 2:
            return f"({mod}.sqrt({base}) ** {e.numerator})"
        return f"({base} ** {e.numerator / e.denominator!r})"
    if isinstance(node, Func):
        arg = _src(node.arg, names, mod)
        if node.name == "log":
            return f"{mod}.log({arg})"
        return f"{mod}.{node.name}({arg})"
    raise TypeError(type(node))


def lambdify(exprs: Sequence[Expr], args: Sequence[str], *, backend: str = "math",
             constants: Mapping[str, float] | None = None) -> Callable:
    """Compile expressions into ``f(*args) -> tuple`` of floats (or arrays).

    ``backend`` is ``"math"`` (scalar, numba-compatible) or ``"numpy"``.
    Symbols in ``constants`` are frozen into the generated source.
    """
    import numpy as np

    names = {a: f"_a{i}" for i, a in enumerate(args)}
    consts = dict(constants or {})
    body = []
    for k, v in consts.items():
        var = f"_c{len(body)}"
        body.append(f"    {var} = {float(v)!r}")
        names[k] = var
    outs = [_src(as_expr(e), names, "mod") for e in exprs]
    params = ", ".join(names[a] for a in args)
    ret = "(" + ", ".join(outs) + ",)" if outs else "()"
    src = "def _f({}):\n{}\n    return {}\n".format(
        params, "\n".join(body) if body else "    pass", ret)
    namespace = {"mod": math if backend == "math" else np}
    exec(compile(src, "<lambdify>", "exec"), namespace)
    fn = namespace["_f"]
    fn.source = src
    return fn
