"""Immutable expression trees.

Nodes are plain value objects: structural equality, cached hashes and a
total ordering key used wherever canonical output needs a stable order.
Arithmetic operators always return canonical trees (see ``canonical``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt")


class Expr:
    __slots__ = ("_hash", "_rf", "_key", "_str")

    def __init__(self) -> None:
        self._hash = None
        self._rf = None
        self._key = None
        self._str = None

    # -- identity -------------------------------------------------------
    def _fields(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._fields()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        if hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    @property
    def sort_key(self) -> tuple:
        if self._key is None:
            self._key = self._make_key()
        return self._key

    def _make_key(self) -> tuple:
        return (9, str(self))

    def __str__(self) -> str:
        if self._str is None:
            self._str = to_text(self)
        return self._str

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"

    def children(self) -> tuple["Expr", ...]:
        return ()

    def walk(self) -> Iterator["Expr"]:
        yield self
        for c in self.children():
            yield from c.walk()

    def free_symbols(self) -> frozenset["Sym"]:
        return frozenset(n for n in self.walk() if isinstance(n, Sym))

    # -- arithmetic (canonicalizing) ------------------------------------
    def __add__(self, other):
        from .canonical import add
        return add(self, as_expr(other))

    def __radd__(self, other):
        from .canonical import add
        return add(as_expr(other), self)

    def __sub__(self, other):
        from .canonical import add, neg
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        from .canonical import add, neg
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        from .canonical import mul
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        from .canonical import mul
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        from .canonical import div
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        from .canonical import div
        return div(as_expr(other), self)

    def __neg__(self):
        from .canonical import neg
        return neg(self)

    def __pos__(self):
        return self

    def __pow__(self, power):
        from .canonical import power as _power
        return _power(self, Fraction(power))

    def is_zero(self) -> bool:
        return isinstance(self, Num) and self.value == 0


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value) -> None:
        super().__init__()
        self.value = Fraction(value)

    def _fields(self):
        return (self.value,)

    def _make_key(self):
        return (0, self.value)


class Sym(Expr):
    """A named symbol.

    ``deps`` lists the coordinates a field symbol depends on; ``derivs`` is
    the sorted multiset of coordinates it has been differentiated by.
    """

    __slots__ = ("name", "deps", "derivs")

    def __init__(self, name: str, deps: tuple[str, ...] = (), derivs: tuple[str, ...] = ()) -> None:
        super().__init__()
        self.name = name
        self.deps = tuple(deps)
        self.derivs = tuple(sorted(derivs))

    def _fields(self):
        return (self.name, self.deps, self.derivs)

    def _make_key(self):
        return (1, self.name, len(self.derivs), self.derivs, self.deps)

    @property
    def is_field(self) -> bool:
        return bool(self.deps)

    def base_field(self) -> "Sym":
        return Sym(self.name, self.deps) if self.derivs else self


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, args) -> None:
        super().__init__()
        self.args = tuple(args)

    def _fields(self):
        return self.args

    def children(self):
        return self.args


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, args) -> None:
        super().__init__()
        self.args = tuple(args)

    def _fields(self):
        return self.args

    def children(self):
        return self.args


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp) -> None:
        super().__init__()
        self.base = base
        self.exp = Fraction(exp)

    def _fields(self):
        return (self.base, self.exp)

    def _make_key(self):
        return (3, self.exp.denominator, str(self.base))

    def children(self):
        return (self.base,)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr) -> None:
        super().__init__()
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg

    def _fields(self):
        return (self.name, self.arg)

    def _make_key(self):
        return (2, self.name, str(self.arg))

    def children(self):
        return (self.arg,)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(value)
    if isinstance(value, float):
        return Num(Fraction(value).limit_denominator(10**12))
    if isinstance(value, str):
        from .parser import parse_expr
        return parse_expr(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


ZERO = Num(0)
ONE = Num(1)


# -- printing ------------------------------------------------------------

def symbol_text(s: Sym) -> str:
    if not s.derivs:
        return s.name
    return "D__" + "__".join(s.derivs) + "__" + s.name


def _num_text(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _exp_text(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def _atomic_text(e: Expr) -> str:
    """Text safe to use as the base of a power."""
    if isinstance(e, Sym):
        return symbol_text(e)
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Num) and e.value.denominator == 1 and e.value >= 0:
        return str(e.value.numerator)
    return f"({to_text(e)})"


def _split_sign(e: Expr) -> tuple[bool, Expr | None, str]:
    """Return (negative, _, magnitude text) for a term."""
    if isinstance(e, Num):
        return e.value < 0, None, _num_text(abs(e.value))
    if isinstance(e, Mul) and e.args and isinstance(e.args[0], Num):
        c = e.args[0].value
        rest = [_factor_text(f) for f in e.args[1:]]
        if abs(c) == 1:
            return c < 0, None, "*".join(rest)
        return c < 0, None, "*".join([_num_text(abs(c))] + rest)
    return False, None, _term_text(e)


def _factor_text(e: Expr) -> str:
    if isinstance(e, Add):
        return f"({to_text(e)})"
    if isinstance(e, Num):
        v = e.value
        return _num_text(v) if v >= 0 else f"({_num_text(v)})"
    return to_text(e)


def _term_text(e: Expr) -> str:
    if isinstance(e, Mul):
        return "*".join(_factor_text(f) for f in e.args)
    return _factor_text(e) if not isinstance(e, Add) else to_text(e)


def to_text(e: Expr) -> str:
    if isinstance(e, Num):
        return _num_text(e.value) if e.value >= 0 else "-" + _num_text(-e.value)
    if isinstance(e, Sym):
        return symbol_text(e)
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Pow):
        return f"{_atomic_text(e.base)}^{_exp_text(e.exp)}"
    if isinstance(e, Mul):
        negative, _, body = _split_sign(e)
        return "-" + body if negative else body
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.args):
            negative, _, body = _split_sign(t)
            if i == 0:
                parts.append("-" + body if negative else body)
            else:
                parts.append((" - " if negative else " + ") + body)
        return "".join(parts)
    raise TypeError(type(e))
