"""Rational-function normal form.

Every expression is mapped to a quotient ``num / den`` of sparse
polynomials over Q whose indeterminates ("atoms") are symbols, function
applications with canonical arguments, and radicals ``b^(1/q)``:

* ``num`` is a Laurent polynomial (negative exponents allowed except on
  radicals); ``den`` is an ordinary polynomial with no monomial factor,
  monic w.r.t. the total monomial order, and coprime to ``num``;
* ``cos(u)^k`` with ``|k| >= 2`` is rewritten through ``1 - sin(u)^2``;
  ``tan`` becomes ``sin/cos``; radicals satisfy ``(b^(1/q))^q = b``;
* ``exp`` of a sum splits into a product of ``exp`` atoms with integer
  powers, ``sin``/``cos`` of sums and integer multiples are expanded.

The canonical tree is rebuilt from this pair, so two trees denoting the
same element canonicalize identically.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import factorint

from . import poly as P
from .expr import ONE, ZERO, Add, Expr, Func, Mul, Num, Pow, Sym, as_expr

_ONE_POLY = {(): Fraction(1)}


class RF:
    """Canonical rational function ``num/den`` (see module docstring)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: dict, den: dict | None = None) -> None:
        self.num = num
        self.den = _ONE_POLY if den is None else den
        self._hash = None

    @property
    def is_poly(self) -> bool:
        return self.den is _ONE_POLY or self.den == _ONE_POLY

    def is_zero(self) -> bool:
        return not self.num

    def const_value(self) -> Fraction | None:
        if not self.is_poly:
            return None
        if not self.num:
            return Fraction(0)
        if len(self.num) == 1 and () in self.num:
            return self.num[()]
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, RF) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "RF") -> "RF":
        if self.is_poly and other.is_poly:
            return RF(P.add(self.num, other.num))
        if self.den == other.den:
            return normalize(P.add(self.num, other.num), self.den)
        return normalize(
            P.add(P.mul(self.num, other.den), P.mul(other.num, self.den)),
            P.mul(self.den, other.den),
        )

    def __neg__(self) -> "RF":
        return RF(P.neg(self.num), self.den)

    def __sub__(self, other: "RF") -> "RF":
        return self + (-other)

    def __mul__(self, other: "RF") -> "RF":
        if not self.num or not other.num:
            return RF({})
        if self.is_poly and other.is_poly:
            return normalize(P.mul(self.num, other.num), _ONE_POLY)
        return normalize(P.mul(self.num, other.num), P.mul(self.den, other.den))

    def scale(self, c) -> "RF":
        c = Fraction(c)
        if not c:
            return RF({})
        return RF(P.scale(self.num, c), self.den)

    def inv(self) -> "RF":
        if not self.num:
            raise ZeroDivisionError("division by canonical zero")
        return normalize(dict(self.den), self.num)

    def __truediv__(self, other: "RF") -> "RF":
        return self * other.inv()

    def __pow__(self, k: int) -> "RF":
        if k < 0:
            return self.inv() ** (-k)
        if k == 0:
            return rf_const(1)
        if self.is_poly:
            if len(self.num) == 1:
                (m, c), = self.num.items()
                return normalize({P.mono_pow(m, k): c ** k}, _ONE_POLY)
            return normalize(P.pow_(self.num, k), _ONE_POLY)
        out = rf_const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out


def rf_const(c) -> RF:
    return RF(P.const(c))


def rf_atom(atom: Expr, e: int = 1) -> RF:
    return RF({((atom, e),): Fraction(1)})


# -- atom relations ------------------------------------------------------

def _is_root(atom: Expr) -> bool:
    return isinstance(atom, Pow)


def _is_cos(atom: Expr) -> bool:
    return isinstance(atom, Func) and atom.name == "cos"


def _needs_reduce(p: dict) -> bool:
    for m in p:
        for a, e in m:
            if _is_cos(a):
                if e >= 2 or e <= -2:
                    return True
            elif _is_root(a) and (e < 0 or e >= a.exp.denominator):
                return True
    return False


@lru_cache(maxsize=None)
def _one_minus_sin2(cos_atom: Func) -> dict:
    s = sin_atom(cos_atom.arg)
    return {(): Fraction(1), ((s, 2),): Fraction(-1)}


def _reduce(p: dict) -> tuple[dict, bool]:
    """Apply cos^2 -> 1 - sin^2 and b^(q/q) -> b to a polynomial with exps >= 0."""
    if not _needs_reduce(p):
        return p, False
    out: dict = {}
    for m, c in p.items():
        factor = None
        keep = []
        for a, e in m:
            if _is_cos(a) and e >= 2:
                extra = P.pow_(_one_minus_sin2(a), e // 2)
                if e % 2:
                    keep.append((a, 1))
            elif _is_root(a) and e >= a.exp.denominator:
                q = a.exp.denominator
                extra = P.pow_(to_rf(a.base).num, e // q)
                if e % q:
                    keep.append((a, e % q))
            else:
                keep.append((a, e))
                continue
            factor = extra if factor is None else P.mul(factor, extra)
        if factor is None:
            out = P.add(out, {m: c})
        else:
            out = P.add(out, P.mul_mono(factor, P._sorted(dict(keep)), c))
    return out, True


def _clear(p: dict, q: dict) -> tuple[dict, dict]:
    lo: dict = {}
    for poly in (p, q):
        for a, e in P.min_exponents(poly).items():
            if e < 0:
                lo[a] = min(lo.get(a, 0), e)
    if not lo:
        return p, q
    shift = P._sorted({a: -e for a, e in lo.items()})
    return P.mul_mono(p, shift), P.mul_mono(q, shift)


def normalize(num: dict, den: dict) -> RF:
    if not num:
        return RF({})
    if den is _ONE_POLY or den == _ONE_POLY:
        if not _needs_reduce(num):
            return RF(num)
    p, q = num, den
    for _ in range(64):
        p, q = _clear(p, q)
        p, ch1 = _reduce(p)
        q, ch2 = _reduce(q)
        if not p:
            return RF({})
        if ch1 or ch2:
            continue
        content = P.min_exponents(q)
        roots = {a: e for a, e in content.items() if _is_root(a)}
        if roots:
            # rationalize radicals out of the denominator
            shift = P._sorted({a: a.exp.denominator - e % a.exp.denominator for a, e in roots.items()})
            p, q = P.mul_mono(p, shift), P.mul_mono(q, shift)
            continue
        break
    else:  # pragma: no cover - defensive
        raise RuntimeError("normalization did not converge")
    cm = P._sorted(content)
    if cm:
        inv = P.mono_inv(cm)
        q = P.mul_mono(q, inv)
        p = P.mul_mono(p, inv)
    if len(q) > 1 and len(p) > 1:
        pc = P.content_monomial(p)
        pp = P.mul_mono(p, P.mono_inv(pc)) if pc else p
        pp, q = P.cancel(pp, q)
        p = P.mul_mono(pp, pc) if pc else pp
        p, q = _reduce_again(p, q)
    _, lc = P.leading(q)
    if lc != 1:
        p = P.scale(p, 1 / lc)
        q = P.scale(q, 1 / lc)
    if q == _ONE_POLY:
        return RF(p)
    return RF(p, q)


def _reduce_again(p: dict, q: dict) -> tuple[dict, dict]:
    # cancellation never reintroduces reducible powers; kept as a guard
    if _needs_reduce(p) or _needs_reduce(q):
        r = normalize(p, q)
        return r.num, r.den
    return p, q


# -- tree conversion -------------------------------------------------------

def _atom_node(atom: Expr, e: int) -> Expr:
    if _is_root(atom):
        node = Pow(atom.base, Fraction(e, atom.exp.denominator))
        return node if e != 1 else atom
    if e == 1:
        return atom
    return Pow(atom, e)


def term_tree(m: tuple, c: Fraction) -> Expr:
    factors: list[Expr] = []
    if c != 1 or not m:
        factors.append(Num(c))
    for a, e in m:
        factors.append(_atom_node(a, e))
    if len(factors) == 1:
        node = factors[0]
    else:
        node = Mul(factors)
    if node._rf is None:
        node._rf = RF({m: Fraction(c)}) if m or c else RF({})
    return node


def _poly_tree(p: dict) -> Expr:
    if not p:
        return ZERO
    items = sorted(p.items(), key=lambda it: P.mono_key(it[0]))
    terms = [term_tree(m, c) for m, c in items]
    if len(terms) == 1:
        return terms[0]
    return Add(terms)


def to_tree(rf: RF) -> Expr:
    num = _poly_tree(rf.num)
    if rf.is_poly:
        node = num
    else:
        inv = Pow(_poly_tree(rf.den), -1)
        if isinstance(num, Mul):
            node = Mul(num.args + (inv,))
        else:
            node = Mul((num, inv))
    node._rf = rf
    return node


def to_rf(e: Expr) -> RF:
    if e._rf is not None:
        return e._rf
    if isinstance(e, Num):
        r = rf_const(e.value)
    elif isinstance(e, Sym):
        r = rf_atom(e)
    elif isinstance(e, Add):
        r = RF({})
        for a in e.args:
            r = r + to_rf(a)
    elif isinstance(e, Mul):
        r = rf_const(1)
        for a in e.args:
            r = r * to_rf(a)
    elif isinstance(e, Pow):
        r = rf_power(to_rf(e.base), e.exp)
    elif isinstance(e, Func):
        r = apply_function(e.name, to_rf(e.arg))
    else:
        raise TypeError(type(e))
    e._rf = r
    return r


def canonical(e) -> Expr:
    if not isinstance(e, Expr):
        e = as_expr(e)
    return to_tree(to_rf(e))


# -- powers and radicals --------------------------------------------------

def _int_root_split(n: int, q: int) -> tuple[int, int]:
    """Return (outside, inside) with n = outside**q * inside."""
    if n in (0, 1):
        return 1, n
    out, inside = 1, 1
    for prime, mult in factorint(n).items():
        out *= prime ** (mult // q)
        inside *= prime ** (mult % q)
    return out, inside


def rf_power(base: RF, exp: Fraction) -> RF:
    exp = Fraction(exp)
    if exp.denominator == 1:
        k = exp.numerator
        if k < 0 and base.is_zero():
            raise ZeroDivisionError("zero to a negative power")
        return base ** k
    return rf_root(base, exp.denominator) ** exp.numerator


def rf_root(base: RF, q: int) -> RF:
    if base.is_zero():
        return RF({})
    p = P.mul(base.num, P.pow_(base.den, q - 1)) if not base.is_poly else base.num
    outside = rf_const(1) if base.is_poly else RF(dict(base.den)).inv()
    # rational content
    g = P.coeff_content(p)
    a, b = g.numerator, g.denominator
    oa, ia = _int_root_split(a * b ** (q - 1), q)
    outside = outside.scale(Fraction(oa, b))
    p = P.scale(p, Fraction(ia) / g)
    # monomial content
    mins = P.min_exponents(p)
    if mins:
        pulled: dict = {}
        for atom, e in mins.items():
            if isinstance(atom, Func) and atom.name == "exp":
                pulled[atom] = e
                outside = outside * exp_of(to_rf(atom.arg).scale(Fraction(e, q)))
            else:
                k = e // q
                if k:
                    pulled[atom] = q * k
                    outside = outside * rf_atom(atom, k)
        if pulled:
            p = P.mul_mono(p, P.mono_inv(P._sorted(pulled)))
    if p == _ONE_POLY:
        return outside
    if len(p) == 1 and () in p and p[()] == 1:
        return outside
    atom = Pow(to_tree(RF(p)), Fraction(1, q))
    atom._rf = rf_atom(atom)
    return outside * atom._rf


# -- functions --------------------------------------------------------------

def _func_atom(name: str, arg: Expr) -> Func:
    node = Func(name, arg)
    node._rf = rf_atom(node)
    return node


def sin_atom(arg: Expr) -> Func:
    return _func_atom("sin", arg)


def cos_atom(arg: Expr) -> Func:
    return _func_atom("cos", arg)


def exp_of(u: RF) -> RF:
    if u.is_zero():
        return rf_const(1)
    if not u.is_poly:
        return rf_atom(_func_atom("exp", to_tree(u)))
    out = rf_const(1)
    for m, c in u.num.items():
        out = out * _exp_term(m, c)
    return out


def _exp_term(m: tuple, c: Fraction) -> RF:
    sign = 1 if c > 0 else -1
    if len(m) == 1 and m[0][1] == 1 and isinstance(m[0][0], Func) and m[0][0].name == "log":
        return rf_power(to_rf(m[0][0].arg), c)
    if c.denominator == 1:
        return rf_atom(_func_atom("exp", term_tree(m, Fraction(1)) if m else ONE), c.numerator)
    return rf_atom(_func_atom("exp", term_tree(m, abs(c))), sign)


def log_of(u: RF) -> RF:
    if u.is_zero():
        raise ValueError("log of canonical zero")
    cv = u.const_value()
    if cv == 1:
        return RF({})
    if u.is_poly and len(u.num) == 1:
        (m, c), = u.num.items()
        if c == 1 and len(m) == 1 and isinstance(m[0][0], Func) and m[0][0].name == "exp":
            atom, k = m[0]
            return to_rf(atom.arg).scale(k)
    return rf_atom(_func_atom("log", to_tree(u)))


def _angle_sum(s1: RF, c1: RF, s2: RF, c2: RF) -> tuple[RF, RF]:
    return s1 * c2 + c1 * s2, c1 * c2 - s1 * s2


def _trig_term(m: tuple, c: Fraction) -> tuple[RF, RF]:
    sign = 1 if c > 0 else -1
    a = abs(c)
    if m and a.denominator == 1:
        arg = term_tree(m, Fraction(1))
        n = a.numerator
    else:
        arg = term_tree(m, a)
        n = 1
    s1, c1 = rf_atom(sin_atom(arg)), rf_atom(cos_atom(arg))
    s, co = s1, c1
    for _ in range(n - 1):
        s, co = _angle_sum(s, co, s1, c1)
    return s.scale(sign), co


def trig_of(u: RF) -> tuple[RF, RF]:
    """Return (sin u, cos u)."""
    if u.is_zero():
        return RF({}), rf_const(1)
    if u.is_poly:
        s, c = RF({}), rf_const(1)
        for m, coeff in u.num.items():
            si, ci = _trig_term(m, coeff)
            s, c = _angle_sum(s, c, si, ci)
        return s, c
    sign = 1
    _, lc = P.leading(u.num)
    if lc < 0:
        u, sign = -u, -1
    arg = to_tree(u)
    return rf_atom(sin_atom(arg)).scale(sign), rf_atom(cos_atom(arg))


def apply_function(name: str, u: RF) -> RF:
    if name == "exp":
        return exp_of(u)
    if name == "log":
        return log_of(u)
    if name == "sqrt":
        return rf_root(u, 2)
    s, c = trig_of(u)
    if name == "sin":
        return s
    if name == "cos":
        return c
    if name == "tan":
        return s / c
    raise ValueError(f"unknown function {name!r}")


# -- Expr-level helpers ----------------------------------------------------

def add(*es: Expr) -> Expr:
    r = RF({})
    for e in es:
        r = r + to_rf(e)
    return to_tree(r)


def mul(*es: Expr) -> Expr:
    r = rf_const(1)
    for e in es:
        r = r * to_rf(e)
    return to_tree(r)


def neg(e: Expr) -> Expr:
    return to_tree(-to_rf(e))


def div(a: Expr, b: Expr) -> Expr:
    return to_tree(to_rf(a) / to_rf(b))


def power(e: Expr, k) -> Expr:
    return to_tree(rf_power(to_rf(e), Fraction(k)))


def func(name: str, e: Expr) -> Expr:
    return to_tree(apply_function(name, to_rf(e)))


def is_zero(e: Expr) -> bool:
    return to_rf(e).is_zero()


def const_value(e: Expr) -> Fraction | None:
    return to_rf(e).const_value()


def simplify(e: Expr) -> Expr:
    """Canonical form; idempotent and value preserving."""
    return canonical(e)


def total_sum(es) -> Expr:
    r = RF({})
    for e in es:
        r = r + to_rf(e)
    return to_tree(r)


__all__ = [
    "RF", "to_rf", "to_tree", "canonical", "simplify", "add", "mul", "neg", "div",
    "power", "func", "is_zero", "const_value", "total_sum", "ZERO", "ONE",
]
