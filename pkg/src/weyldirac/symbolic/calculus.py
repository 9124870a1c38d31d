"""Differentiation and substitution on canonical forms."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from . import poly as P
from .canonical import (RF, cos_atom, normalize, rf_atom, rf_const, sin_atom, to_rf,
                        to_tree)
from .expr import Add, Expr, Func, Mul, Num, Pow, Sym, as_expr, symbol_text

_ATOM_DIFF: dict = {}


def _coord(x) -> Sym:
    if isinstance(x, Sym):
        if x.deps or x.derivs:
            raise ValueError(f"can only differentiate by a plain symbol, got {x}")
        return x
    if isinstance(x, str):
        return Sym(x)
    raise TypeError(f"expected a symbol, got {type(x).__name__}")


def _atom_diff(atom: Expr, x: Sym) -> RF:
    key = (atom, x.name)
    hit = _ATOM_DIFF.get(key)
    if hit is not None:
        return hit
    if isinstance(atom, Sym):
        if atom == x:
            r = rf_const(1)
        elif atom.deps and x.name in atom.deps:
            r = rf_atom(Sym(atom.name, atom.deps, atom.derivs + (x.name,)))
        else:
            r = RF({})
    elif isinstance(atom, Func):
        du = diff_rf(to_rf(atom.arg), x)
        if du.is_zero():
            r = RF({})
        elif atom.name == "exp":
            r = rf_atom(atom) * du
        elif atom.name == "log":
            r = du / to_rf(atom.arg)
        elif atom.name == "sin":
            r = rf_atom(cos_atom(atom.arg)) * du
        elif atom.name == "cos":
            r = -(rf_atom(sin_atom(atom.arg)) * du)
        else:  # pragma: no cover - tan/sqrt never survive canonicalization
            raise ValueError(f"no derivative rule for atom {atom}")
    elif isinstance(atom, Pow):
        base = to_rf(atom.base)
        db = diff_rf(base, x)
        q = atom.exp.denominator
        r = RF({}) if db.is_zero() else rf_atom(atom) * db / base.scale(q)
    else:  # pragma: no cover
        raise TypeError(type(atom))
    _ATOM_DIFF[key] = r
    return r


def _diff_poly(p: dict, x: Sym) -> RF:
    acc: dict = {}
    by_den: dict = {}
    for coef, rest, atom in P.derivative_parts(p):
        da = _atom_diff(atom, x)
        if da.is_zero():
            continue
        part = P.mul_mono(da.num, rest, coef)
        if da.is_poly:
            acc = P.add(acc, part)
        else:
            k = frozenset(da.den.items())
            if k in by_den:
                by_den[k] = (P.add(by_den[k][0], part), da.den)
            else:
                by_den[k] = (part, da.den)
    out = normalize(acc, {(): Fraction(1)}) if acc else RF({})
    for num, den in by_den.values():
        if num:
            out = out + normalize(num, den)
    return out


def diff_rf(r: RF, x: Sym) -> RF:
    dn = _diff_poly(r.num, x)
    if r.is_poly:
        return dn
    dd = _diff_poly(r.den, x)
    den = RF(dict(r.den))
    if dd.is_zero():
        return dn / den
    return dn / den - RF(dict(r.num)) * dd / (den * den)


def diff(e: Expr, x, n: int = 1) -> Expr:
    """Exact partial derivative of ``e`` by the plain symbol ``x`` (n times)."""
    x = _coord(x)
    r = to_rf(as_expr(e))
    for _ in range(n):
        r = diff_rf(r, x)
    return to_tree(r)


def substitute(e: Expr, bindings: Mapping) -> Expr:
    """Simultaneous substitution followed by canonicalization.

    Keys are symbol names (or ``Sym``); a bound field also replaces its
    formal derivatives by the derivatives of the replacement.
    """
    table = {(k.name if isinstance(k, Sym) else k): as_expr(v) for k, v in bindings.items()}
    if not table:
        return to_tree(to_rf(as_expr(e)))
    memo: dict = {}

    def walk(node: Expr) -> Expr:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Sym):
            repl = table.get(symbol_text(node)) if node.derivs else None
            if repl is not None:
                memo[node] = repl
                return repl
            repl = table.get(node.name)
            if repl is None:
                out = node
            elif node.derivs:
                out = repl
                for c in node.derivs:
                    out = diff(out, c)
            else:
                out = repl
        elif isinstance(node, Num):
            out = node
        elif isinstance(node, Add):
            out = Add([walk(a) for a in node.args])
        elif isinstance(node, Mul):
            out = Mul([walk(a) for a in node.args])
        elif isinstance(node, Pow):
            out = Pow(walk(node.base), node.exp)
        elif isinstance(node, Func):
            out = Func(node.name, walk(node.arg))
        else:  # pragma: no cover
            raise TypeError(type(node))
        memo[node] = out
        return out

    return to_tree(to_rf(walk(as_expr(e))))
