"""Sparse Laurent polynomials over Q in opaque atoms.

A polynomial is a ``dict`` mapping a monomial to a nonzero ``Fraction``.
A monomial is a tuple of ``(atom, exponent)`` pairs sorted by the atom's
``sort_key``; exponents are nonzero integers (negative allowed).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyRing

Monomial = tuple
Poly = dict

ONE_MONO: Monomial = ()


def _sorted(d: dict) -> Monomial:
    if len(d) == 1:
        return tuple(d.items())
    return tuple(sorted(d.items(), key=lambda it: it[0].sort_key))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for atom, e in b:
        n = d.get(atom, 0) + e
        if n:
            d[atom] = n
        else:
            del d[atom]
    return _sorted(d)


def mono_pow(a: Monomial, k: int) -> Monomial:
    if k == 0:
        return ()
    return tuple((atom, e * k) for atom, e in a)


def mono_inv(a: Monomial) -> Monomial:
    return tuple((atom, -e) for atom, e in a)


def mono_key(m: Monomial) -> tuple:
    return tuple((atom.sort_key, e) for atom, e in m)


def const(c) -> Poly:
    c = Fraction(c)
    return {ONE_MONO: c} if c else {}


def monomial_poly(m: Monomial, c=1) -> Poly:
    return {m: Fraction(c)}


def add(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for m, c in q.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v += c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def scale(p: Poly, c) -> Poly:
    c = Fraction(c)
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def neg(p: Poly) -> Poly:
    return {m: -v for m, v in p.items()}


def mul_mono(p: Poly, m: Monomial, c=1) -> Poly:
    c = Fraction(c)
    if not m:
        return scale(p, c)
    return {mono_mul(k, m): v * c for k, v in p.items()}


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return {}
    if len(p) < len(q):
        p, q = q, p
    if len(q) == 1:
        (m, c), = q.items()
        return mul_mono(p, m, c)
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def pow_(p: Poly, k: int) -> Poly:
    if k < 0:
        raise ValueError("negative power of a polynomial")
    result = const(1)
    base = p
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def atoms(p: Poly) -> set:
    return {a for m in p for a, _ in m}


def min_exponents(p: Poly) -> dict:
    """Per-atom minimum exponent over all monomials (absent counts as 0)."""
    mins: dict = {}
    first = True
    for m in p:
        d = dict(m)
        if first:
            mins = {a: e for a, e in d.items()}
            first = False
            continue
        for a in list(mins):
            mins[a] = min(mins[a], d.get(a, 0))
        for a, e in d.items():
            if a not in mins:
                mins[a] = min(e, 0)
    return {a: e for a, e in mins.items() if e}


def content_monomial(p: Poly) -> Monomial:
    return _sorted(min_exponents(p)) if p else ()


def leading(p: Poly) -> tuple[Monomial, Fraction]:
    m = max(p, key=mono_key)
    return m, p[m]


def coeff_content(p: Poly) -> Fraction:
    """Positive rational g with p/g having coprime integer coefficients."""
    num = 0
    den = 1
    for c in p.values():
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    return Fraction(num, den)


def is_const(p: Poly) -> bool:
    return not p or (len(p) == 1 and ONE_MONO in p)


def const_value(p: Poly) -> Fraction:
    return p.get(ONE_MONO, Fraction(0)) if len(p) <= 1 else None


def derivative_parts(p: Poly):
    """Yield (coeff, monomial-without-atom, atom) for each atom occurrence, scaled by exponent."""
    for m, c in p.items():
        for i, (atom, e) in enumerate(m):
            rest = m[:i] + ((atom, e - 1),) + m[i + 1:] if e != 1 else m[:i] + m[i + 1:]
            yield c * e, rest, atom


# -- gcd via sympy's sparse polynomial rings -------------------------------

def _ring(n: int) -> PolyRing:
    return PolyRing(tuple(f"z{i}" for i in range(n)), QQ)


def cancel(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    """Divide out gcd(p, q). Both must be genuine polynomials (exponents >= 0)."""
    gens = sorted(atoms(p) | atoms(q), key=lambda a: a.sort_key)
    if not gens:
        return p, q
    index = {a: i for i, a in enumerate(gens)}
    ring = _ring(len(gens))
    n = len(gens)

    def to_ring(poly: Poly):
        d = {}
        for m, c in poly.items():
            vec = [0] * n
            for a, e in m:
                vec[index[a]] = e
            d[tuple(vec)] = QQ(c.numerator, c.denominator)
        return ring.from_dict(d)

    def from_ring(elem) -> Poly:
        out = {}
        for vec, c in elem.items():
            m = tuple((gens[i], e) for i, e in enumerate(vec) if e)
            out[m] = Fraction(int(c.numerator), int(c.denominator))
        return out

    cp, cq = to_ring(p).cancel(to_ring(q))
    return from_ring(cp), from_ring(cq)
