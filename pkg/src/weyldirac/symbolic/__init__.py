"""Exact scalar expressions: parsing, canonical form, calculus, numerics."""

from .calculus import diff, substitute
from .canonical import canonical, const_value, func, is_zero, simplify
from .expr import Add, Expr, Func, Mul, Num, Pow, Sym, as_expr, to_text
from .numeric import (EvalDomainError, Equivalence, EquivResult, UnboundSymbolError,
                      equiv, eval_numeric, lambdify)
from .parser import ParseError, parse_expr

__all__ = [
    "Add", "Expr", "Func", "Mul", "Num", "Pow", "Sym", "as_expr", "to_text",
    "canonical", "simplify", "const_value", "func", "is_zero",
    "diff", "substitute",
    "EvalDomainError", "UnboundSymbolError", "Equivalence", "EquivResult", "equiv",
    "eval_numeric", "lambdify",
    "ParseError", "parse_expr",
]
