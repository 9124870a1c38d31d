"""Formal action integrands over a fixed set of scalar generators.

Every generator already carries its beta factors, so an integrand is a
plain linear combination with coefficients in the parameters
sigma, alpha, gamma, Lambda, m and c.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .riemann import RicciConvention
from .symbolic import Expr, Sym, as_expr, canonical, diff, is_zero, substitute
from .tensor import TensorField

SIGMA, ALPHA, GAMMA, LAMBDA, M, C = (Sym(n) for n in ("sigma", "alpha", "gamma", "Lambda", "m", "c"))


class Gen(enum.Enum):
    R = "beta^2 R"
    R_HAT = "beta^2 R_hat"
    DB2 = "(d beta)^2"
    B2DIVW = "beta^2 div w"
    BWDB = "beta w.d beta"
    B2W2 = "beta^2 |w|^2"
    B4 = "beta^4"
    W2 = "W^{lm} W_{lm}"
    LM = "L_M"
    DPSI2 = "phi_hat (d phi_hat / phi_hat)^2"


class Density(enum.Enum):
    SQRT_G = "sqrt(-g)"
    SQRT_GHAT = "sqrt(-g_hat)"


# beta^2 div w = div(beta^2 w) - 2 beta w.d beta
DIVERGENCE_SHAPE = "div(beta^2 w)"
DIVERGENCE_EXPANSION = {Gen.B2DIVW: 1, Gen.BWDB: 2}


@dataclass(frozen=True)
class DivergenceTerm:
    coeff: Expr
    shape: str = DIVERGENCE_SHAPE

    def __str__(self) -> str:
        return f"({self.coeff}) * {self.shape}"


@dataclass(frozen=True)
class Integrand:
    """Linear combination of generators with a density tag and divergence ledger.

    ``convention`` records which Ricci sign the R and R_hat generators use.
    """

    coeffs: Mapping[Gen, Expr]
    density: Density = Density.SQRT_G
    ledger: tuple[DivergenceTerm, ...] = ()
    convention: RicciConvention = RicciConvention.WEYL_DIRAC

    def __post_init__(self) -> None:
        clean = {}
        for g in Gen:
            if g in self.coeffs:
                c = canonical(as_expr(self.coeffs[g]))
                if not is_zero(c):
                    clean[g] = c
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, g: Gen) -> Expr:
        return self.coeffs.get(g, as_expr(0))

    def support(self) -> frozenset[Gen]:
        return frozenset(self.coeffs)

    def _with(self, coeffs, ledger=None) -> "Integrand":
        return Integrand(coeffs, self.density, self.ledger if ledger is None else ledger,
                         self.convention)

    def __add__(self, other: "Integrand") -> "Integrand":
        if other.density is not self.density or other.convention is not self.convention:
            raise ValueError("cannot add integrands with different density or convention")
        coeffs = dict(self.coeffs)
        for g, c in other.coeffs.items():
            coeffs[g] = coeffs.get(g, 0) + c
        return self._with(coeffs, self.ledger + other.ledger)

    def __sub__(self, other: "Integrand") -> "Integrand":
        return self + other.scaled(-1)

    def scaled(self, k) -> "Integrand":
        k = as_expr(k)
        return self._with({g: c * k for g, c in self.coeffs.items()},
                          tuple(DivergenceTerm(t.coeff * k, t.shape) for t in self.ledger))

    def drop(self, *gens: Gen) -> "Integrand":
        return self._with({g: c for g, c in self.coeffs.items() if g not in gens})

    def subs(self, bindings: Mapping) -> "Integrand":
        return self._with({g: substitute(c, bindings) for g, c in self.coeffs.items()},
                          tuple(DivergenceTerm(substitute(t.coeff, bindings), t.shape)
                                for t in self.ledger))

    def same_terms(self, other: "Integrand") -> bool:
        return self.coeffs == other.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*[{g.value}]" for g, c in self.coeffs.items())


def ledger_as_integrand(I: Integrand) -> Integrand:
    """Expand every ledger entry back into generators."""
    coeffs: dict = {}
    for t in I.ledger:
        for g, k in DIVERGENCE_EXPANSION.items():
            coeffs[g] = coeffs.get(g, 0) + t.coeff * k
    return Integrand(coeffs, I.density, (), I.convention)


def dirac_integrand(sigma=SIGMA) -> Integrand:
    """W^2 - beta^2 R + s beta^2|w|^2 + (s+6)(d beta)^2 + 2 s beta w.d beta + 2 Lambda beta^4 + L_M."""
    s = as_expr(sigma)
    return Integrand({Gen.W2: 1, Gen.R: -1, Gen.B2W2: s, Gen.DB2: s + 6, Gen.BWDB: 2 * s,
                      Gen.B4: 2 * LAMBDA, Gen.LM: 1})


def rosen_integrand(sigma=SIGMA, cosmological: bool = True, matter: bool = True) -> Integrand:
    """-beta^2 R + (s+6)(d beta)^2, optionally with 2 Lambda beta^4 and L_M."""
    s = as_expr(sigma)
    coeffs = {Gen.R: -1, Gen.DB2: s + 6}
    if cosmological:
        coeffs[Gen.B4] = 2 * LAMBDA
    if matter:
        coeffs[Gen.LM] = 1
    return Integrand(coeffs)


def w_form_contributions(I: Integrand, w_sign: int = 1) -> dict[Gen, Expr]:
    """(d beta)^2 amounts produced by each rewritten generator.

    With w = -2 w_sign d log(beta): beta^2|w|^2 = 4 (d beta)^2 and
    beta w.d beta = -2 w_sign (d beta)^2.
    """
    return {Gen.B2W2: canonical(4 * I[Gen.B2W2]),
            Gen.BWDB: canonical(-2 * w_sign * I[Gen.BWDB])}


def substitute_w_form(I: Integrand, w_sign: int = 1, integrable: bool = False) -> Integrand:
    """Rewrite the w-dependent generators for a pure-gauge w; W^2 -> 0 if integrable."""
    parts = w_form_contributions(I, w_sign)
    coeffs = dict(I.coeffs)
    coeffs.pop(Gen.B2W2, None)
    coeffs.pop(Gen.BWDB, None)
    coeffs[Gen.DB2] = I[Gen.DB2] + parts[Gen.B2W2] + parts[Gen.BWDB]
    if integrable:
        coeffs.pop(Gen.W2, None)
    return I._with(coeffs)


def integrate_by_parts(I: Integrand) -> Integrand:
    """k beta^2 div w -> -2k beta w.d beta, logging k div(beta^2 w)."""
    k = I[Gen.B2DIVW]
    if is_zero(k):
        return I
    coeffs = dict(I.coeffs)
    coeffs.pop(Gen.B2DIVW)
    coeffs[Gen.BWDB] = I[Gen.BWDB] - 2 * k
    return I._with(coeffs, I.ledger + (DivergenceTerm(k),))


# Conformal chain along one abstract coordinate s:
# Omega^2 = phi = phi_hat^-1 = beta^2 / m^2, 4D density factor Omega^4.
_S = "s"
_BETA = Sym("beta", (_S,))
_PHI_HAT = canonical(M ** 2 / _BETA ** 2)
_OMEGA2 = canonical(_BETA ** 2 / M ** 2)


def density_factor() -> Expr:
    """phi_hat sqrt(-g_hat) / sqrt(-g) = beta^2 / m^2."""
    return canonical(_PHI_HAT * _OMEGA2 ** 2)


def weyl_scalar_expansion(convention: RicciConvention) -> dict[Gen, int]:
    """beta^2 R_hat in terms of beta^2 R, beta^2 div w and beta^2 |w|^2."""
    s = -convention.sign  # WEYL_DIRAC: R - 6 div w + 6|w|^2
    return {Gen.R: 1, Gen.B2DIVW: -6 * s, Gen.B2W2: 6 * s}


def cgr_I1_steps(w_sign: int = 1,
                 convention: RicciConvention = RicciConvention.SPHERE_POSITIVE) -> list[tuple[str, Integrand]]:
    """Named intermediate integrands of the first CGR integral."""
    k = canonical(density_factor() / _BETA ** 2)  # 1/m^2 once beta^2 moves into the generator
    start = Integrand({Gen.R_HAT: k}, Density.SQRT_G, (), convention)
    expanded = Integrand({g: k * c for g, c in weyl_scalar_expansion(convention).items()},
                         Density.SQRT_G, (), convention)
    ibp = integrate_by_parts(expanded)
    final = substitute_w_form(ibp, w_sign=w_sign, integrable=True)
    return [("density", start), ("expand", expanded), ("ibp", ibp), ("w-form", final)]


def cgr_I1(w_sign: int = 1,
           convention: RicciConvention = RicciConvention.SPHERE_POSITIVE) -> Integrand:
    return cgr_I1_steps(w_sign, convention)[-1][1]


def cgr_I2(alpha=ALPHA, keep_gamma: bool = False) -> Integrand:
    """-gamma phi_hat (d phi_hat/phi_hat)^2 sqrt(-g_hat) rewritten in (d beta)^2."""
    dlog = canonical(diff(_PHI_HAT, _S) / _PHI_HAT)  # -2 beta'/beta
    kinetic = canonical(dlog ** 2 * density_factor())  # times sqrt(-g)
    dbeta = Sym("beta", (_S,), (_S,))
    per_db2 = canonical(kinetic / dbeta ** 2)
    if per_db2.free_symbols() & {_BETA, dbeta}:
        raise ArithmeticError("kinetic term did not reduce to a multiple of (d beta)^2")
    gamma = GAMMA if keep_gamma else as_expr(alpha) - as_expr("3/2")
    return Integrand({Gen.DB2: -gamma * per_db2}, Density.SQRT_G, (),
                     RicciConvention.SPHERE_POSITIVE)


def assemble_cgr(alpha=ALPHA) -> Integrand:
    """I1 + I2 = (1/m^2)(beta^2 R - 4(alpha - 3/2)(d beta)^2)."""
    return cgr_I1() + cgr_I2(alpha)


def to_convention(I: Integrand, convention: RicciConvention) -> Integrand:
    """Re-express the curvature generators in another Ricci sign convention."""
    if I.convention is convention:
        return I
    coeffs = {g: (-c if g in (Gen.R, Gen.R_HAT) else c) for g, c in I.coeffs.items()}
    return Integrand(coeffs, I.density, I.ledger, convention)


def normalized(I: Integrand,
               convention: RicciConvention = RicciConvention.SPHERE_POSITIVE) -> Integrand:
    """Common Ricci convention, then divide by the beta^2 R coefficient."""
    J = to_convention(I, convention)
    r = J[Gen.R]
    if is_zero(r):
        raise ValueError("integrand has no beta^2 R term to normalize by")
    return J.scaled(canonical(1 / r))


class MatchStatus(enum.Enum):
    SOLVED = "SOLVED"
    NO_SOLUTION = "NO_SOLUTION"


@dataclass(frozen=True)
class MatchResult:
    status: MatchStatus
    solution: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status is MatchStatus.SOLVED


MATCH_SPAN = frozenset({Gen.R, Gen.DB2})


def match_actions(cgr: Integrand, rosen: Integrand, param: Sym | str = SIGMA) -> MatchResult:
    """Solve for ``param`` so both integrands agree on the beta^2 R, (d beta)^2 span."""
    name = param.name if isinstance(param, Sym) else param
    for label, I in (("cgr", cgr), ("rosen", rosen)):
        extra = sorted(g.name for g in I.support() - MATCH_SPAN)
        if extra:
            return MatchResult(MatchStatus.NO_SOLUTION,
                               reason=f"{label} integrand has terms outside the span: {', '.join(extra)}")
    try:
        a, b = normalized(cgr), normalized(rosen)
    except ValueError as exc:
        return MatchResult(MatchStatus.NO_SOLUTION, reason=str(exc))
    eq = canonical(b[Gen.DB2] - a[Gen.DB2])
    slope = diff(eq, name)
    if not is_zero(diff(slope, name)):
        return MatchResult(MatchStatus.NO_SOLUTION, reason=f"equation is not linear in {name}")
    if is_zero(slope):
        if is_zero(eq):
            return MatchResult(MatchStatus.SOLVED, {}, reason="identical for every value")
        return MatchResult(MatchStatus.NO_SOLUTION, reason=f"(d beta)^2 coefficient does not involve {name}")
    value = canonical(-substitute(eq, {name: 0}) / slope)
    return MatchResult(MatchStatus.SOLVED, {name: value})


def compose_2L(w: TensorField, c=C, beta: Sym | None = None) -> TensorField:
    """W_m = w_m + c d_m log(beta)."""
    chart = w.chart
    beta = beta if beta is not None else chart.field("beta")
    c = as_expr(c)
    comps = [w[i] + c * diff(beta, x) / beta for i, x in enumerate(chart.coords)]
    return TensorField.covector(chart, comps, name="W")
