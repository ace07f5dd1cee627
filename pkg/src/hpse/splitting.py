"""Double-well level splitting: the lowest even/odd pair of
-s^2 psi'' + (x^2-1)^2 psi = eps psi, compared against the Zinn-Justin
tunneling asymptotics 16 sqrt(2s/pi) e^(-4/3s) e^(L(s)), L truncated at
-71 s / 96.

The parity label separates the near-degenerate pair exactly: each sector is
an independent eigenvalue problem, so no deflation is ever needed, and the
gap is an exact decimal subtraction of the two result strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

import gmpy2

from .bigreal import BigReal, make_context, render_decimal
from .eigensolver import solve_eigenvalue
from .potential import PotentialSpec

__all__ = ["SplittingReport", "solve_pair", "zinn_justin_gap", "compare_to_asymptotics",
           "SplitResolutionError", "DOUBLE_WELL_V"]

DOUBLE_WELL_V = ("1", "-2")  # (x^2 - 1)^2 = x^4 - 2 x^2 + 1


class SplitResolutionError(ValueError):
    def __init__(self, msg, required_digits=None):
        super().__init__(msg)
        self.required_digits = required_digits


@dataclass
class SplittingReport:
    s: str
    eps_plus: str
    eps_minus: str
    delta: str
    zj_estimate: str | None = None
    rel_dev: float | None = None


def double_well(s: str) -> PotentialSpec:
    return PotentialSpec(M=2, s=s, v=DOUBLE_WELL_V)


def zinn_justin_gap(s: str, P: int) -> str:
    """Asymptotic gap evaluated at P digits, L(s) truncated at order s."""
    ctx = make_context(P + 20)
    g = ctx.gctx
    sv = ctx.mpfr(s)
    if not sv > 0:
        raise ValueError("s must be > 0")
    pi = g.const_pi()
    pref = g.mul(gmpy2.mpfr(16, ctx.mantissa_bits),
                 g.sqrt(g.div(g.mul(sv, 2), pi)))
    expo = g.exp(g.div(gmpy2.mpfr(-4, ctx.mantissa_bits), g.mul(sv, 3)))
    lfac = g.exp(g.div(g.mul(sv, -71), 96))
    val = g.mul(g.mul(pref, expo), lfac)
    return render_decimal(BigReal(val, ctx), P)


def required_digits(s: str) -> int:
    """Smallest request that resolves the expected gap, with headroom."""
    zj = zinn_justin_gap(s, 20)
    mant, _, exp = zj.partition("e")
    mag = int(exp) if exp else int(math.floor(math.log10(abs(float(zj)))))
    return max(20, -mag + 15)


def solve_pair(s: str, P: int, max_terms: int | None = None,
               certify: bool = True) -> SplittingReport:
    """Solve the even and odd ground states at P digits and take the exact
    decimal gap.  Refuses up front when P cannot resolve the expected gap."""
    need = required_digits(s)
    if P < need:
        raise SplitResolutionError(
            f"P={P} cannot resolve the expected splitting; need P >= {need}",
            required_digits=need,
        )
    pot = double_well(s)
    res_plus = solve_eigenvalue(pot, 0, P, max_terms=max_terms, certify=certify)
    res_minus = solve_eigenvalue(pot, 1, P, max_terms=max_terms, certify=certify)
    with localcontext() as dctx:
        dctx.prec = 2 * P + 40
        dplus = Decimal(res_plus.epsilon)
        dminus = Decimal(res_minus.epsilon)
        gap = dminus - dplus
    if gap <= 0:
        raise ValueError(
            f"parity ordering violated: eps+ = {res_plus.epsilon}, eps- = {res_minus.epsilon}"
        )
    return SplittingReport(
        s=s,
        eps_plus=res_plus.epsilon,
        eps_minus=res_minus.epsilon,
        delta=str(gap.normalize()),
    )


def compare_to_asymptotics(report: SplittingReport, P: int | None = None) -> SplittingReport:
    """Fill in the Zinn-Justin estimate and the relative deviation
    (gap_asym - gap)/gap."""
    if Decimal(report.delta) == 0:
        raise ValueError("zero gap; cannot form a relative deviation")
    digits = P if P is not None else max(30, len(report.delta))
    zj = zinn_justin_gap(report.s, digits)
    with localcontext() as dctx:
        dctx.prec = digits + 20
        dz = Decimal(zj)
        dd = Decimal(report.delta)
        rel = (dz - dd) / dd
    report.zj_estimate = zj
    report.rel_dev = float(rel)
    return report
