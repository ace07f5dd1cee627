"""Wavefunction evaluation by recursive Taylor summation.

psi(x) = x^sigma * sum_m A_m(x) with A_m(x) = a_m x^(2m), generated by the
recurrence obtained from matching the coefficient of x^(2n+sigma) in the
differential equation:

    A_{n+1} = [ A_{n-M} x^(2(M+1)) + sum_{k<M} v_k A_{n-k} x^(2(k+1))
                - eps A_n x^2 ] / [ s^2 (2n+2+sigma)(2n+1+sigma) ]

Only the last M+1 window values are retained, so memory is O(M) values
regardless of the number of terms.  The running maximum of |A_m| is the
observed cancellation: every digit of it is a decimal digit lost to roundoff
in the accumulated sum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import gmpy2

from .bigreal import BigReal, PrecisionCtx, log10_abs
from .potential import PotentialSpec

__all__ = ["SeriesEval", "sum_series", "recurrence_step", "log_derivative", "SeriesError", "PoleSignal"]


class SeriesError(ValueError):
    """Series evaluation precondition or budget failure."""


class PoleSignal(ArithmeticError):
    """psi == 0 at the evaluation point (a node sits exactly on x)."""


@dataclass(frozen=True)
class SeriesEval:
    """One wavefunction evaluation at fixed (eps, x, precision)."""

    psi: BigReal
    dpsi: BigReal | None
    max_abs_term: BigReal
    n_terms: int
    delta_d_observed: float
    converged: bool
    wall_ms: float = 0.0


def recurrence_step(pot: PotentialSpec, eps, sigma: int, n: int, window, xpowers):
    """One explicit recurrence step: window = (A_n, A_{n-1}, ..., A_{n-M}),
    xpowers[j] = x^(2j) for j = 0..M+1.  Entries for negative indices are zero.

    Plain reference form used by the tests; sum_series runs a fused loop with
    the same algebra.
    """
    if n < 0:
        raise SeriesError("n must be >= 0")
    if sigma not in (0, 1):
        raise SeriesError("sigma must be 0 or 1")
    ctx = xpowers[1].ctx
    s = pot.s_value(ctx)
    v = pot.coeffs(ctx)
    num = window[pot.M] * xpowers[pot.M + 1]
    for k in range(pot.M):
        num = num + v[k] * window[k] * xpowers[k + 1]
    num = num - eps * window[0] * xpowers[1]
    den = (2 * n + 2 + sigma) * (2 * n + 1 + sigma)
    return num / (s * s) / den


_RATIONAL_BIT_CAP = 512


def _rational_channels(pot: PotentialSpec, x_text: str | None):
    """Exact integer numerators over a common denominator for the
    eps-independent recurrence channels, or None when any quantity is not a
    short decimal (sizes capped so the integer multiplies stay word-cheap)."""
    if x_text is None:
        return None
    try:
        xf = Fraction(Decimal(x_text))
        sf = Fraction(Decimal(pot.s))
        vf = [Fraction(Decimal(t)) for t in pot.v]
    except (ValueError, ArithmeticError):
        return None
    s2 = sf * sf
    lead = xf ** (2 * (pot.M + 1)) / s2
    mids = [(k, vf[k] * xf ** (2 * (k + 1)) / s2) for k in range(1, pot.M)]
    c0x = xf * xf / s2
    den = lead.denominator
    for _, fr in mids:
        den = den * fr.denominator // math.gcd(den, fr.denominator)
    den = den * c0x.denominator // math.gcd(den, c0x.denominator)
    parts = [lead * den, c0x * den] + [fr * den for _, fr in mids]
    ints = []
    for fr in parts:
        assert fr.denominator == 1
        if abs(fr.numerator).bit_length() > _RATIONAL_BIT_CAP:
            return None
        ints.append(fr.numerator)
    if den.bit_length() > _RATIONAL_BIT_CAP:
        return None
    n_lead, n0x = ints[0], ints[1]
    n_mid = [(k, ints[2 + i]) for i, (k, _) in enumerate(mids)]
    return n_lead, n_mid, n0x, den


def sum_series(
    pot: PotentialSpec,
    eps: BigReal,
    sigma: int,
    x: BigReal,
    ctx: PrecisionCtx,
    max_terms: int,
    with_dpsi: bool = True,
    probe=None,
    x_text: str | None = None,
) -> SeriesEval:
    """Sum the series at x > 0, keeping a sliding window of M+1 coefficients.

    Stops once M+2 consecutive terms fall below one unit in the last place of
    the largest term seen so far (the M-term lag in the recurrence can revive
    a briefly small term, hence the M+2 consecutive requirement).
    converged=False if max_terms is exhausted first.
    """
    M = pot.M
    if sigma not in (0, 1):
        raise SeriesError("sigma must be 0 or 1")
    if max_terms < M + 2:
        raise SeriesError(f"max_terms must be >= M+2 = {M + 2}")
    if not (x > 0):
        raise SeriesError("evaluation point x must be > 0")

    t0 = time.perf_counter()
    g = ctx.gctx
    bits = ctx.mantissa_bits
    mul, add, div, sub = g.mul, g.add, g.div, g.sub

    xr = ctx.mpfr(x.raw)
    er = ctx.mpfr(eps.raw)
    sr = pot.s_value(ctx).raw
    x2 = mul(xr, xr)
    xp = [gmpy2.mpfr(1, bits)]
    for _ in range(M + 1):
        xp.append(mul(xp[-1], x2))
    inv_s2 = div(gmpy2.mpfr(1, bits), mul(sr, sr))

    # Exact-rational fast path: when x, s and the coefficients are short
    # decimals (the planner's grid x always is), every channel except the
    # eps-bearing one has an exact small-integer representation over a common
    # denominator, turning its full-width multiply into a word multiply.
    if x_text is not None and ctx.mpfr(x_text) != xr:
        x_text = None  # caller's text does not describe this x
    ratio = _rational_channels(pot, x_text)
    one = gmpy2.mpfr(1, bits)
    zero = gmpy2.mpfr(0, bits)
    if ratio is not None:
        n_lead, n_mid, n0x, den = ratio
        c0 = mul(sub(ctx.mpfr(pot.v[0]), er), ctx.mpfr(n0x))
        mid = [(k, nk) for k, nk in n_mid if nk]
        c_lead = n_lead
    else:
        den = None
        c_lead = mul(xp[M + 1], inv_s2)
        c0 = mul(mul(sub(ctx.mpfr(pot.v[0]), er), xp[1]), inv_s2)
        mid = [
            (k, mul(mul(ctx.mpfr(pot.v[k]), xp[k + 1]), inv_s2))
            for k in range(1, M)
            if not gmpy2.is_zero(ctx.mpfr(pot.v[k]))
        ]

    win = [one] + [zero] * M  # win[j] = A_{n-j}
    psi = one
    dpsi = gmpy2.mpfr(sigma, bits) if with_dpsi else None
    max_abs = one
    tiny = ctx.mpfr(f"1e-{ctx.decimal_digits}")
    thresh = tiny
    below = 0
    need_below = M + 2
    n = 0
    n_terms = 1  # A_0 counted
    converged = False
    cmp_abs = gmpy2.cmp_abs

    while n < max_terms - 1:
        num = mul(c_lead, win[M])
        for k, ck in mid:
            num = add(num, mul(ck, win[k]))
        num = add(num, mul(c0, win[0]))
        d_n = (2 * n + 2 + sigma) * (2 * n + 1 + sigma)
        a_new = div(num, den * d_n if den is not None else d_n)
        psi = add(psi, a_new)
        if with_dpsi:
            dpsi = add(dpsi, mul(a_new, 2 * (n + 1) + sigma))
        if cmp_abs(a_new, max_abs) > 0:
            max_abs = abs(a_new)
            thresh = mul(max_abs, tiny)
            below = 0
        elif cmp_abs(a_new, thresh) <= 0:
            below += 1
        else:
            below = 0
        # shift window
        for j in range(M, 0, -1):
            win[j] = win[j - 1]
        win[0] = a_new
        n += 1
        n_terms += 1
        if probe is not None and n % 512 == 0:
            probe(n, win)
        if below >= need_below:
            converged = True
            break

    # psi = x^sigma * sum, psi' = x^(sigma-1) * sum (2m+sigma) A_m
    if sigma == 1:
        psi_out = mul(psi, xr)
        dpsi_out = dpsi if with_dpsi else None
    else:
        psi_out = psi
        dpsi_out = div(dpsi, xr) if with_dpsi else None

    wall = (time.perf_counter() - t0) * 1e3
    return SeriesEval(
        psi=BigReal(psi_out, ctx),
        dpsi=BigReal(dpsi_out, ctx) if with_dpsi else None,
        max_abs_term=BigReal(max_abs, ctx),
        n_terms=n_terms,
        delta_d_observed=log10_abs(max_abs),
        converged=converged,
        wall_ms=wall,
    )


def log_derivative(se: SeriesEval, pot: PotentialSpec) -> BigReal:
    """-s * psi' / psi at the evaluation point."""
    if se.dpsi is None:
        raise SeriesError("series was evaluated without the derivative")
    if se.psi.is_zero():
        raise PoleSignal("psi vanishes at the evaluation point")
    s = pot.s_value(se.psi.ctx)
    return -(s * se.dpsi / se.psi)


def estimate_peak_index(pot: PotentialSpec, eps_approx: float, x: float) -> float:
    """Index at which |A_m| peaks: largest of the per-channel balance points
    |coef|^(1/2) x^(k+1) / (2 s) over the recurrence channels."""
    s = pot.s_float
    peaks = [x ** (pot.M + 1) / (2 * s)]
    for k in range(pot.M):
        c = float(pot.v[k]) - (eps_approx if k == 0 else 0.0)
        if c != 0.0:
            peaks.append(math.sqrt(abs(c)) * x ** (k + 1) / (2 * s))
    return max(peaks)


def estimate_terms(pot: PotentialSpec, eps_approx: float, x: float, working_digits: int) -> int:
    """A priori term-count estimate: the tail past the peak index m* decays
    per step like (m*/m)^(2/(M+1)); integrate until the drop reaches the
    working precision."""
    m_peak = max(estimate_peak_index(pot, eps_approx, x), 4.0)
    target = (pot.M + 1) * working_digits * math.log(10) / (2 * m_peak)
    # solve a*ln(a) - a + 1 = target by Newton
    a = max(math.e, target)
    for _ in range(60):
        f = a * math.log(a) - a + 1 - target
        a -= f / math.log(a)
        if a < 1.0000001:
            a = 1.0000001
    return int(math.ceil(a * m_peak)) + pot.M + 8
