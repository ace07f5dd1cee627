"""Node counting for the truncated problem at double precision.

Sturm oscillation: the number of zeros of the initial-value solution in
(0, X) equals the number of Dirichlet-truncated eigenvalues of the given
parity sector strictly below eps.  The count anchors eigenvalue indices from
below the ground state without any high-precision work.

The sweep propagates (u, u') across cells with the exact constant-coefficient
transfer matrix (q frozen at the cell midpoint), counts oscillatory-cell
zeros from the exact phase advance and forbidden-cell zeros from endpoint
signs.  Cells shrink near turning points where q changes fastest.
"""

from __future__ import annotations

import math

from .potential import PotentialSpec

__all__ = ["sector_count", "phase_at", "count_transition", "CountingError"]


class CountingError(RuntimeError):
    pass


def _sweep(pot: PotentialSpec, sigma: int, X: float, eps: float,
           c_osc: float = 0.1, c_grad: float = 0.02):
    Vf = pot.value_float
    s = pot.s_float
    inv_s2 = 1.0 / (s * s)
    u, v = (1.0, 0.0) if sigma == 0 else (0.0, 1.0)
    count = 0
    x = 0.0
    hmax = X / 64
    dxp = 1e-6 * max(X, 1.0)
    floor, atan2, sqrt = math.floor, math.atan2, math.sqrt
    cos, sin, cosh, sinh = math.cos, math.sin, math.cosh, math.sinh
    while x < X:
        q0 = (eps - Vf(x)) * inv_s2
        qp = abs(Vf(x + dxp) - Vf(x)) / dxp * inv_s2
        h = min(hmax, c_osc / (sqrt(abs(q0)) + 1.0), X - x)
        if qp > 0.0:
            h = min(h, c_grad * max(abs(q0), qp ** (2.0 / 3.0)) / qp)
        qm = (eps - Vf(x + 0.5 * h)) * inv_s2
        if qm > 0.0:
            k = sqrt(qm)
            phi = k * h
            d = atan2(k * u, v)
            if d < 0.0:
                d += math.pi
            count += int(floor((d + phi) / math.pi)) - int(floor(d / math.pi))
            c, si = cos(phi), sin(phi)
            u, v = c * u + si / k * v, -k * si * u + c * v
        elif qm < 0.0:
            kap = sqrt(-qm)
            a = kap * h
            ch, sh = cosh(a), sinh(a)
            un = ch * u + sh / kap * v
            vn = kap * sh * u + ch * v
            if un * u < 0.0:
                count += 1
            u, v = un, vn
        else:
            un = u + h * v
            if un * u < 0.0:
                count += 1
            u, v = un, v
        m = abs(u) if abs(u) > abs(v) else abs(v)
        if m > 1e50 or (0.0 < m < 1e-50):
            u /= m
            v /= m
        x += h
    return count, u, v


def sector_count(pot: PotentialSpec, sigma: int, X: float, eps: float) -> int:
    """Number of sector-sigma truncated eigenvalues strictly below eps."""
    return _sweep(pot, sigma, X, eps)[0]


def phase_at(pot: PotentialSpec, sigma: int, X: float, eps: float) -> float:
    """Continuous phase theta(X)/pi = count + frac.  Strictly increasing in
    eps; integer crossings are the truncated eigenvalues."""
    count, u, v = _sweep(pot, sigma, X, eps)
    frac = math.atan2(u, v)
    if frac < 0.0:
        frac += math.pi
    return count + frac / math.pi


def count_transition(pot: PotentialSpec, sigma: int, X: float, k: int,
                     lo: float, hi: float, rel_width: float = 1e-9,
                     max_expand: int = 64) -> float:
    """Locate the eps where the sector count jumps from k to k+1, i.e. the
    (k+1)-th phase integer crossing, starting from the window [lo, hi] and
    widening geometrically if the window does not straddle it."""
    target = float(k + 1)
    span = hi - lo
    expand = 0
    while phase_at(pot, sigma, X, lo) >= target:
        span *= 1.7
        lo -= span
        expand += 1
        if expand > max_expand:
            raise CountingError("count window expansion exhausted (low side)")
    expand = 0
    while phase_at(pot, sigma, X, hi) < target:
        span *= 1.7
        hi += span
        expand += 1
        if expand > max_expand:
            raise CountingError("count window expansion exhausted (high side)")
    # pure bisection: deep in the forbidden region the phase is numerically a
    # step function of eps, so secant-style interpolation stalls on it
    scale = max(abs(lo), abs(hi), 1e-300)
    for _ in range(200):
        if hi - lo <= rel_width * scale:
            break
        cand = 0.5 * (lo + hi)
        if phase_at(pot, sigma, X, cand) < target:
            lo = cand
        else:
            hi = cand
    return 0.5 * (lo + hi)
