"""A priori planning: obtainable precision P_est(x), roundoff loss, and the
choice of evaluation point and working precision for a requested digit count.

All quantities here are engineering estimates computed in the moderate
mpmath lane; correctness of final digits rests on the certification step in
the eigensolver, not on these numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mplane import MP, LN10
from .potential import PotentialSpec, StateIndex
from .series import estimate_terms

__all__ = [
    "PrecisionPlan",
    "pest",
    "delta_d_estimate",
    "choose_x",
    "build_plan",
    "PlanError",
]

DEFAULT_MARGIN = 10


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class PrecisionPlan:
    """Everything a solve needs to know before any high-precision work.

    checked=False skips the invariant validation; used only by the
    obtainable-precision scan, which deliberately over-resolves the truncated
    root at a fixed x beyond its deliverable digits.
    """

    target_digits: int
    eval_x: str  # decimal string, exact grid value
    working_digits: int
    sigma: int
    delta_d_est: float
    pest_at_x: float
    n_terms_est: int
    margin_digits: int = DEFAULT_MARGIN
    checked: bool = True

    def __post_init__(self):
        if not self.checked:
            return
        if self.pest_at_x < self.target_digits + self.margin_digits - 1e-9:
            raise PlanError(
                f"pest(x)={self.pest_at_x:.1f} below target+margin="
                f"{self.target_digits + self.margin_digits}"
            )
        if self.working_digits < self.target_digits + math.ceil(self.delta_d_est) + self.margin_digits:
            raise PlanError("working_digits below target + roundoff loss + margin")

    @property
    def x_float(self) -> float:
        return float(self.eval_x)


def _sqrt_vmeps(pot: PotentialSpec, eps, y):
    # clamp: y may sit a rounding error inside the turning point
    d = pot.value_mp(y) - eps
    return MP.sqrt(d) if d > 0 else MP.mpf(0)


def pest(pot: PotentialSpec, eps_approx, x) -> float:
    """Obtainable decimal digits with the boundary imposed at x:
    (2 / (s ln 10)) * integral_{x0}^{x} sqrt(V - eps).

    The square-root endpoint singularity at the turning point is removed by
    the substitution y = x0 + t^2.
    """
    eps = MP.mpf(eps_approx)
    x = MP.mpf(x)
    x0 = pot.largest_turning_point(eps)
    if x <= x0:
        raise PlanError(f"x={x} is not beyond the largest turning point {x0}")
    tmax = MP.sqrt(x - x0)

    def f(t):
        y = x0 + t * t
        return _sqrt_vmeps(pot, eps, y) * 2 * t

    integral = MP.quad(f, [0, tmax])
    s = MP.mpf(pot.s)
    return float(2 * integral / (s * LN10))


def _decay_exponent_at_x(pot: PotentialSpec, eps, x):
    """(real WKB exponent of the normalized solution at x, beyond_tail flag).

    The parity solution grows like e^(+S/s) through every classically
    forbidden band below the outermost turning point and decays past it, so
    log|psi(x)| * (-s) = [tail integral from x0 to x, if x > x0]
                       - [forbidden-band integrals up to min(x, x0)].
    """
    x0 = pot.largest_turning_point(eps)
    beyond = x > x0
    upper = x0 if beyond else x
    bands = pot.forbidden_intervals(eps, float(upper) * (1 - 1e-12))
    w_out = MP.mpf(0)
    if beyond:
        w_out = MP.quad(lambda t: _sqrt_vmeps(pot, eps, x0 + t * t) * 2 * t,
                        [0, MP.sqrt(MP.mpf(x) - x0)])
    w_in = MP.mpf(0)
    for a, b in bands:
        if b - a < 1e-13:
            continue
        w_in += MP.quad(lambda y: MP.sqrt(abs(pot.value_mp(y) - eps)), [a, b])
    return w_out - w_in, beyond


def delta_d_estimate(pot: PotentialSpec, eps_approx, x, n_theta: int = 720) -> float:
    """Decimal digits lost to cancellation: log10 of the largest circle value
    of the continued bound-state WKB exponent.

    W(theta) is continued from the real axis along the arc z = x e^(i theta),
    theta in [0, pi/2] (the even symmetry folds the rest of the circle onto
    this quadrant), with dW = sqrt(V(z) - eps) i z dtheta and the square-root
    branch followed continuously.  The starting value is the real exponent of
    the normalized solution at x (outer decay minus interior barrier growth),
    whose branch pairs with the principal square root at theta = 0.
    """
    eps = MP.mpf(eps_approx)
    x = MP.mpf(x)
    if x <= 0:
        raise PlanError("x must be > 0")
    try:
        w0, _ = _decay_exponent_at_x(pot, eps, x)
    except Exception:
        w0 = MP.mpf(0)
    s = MP.mpf(pot.s)

    scale = abs(pot.value_mp(x)) + abs(eps) + 1
    for attempt in range(3):
        # branch-continuous samples of sqrt(V(z)-eps) * i z on the arc
        h = MP.pi / 2 / n_theta
        vals = []
        prev = None
        wmin = None
        for j in range(n_theta + 1):
            z = x * MP.exp(MP.mpc(0, 1) * (h * j))
            w = pot.value_mp(z) - eps
            r = MP.sqrt(w)
            if prev is not None and MP.re(r * MP.conj(prev)) < 0:
                r = -r
            prev = r
            vals.append(MP.mpc(0, 1) * z * r)
            aw = abs(w)
            if wmin is None or aw < wmin:
                wmin = aw
        # a branch point near the arc needs a finer sweep to stay on branch
        if wmin > scale * 1e-4 or attempt == 2:
            break
        n_theta *= 8

    best = abs(w0)
    acc = MP.mpc(0)
    for j in range(1, n_theta + 1):
        acc += (vals[j] + vals[j - 1]) / 2 * h
        m = abs(MP.re(w0 + acc))
        if m > best:
            best = m
    return float(best / (s * LN10))


def choose_x(pot: PotentialSpec, eps_approx, P: int, margin: int = DEFAULT_MARGIN) -> str:
    """Smallest grid value x (step 0.1) with pest(x) >= P + margin.

    Monotonicity of pest in x turns this into a binary search on the grid;
    the returned value is an exact decimal string like '15.2'.
    """
    if P < 1:
        raise PlanError("P must be >= 1")
    target = P + margin
    x0 = float(pot.largest_turning_point(MP.mpf(eps_approx)))
    lo_idx = int(math.floor(x0 * 10)) + 1  # first grid point beyond x0

    def p_at(idx: int) -> float:
        return pest(pot, eps_approx, grid_str(idx))

    hi_idx = lo_idx + 1
    step = 1
    while p_at(hi_idx) < target:
        step *= 2
        hi_idx += step
        if hi_idx > lo_idx + 10_000_000:
            raise PlanError("evaluation point search exhausted")
    lo = lo_idx
    while lo < hi_idx:
        mid = (lo + hi_idx) // 2
        if p_at(mid) >= target:
            hi_idx = mid
        else:
            lo = mid + 1
    return grid_str(hi_idx)


def grid_str(tenths: int) -> str:
    """Exact decimal string for the grid value tenths/10."""
    if tenths % 10 == 0:
        return str(tenths // 10)
    return f"{tenths // 10}.{tenths % 10}"


def build_plan(
    pot: PotentialSpec,
    idx: StateIndex,
    P: int,
    eps_approx,
    margin: int = DEFAULT_MARGIN,
    eval_x: str | None = None,
) -> PrecisionPlan:
    """Assemble the run plan: evaluation point, working digits
    D = P + ceil(delta_d) + margin, parity and a term-count estimate."""
    x = eval_x if eval_x is not None else choose_x(pot, eps_approx, P, margin)
    p_at = pest(pot, eps_approx, x)
    if eval_x is not None and p_at < P + margin:
        raise PlanError(
            f"pest({x}) = {p_at:.1f} cannot deliver P={P} with margin {margin}"
        )
    dd = delta_d_estimate(pot, eps_approx, x)
    D = P + math.ceil(dd) + margin
    n_est = estimate_terms(pot, float(eps_approx), float(x), D)
    return PrecisionPlan(
        target_digits=P,
        eval_x=x,
        working_digits=D,
        sigma=idx.sigma,
        delta_d_est=dd,
        pest_at_x=p_at,
        n_terms_est=n_est,
        margin_digits=margin,
    )
