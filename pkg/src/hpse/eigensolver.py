"""Locate and refine eigenvalues.

Pipeline per state: a leading-order WKB estimate seeds a double-precision
node-count search that isolates the k-th sector eigenvalue with a certified
index (counts anchor at zero below the ground state); the bracket is then
narrowed by a precision ladder of guarded-secant stages on the boundary
mismatch, with sign brackets maintained at every step; a second run at a
larger evaluation point certifies the digits.

Working precision per stage is target-capacity + estimated cancellation +
margin: the mismatch sign at a given epsilon resolution is reliable only
once the working digits clear the largest series term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2

from .bigreal import BigReal, PrecisionCtx, make_context, mantissa_exp10, render_decimal
from .counting import count_transition, sector_count
from .estimator import (
    DEFAULT_MARGIN,
    PrecisionPlan,
    build_plan,
    choose_x,
    delta_d_estimate,
    pest,
)
from .mplane import MP
from .potential import PotentialSpec, StateIndex
from .series import estimate_terms, sum_series

__all__ = [
    "EigResult",
    "EvalTelemetry",
    "low_precision_estimate",
    "bracket_eigenvalue",
    "refine",
    "certify_digits",
    "sensitivity",
    "obtainable_precision_scan",
    "solve_eigenvalue",
    "BracketingError",
    "ConvergenceError",
    "CertificationError",
]

SCAN_EXTRA_DIGITS = 40


class BracketingError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


class CertificationError(RuntimeError):
    def __init__(self, msg, first=None, second=None):
        super().__init__(msg)
        self.first = first
        self.second = second


@dataclass(frozen=True)
class EvalTelemetry:
    working_digits: int
    n_terms: int
    delta_d_observed: float
    wall_ms: float
    eps_sample: str


@dataclass
class EigResult:
    epsilon: str
    index: StateIndex
    digits_requested: int
    digits_certified: int
    plan: PrecisionPlan
    telemetry: list[EvalTelemetry] = field(default_factory=list)
    bc: str = "dirichlet"
    epsilon_exact: str = ""  # exact-roundtrip string at full working precision


# ---------------------------------------------------------------------------
# low-precision estimate: leading-order quantization
# ---------------------------------------------------------------------------

def _action(pot: PotentialSpec, eps) -> "MP.mpf":
    """integral of sqrt(eps - V) over the classically allowed part of the
    positive axis, doubled for the even reflection."""
    eps = MP.mpf(eps)
    try:
        x0 = pot.largest_turning_point(eps)
    except Exception:
        return MP.mpf(0)
    forb = pot.forbidden_intervals(eps, float(x0) * (1 - 1e-15))
    # allowed intervals = complement of forbidden bands in [0, x0]
    pts = [MP.mpf(0)]
    for a, b in forb:
        pts += [MP.mpf(a), MP.mpf(b)]
    pts.append(x0)
    total = MP.mpf(0)
    for i in range(0, len(pts) - 1, 2):
        a, b = pts[i], pts[i + 1]
        if b - a <= 0:
            continue
        total += MP.quad(lambda y: MP.sqrt(abs(eps - pot.value_mp(y))), [a, b])
    return 2 * total


def low_precision_estimate(pot: PotentialSpec, idx: StateIndex) -> float:
    """Leading-order quantization integral = (n + 1/2) pi s, solved by
    bisection.  Exact for the harmonic oscillator; elsewhere a bracketing
    seed only (the ground state of a deep double well comes out a factor
    ~2 low, which the count search absorbs)."""
    s = MP.mpf(pot.s)
    target = (idx.n + MP.mpf(1) / 2) * MP.pi * s
    _, vmin = pot.min_on_axis()
    lo = MP.mpf(vmin)
    hi = MP.mpf(vmin) + max(1.0, abs(vmin))
    for _ in range(200):
        if _action(pot, hi) > target:
            break
        hi = vmin + (hi - vmin) * 2
    else:
        raise BracketingError("quantization bracket search exhausted")
    for _ in range(80):
        mid = (lo + hi) / 2
        if _action(pot, mid) > target:
            hi = mid
        else:
            lo = mid
    return float((lo + hi) / 2)


# ---------------------------------------------------------------------------
# mismatch
# ---------------------------------------------------------------------------

def _roundtrip_digits(ctx: PrecisionCtx) -> int:
    return int(math.ceil(ctx.mantissa_bits * math.log10(2))) + 3


def _exact_str(raw, ctx: PrecisionCtx) -> str:
    """Decimal string that reparses to the identical mpfr at >= ctx bits."""
    ds, e10 = mantissa_exp10(raw, _roundtrip_digits(ctx))
    neg = ds.startswith("-")
    body = ds.lstrip("-")
    return ("-" if neg else "") + f"0.{body}e{e10}"


def _mismatch_fn(pot: PotentialSpec, plan: PrecisionPlan, bc: str, ctx: PrecisionCtx,
                 max_terms: int, telemetry: list[EvalTelemetry] | None, eval_hook=None):
    """Returns f(eps_raw) -> mpfr whose sign changes exactly at the truncated
    eigenvalues: Dirichlet psi(x; eps), or the Robin form -s psi' - R psi."""
    x = BigReal.from_str(plan.eval_x, ctx)
    dirichlet = bc == "dirichlet"
    if not dirichlet:
        vx = pot.value(x)
        s_big = pot.s_value(ctx)

    counter = [0]
    warned = [False]

    def f(eps_raw):
        eps = BigReal(ctx.mpfr(eps_raw), ctx)
        se = sum_series(pot, eps, plan.sigma, x, ctx, max_terms,
                        with_dpsi=not dirichlet, x_text=plan.eval_x)
        if not se.converged:
            raise ConvergenceError(
                f"series did not converge within {max_terms} terms at D={ctx.decimal_digits}"
            )
        if se.delta_d_observed > plan.delta_d_est + 5 and not warned[0]:
            # circle-maximum assumption underestimating the loss: surface it
            import warnings

            warnings.warn(
                f"observed cancellation {se.delta_d_observed:.1f} digits exceeds "
                f"the a priori estimate {plan.delta_d_est:.1f} by more than 5"
            )
            warned[0] = True
        if telemetry is not None:
            telemetry.append(EvalTelemetry(
                working_digits=ctx.decimal_digits,
                n_terms=se.n_terms,
                delta_d_observed=se.delta_d_observed,
                wall_ms=se.wall_ms,
                eps_sample=render_decimal(eps, min(12, ctx.decimal_digits)),
            ))
        counter[0] += 1
        if eval_hook is not None:
            eval_hook(counter[0])
        if dirichlet:
            return se.psi.raw
        r = (vx - eps).sqrt()
        return (-(s_big * se.dpsi) - r * se.psi).raw

    return f


def _default_max_terms(plan: PrecisionPlan, override: int | None) -> int:
    if override is not None:
        return override
    return max(4 * plan.n_terms_est, 100 * plan.target_digits, 4000)


# ---------------------------------------------------------------------------
# bracketing
# ---------------------------------------------------------------------------

def bracket_eigenvalue(
    pot: PotentialSpec,
    idx: StateIndex,
    plan: PrecisionPlan,
    bc: str = "dirichlet",
    eps_tilde: float | None = None,
    max_terms: int | None = None,
    telemetry: list[EvalTelemetry] | None = None,
) -> tuple[str, str]:
    """Index-certified bracket (lo, hi) around the n-th eigenvalue.

    The node-count transition pins the k-th sector state counting from the
    below-ground anchor; endpoints are then verified by the sign of the
    high-precision mismatch (at scan precision = cancellation + 40 digits)
    and widened geometrically on anomaly.
    """
    if eps_tilde is None:
        eps_tilde = low_precision_estimate(pot, idx)
    X = plan.x_float
    k = idx.k_in_sector
    w0 = 0.2 * max(abs(eps_tilde), 1e-9)
    t_star = count_transition(pot, plan.sigma, X, k, eps_tilde - w0, eps_tilde + w0)
    scale = max(1.0, abs(t_star))

    scan_digits = int(math.ceil(plan.delta_d_est)) + SCAN_EXTRA_DIGITS
    ctx = make_context(scan_digits)
    mt = max_terms if max_terms is not None else _default_max_terms(plan, None)
    f = _mismatch_fn(pot, plan, bc, ctx, mt, telemetry)

    half = 1e-4 * scale
    for _ in range(10):
        if (sector_count(pot, plan.sigma, X, t_star - half) == k
                and sector_count(pot, plan.sigma, X, t_star + half) == k + 1):
            break
        half /= 4
        if half < 1e-13 * scale:
            raise BracketingError("count certification window collapsed")
    for _attempt in range(4):
        lo, hi = t_star - half, t_star + half
        flo = f(repr(lo))
        fhi = f(repr(hi))
        if gmpy2.sign(flo) * gmpy2.sign(fhi) < 0:
            return repr(lo), repr(hi)
        half *= 8
        if not (sector_count(pot, plan.sigma, X, t_star - half) == k
                and sector_count(pot, plan.sigma, X, t_star + half) == k + 1):
            raise BracketingError("mismatch sign does not isolate the counted state")
    raise BracketingError("mismatch sign check failed after widening")


# ---------------------------------------------------------------------------
# precision ladder
# ---------------------------------------------------------------------------

def _stage_schedule(P: int, start_capacity: int = 8) -> list[int]:
    """Capacity targets per stage, tripling until the requested digits."""
    t = max(26, 3 * start_capacity)
    ts = []
    while t < P:
        ts.append(t)
        t = 3 * t + 6
    ts.append(P)
    return ts


def _stage_iterate(f, g, lo, hi, flo, fhi, tol, budget=240):
    """Guarded secant with one-step memory inside a sign bracket.

    Candidates come from the secant through the last two evaluations.  A
    proposal falling within `pad` of an endpoint is nudged to exactly
    endpoint +- pad (the root often hugs one endpoint; rejecting such
    proposals to the midpoint would degrade to bisection), one outside the
    bracket falls back to the midpoint.  The sign bracket is never lost.
    Deterministic function of the inputs.
    """
    p_prev, f_prev = lo, flo
    p_cur, f_cur = hi, fhi
    it = 0
    w_two_ago = None
    force_bisect = False
    while g.sub(hi, lo) > tol:
        it += 1
        if it > budget:
            raise ConvergenceError("stage iteration budget exhausted")
        w = g.sub(hi, lo)
        if w_two_ago is not None and g.mul(w, 2) > w_two_ago:
            force_bisect = True  # insufficient shrink over two iterations
        w_two_ago = w
        cand = None
        if not force_bisect:
            den = g.sub(f_cur, f_prev)
            if not gmpy2.is_zero(den):
                c = g.div(g.sub(g.mul(p_prev, f_cur), g.mul(p_cur, f_prev)), den)
                if lo < c < hi:
                    cand = c
        if cand is None:
            cand = g.div(g.add(lo, hi), 2)
            force_bisect = False
        fc = f(cand)
        if gmpy2.is_zero(fc):
            lo = hi = cand
            flo = fhi = fc
            break
        if gmpy2.sign(fc) == gmpy2.sign(flo):
            lo, flo = cand, fc
        else:
            hi, fhi = cand, fc
        p_prev, f_prev = p_cur, f_cur
        p_cur, f_cur = cand, fc
    return lo, hi


def refine(
    pot: PotentialSpec,
    idx: StateIndex,
    brkt: tuple[str, str],
    plan: PrecisionPlan,
    bc: str = "dirichlet",
    max_terms: int | None = None,
    telemetry: list[EvalTelemetry] | None = None,
    checkpoint_cb=None,
    start_stage: int = 0,
    start_capacity: int = 8,
    eval_hook=None,
) -> EigResult:
    """Drive the bracket down to |hi - lo| <= 10^-P max(1, |eps|) through the
    precision ladder.  Endpoints cross stage boundaries as exact-roundtrip
    decimal strings, which makes a resumed run bit-identical to an
    uninterrupted one."""
    P = plan.target_digits
    telemetry = telemetry if telemetry is not None else []
    mt = _default_max_terms(plan, max_terms)
    dd_ceil = int(math.ceil(plan.delta_d_est))
    lo_str, hi_str = brkt
    scale_int = max(1, int(math.ceil(abs(float(gmpy2.mpfr(lo_str, 64))))))

    stages = _stage_schedule(P, start_capacity)
    if stages[0] + dd_ceil + plan.margin_digits + 10 >= plan.working_digits - 40:
        # cancellation dominates the working precision: intermediate stages
        # would all run at essentially full cost, so go straight to target
        stages = [P]
    for j, t in enumerate(stages):
        if j < start_stage:
            continue
        D_j = min(plan.working_digits, t + dd_ceil + plan.margin_digits + 10)
        ctx = make_context(D_j)
        g = ctx.gctx
        f = _mismatch_fn(pot, plan, bc, ctx, mt, telemetry, eval_hook=eval_hook)
        lo = ctx.mpfr(lo_str)
        hi = ctx.mpfr(hi_str)
        flo = f(lo)
        fhi = f(hi)
        if gmpy2.sign(flo) * gmpy2.sign(fhi) >= 0:
            # sign anomaly: widen once around the midpoint before giving up
            w = g.sub(hi, lo)
            lo = g.sub(lo, g.mul(w, 2))
            hi = g.add(hi, g.mul(w, 2))
            flo = f(lo)
            fhi = f(hi)
            if gmpy2.sign(flo) * gmpy2.sign(fhi) >= 0:
                raise BracketingError(
                    f"mismatch sign lost entering stage {j} (D={D_j}); re-bracket needed"
                )
        tol = ctx.mpfr(f"{scale_int}e-{t}")
        lo, hi = _stage_iterate(f, g, lo, hi, flo, fhi, tol)
        if j + 1 < len(stages):
            # hand the next stage a bracket no narrower than this stage's
            # trust radius: the root of the mismatch shifts between working
            # precisions by up to its noise resolution, and a bracket
            # polished below that shift would lose the sign change
            mid = g.div(g.add(lo, hi), 2)
            lo = g.sub(mid, tol)
            hi = g.add(mid, tol)
        lo_str, hi_str = _exact_str(lo, ctx), _exact_str(hi, ctx)
        if checkpoint_cb is not None:
            checkpoint_cb(j + 1, lo_str, hi_str)

    ctx = make_context(plan.working_digits)
    mid = ctx.gctx.div(ctx.gctx.add(ctx.mpfr(lo_str), ctx.mpfr(hi_str)), 2)
    eps_str = render_decimal(BigReal(mid, ctx), P)
    return EigResult(
        epsilon=eps_str,
        index=idx,
        digits_requested=P,
        digits_certified=0,
        plan=plan,
        telemetry=telemetry,
        bc=bc,
        epsilon_exact=_exact_str(mid, ctx),
    )


# ---------------------------------------------------------------------------
# certification, sensitivity, scans
# ---------------------------------------------------------------------------

def _grid_above(x_str: str) -> str:
    from fractions import Fraction

    from .estimator import grid_str

    tenths = Fraction(x_str) * 10
    return grid_str(int(tenths) + 1)


def certify_digits(
    pot: PotentialSpec,
    idx: StateIndex,
    result: EigResult,
    plan: PrecisionPlan,
    eps_tilde: float | None = None,
    max_terms: int | None = None,
) -> int:
    """Re-solve at a strictly larger evaluation point with 20 extra digits and
    count the leading digits the two runs agree on."""
    P = plan.target_digits
    if eps_tilde is None:
        eps_tilde = low_precision_estimate(pot, idx)
    x2 = choose_x(pot, eps_tilde, P + 20, plan.margin_digits)
    if float(x2) <= plan.x_float:
        x2 = _grid_above(plan.eval_x)
    plan2 = build_plan(pot, idx, P + 20, eps_tilde, plan.margin_digits, eval_x=x2)

    ctx2 = make_context(plan2.working_digits)
    g = ctx2.gctx
    e1 = ctx2.mpfr(result.epsilon_exact or result.epsilon)
    scale_int = max(1, int(math.ceil(abs(float(e1)))))
    delta = ctx2.mpfr(f"{scale_int}e-{max(P - 5, 1)}")
    lo = g.sub(e1, delta)
    hi = g.add(e1, delta)
    brkt2 = (_exact_str(lo, ctx2), _exact_str(hi, ctx2))
    try:
        second = refine(pot, idx, brkt2, plan2, result.bc, max_terms,
                        telemetry=result.telemetry, start_capacity=max(P - 8, 8))
    except BracketingError as exc:
        raise CertificationError(
            f"certification run does not agree within 10^-{P - 5}: {exc}",
            first=result.epsilon,
        ) from exc
    e2 = ctx2.mpfr(second.epsilon_exact or second.epsilon)
    diff = abs(g.sub(e1, e2))
    if gmpy2.is_zero(diff):
        return P + 15
    ratio = g.div(abs(e1), diff)
    agreed = int(math.floor(float(gmpy2.log10(ratio))))
    if agreed < P - 20:
        raise CertificationError(
            f"runs at x={plan.eval_x} and x={x2} agree to only {agreed} digits",
            first=result.epsilon,
            second=second.epsilon,
        )
    return min(agreed, P + 15)


def sensitivity(
    pot: PotentialSpec,
    idx: StateIndex,
    result: EigResult,
    plan: PrecisionPlan,
    max_terms: int | None = None,
) -> float:
    """log10 |d psi / d eps| at the solved eigenvalue by central finite
    difference with step 10^(-P/2); reports the accuracy gain that offsets
    the cancellation loss."""
    ctx = make_context(plan.working_digits)
    g = ctx.gctx
    mt = _default_max_terms(plan, max_terms)
    f = _mismatch_fn(pot, plan, "dirichlet", ctx, mt, None)
    e = ctx.mpfr(result.epsilon)
    step = ctx.mpfr(f"1e-{plan.target_digits // 2}")
    fp = f(g.add(e, step))
    fm = f(g.sub(e, step))
    fd = g.div(abs(g.sub(fp, fm)), g.mul(step, 2))
    return float(gmpy2.log10(fd))


def obtainable_precision_scan(
    pot: PotentialSpec,
    idx: StateIndex,
    x_grid,
    eps_reference: str,
    bc: str = "dirichlet",
    margin: int = DEFAULT_MARGIN,
) -> list[tuple[float, float, float]]:
    """Rows (x, P(x), P_est(x)): solve with the boundary at each grid x and
    measure -log10 |eps(x) - eps_ref| against a reference certified beyond
    every grid point's obtainable precision."""
    import warnings

    eps_tilde = low_precision_estimate(pot, idx)
    rows = []
    ref_digits = len(eps_reference.replace(".", "").replace("-", "").lstrip("0"))
    for x in x_grid:
        x0 = float(pot.largest_turning_point(MP.mpf(eps_tilde)))
        if float(x) <= x0 + 0.05:
            warnings.warn(f"grid point x={x} at/below the turning point {x0:.3f}: skipped")
            continue
        p_here = pest(pot, eps_tilde, str(x))
        t = int(math.ceil(p_here)) + 25
        if t + 20 > ref_digits:
            raise ValueError(
                f"reference precision {ref_digits} insufficient for x={x} "
                f"(needs {t + 20})"
            )
        dd = delta_d_estimate(pot, eps_tilde, str(x))
        plan_x = PrecisionPlan(
            target_digits=t,
            eval_x=str(x),
            working_digits=t + math.ceil(dd) + margin,
            sigma=idx.sigma,
            delta_d_est=dd,
            pest_at_x=p_here,
            n_terms_est=estimate_terms(pot, float(eps_tilde), float(x),
                                       t + math.ceil(dd) + margin),
            margin_digits=margin,
            checked=False,
        )
        brkt = bracket_eigenvalue(pot, idx, plan_x, bc, eps_tilde)
        res = refine(pot, idx, brkt, plan_x, bc)
        with MP.workdps(ref_digits + 20):
            diff = abs(MP.mpf(res.epsilon) - MP.mpf(eps_reference))
            p_obt = float(-MP.log10(diff)) if diff != 0 else float(t)
        rows.append((float(x), p_obt, p_here))
    return rows


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def solve_eigenvalue(
    pot: PotentialSpec,
    n: int,
    P: int,
    bc: str = "dirichlet",
    margin: int = DEFAULT_MARGIN,
    max_terms: int | None = None,
    certify: bool = True,
    checkpoint_cb=None,
    resume_state: tuple[int, str, str] | None = None,
    eval_hook=None,
) -> EigResult:
    """Full pipeline: estimate, plan, bracket, refine, certify."""
    idx = StateIndex(n)
    eps_tilde = low_precision_estimate(pot, idx)
    plan = build_plan(pot, idx, P, eps_tilde, margin)
    telemetry: list[EvalTelemetry] = []
    if resume_state is not None:
        start_stage, lo_str, hi_str = resume_state
        brkt = (lo_str, hi_str)
    else:
        start_stage = 0
        brkt = bracket_eigenvalue(pot, idx, plan, bc, eps_tilde, max_terms, telemetry)
        if checkpoint_cb is not None:
            checkpoint_cb(0, brkt[0], brkt[1])
    result = refine(pot, idx, brkt, plan, bc, max_terms, telemetry,
                    checkpoint_cb=checkpoint_cb, start_stage=start_stage,
                    eval_hook=eval_hook)
    if certify:
        result.digits_certified = certify_digits(pot, idx, result, plan, eps_tilde, max_terms)
    return result
