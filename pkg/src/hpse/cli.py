"""Command-line surface.

Subcommands: plan | solve | split | scan-x | bench | eval.  All numeric user
inputs are decimal strings end to end; there is no binary-float entry point.

Exit codes: 0 success, 2 configuration error, 3 bracketing/convergence
failure, 4 certification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time

from .bigreal import BigReal, ParseError, make_context, render_decimal
from .counting import CountingError
from .eigensolver import (
    BracketingError,
    CertificationError,
    ConvergenceError,
    low_precision_estimate,
    obtainable_precision_scan,
    solve_eigenvalue,
)
from .estimator import PlanError, build_plan
from .persist import (
    CheckpointError,
    digit_file_text,
    json_dump,
    load_checkpoint,
    result_document,
    save_checkpoint,
)
from .potential import PotentialSpec, StateIndex
from .series import sum_series
from .splitting import SplitResolutionError, compare_to_asymptotics, solve_pair

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_CERTIFICATION = 4

SCAN_CSV_HEADER = "x,p_obtained,p_est"
BENCH_CSV_HEADER = "P,N,delta_d_obs,wall_ms"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_DEC = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_CONF_M = re.compile(r"^M\s*=\s*(\d+)$")
_CONF_S = re.compile(rf'^s\s*=\s*"({_DEC})"$')
_CONF_V = re.compile(r"^v\s*=\s*\[(.*)\]$")
_CONF_VITEM = re.compile(rf'^"({_DEC})"$')


def parse_potential_file(path: str) -> PotentialSpec:
    """Grammar: M = <int>, s = "<decimal>", v = ["<decimal>", ...]."""
    m_val = s_val = v_val = None
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read potential file: {exc}") from exc
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if (m := _CONF_M.match(line)):
            m_val = int(m.group(1))
        elif (m := _CONF_S.match(line)):
            s_val = m.group(1)
        elif (m := _CONF_V.match(line)):
            items = [t.strip() for t in m.group(1).split(",") if t.strip()]
            v_val = []
            for item in items:
                mi = _CONF_VITEM.match(item)
                if not mi:
                    raise ConfigError(f"bad coefficient entry: {item}")
                v_val.append(mi.group(1))
        else:
            raise ConfigError(f"unrecognized config line: {line!r}")
    if m_val is None or s_val is None or v_val is None:
        raise ConfigError("potential file must define M, s and v")
    return PotentialSpec(M=m_val, s=s_val, v=tuple(v_val))


def potential_from_args(args) -> PotentialSpec:
    if getattr(args, "potential", None):
        return parse_potential_file(args.potential)
    if args.M is None or args.s is None or args.v is None:
        raise ConfigError("provide either --potential FILE or all of --M, --s, --v")
    v = tuple(t.strip() for t in args.v.split(","))
    try:
        return PotentialSpec(M=args.M, s=args.s, v=v)
    except (ValueError, ParseError) as exc:
        raise ConfigError(str(exc)) from exc


def max_terms_override() -> int | None:
    raw = os.environ.get("HPSE_MAX_TERMS")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"HPSE_MAX_TERMS must be an integer, got {raw!r}") from exc


def add_potential_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--potential", help="potential config file")
    p.add_argument("--M", type=int, help="half-degree of the leading term")
    p.add_argument("--s", help="stiffness parameter, decimal string")
    p.add_argument("--v", help="comma list of M decimal coefficients v0..v(M-1)")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_plan(args) -> int:
    pot = potential_from_args(args)
    idx = StateIndex(args.n)
    eps = low_precision_estimate(pot, idx)
    plan = build_plan(pot, idx, args.digits, eps, args.margin)
    print(f"state n = {args.n} (parity {idx.sigma}), requested digits P = {args.digits}")
    print(f"eps_estimate   = {eps:.6g}")
    print(f"eval_x         = {plan.eval_x}")
    print(f"pest_at_x      = {plan.pest_at_x:.1f}")
    print(f"delta_d_est    = {plan.delta_d_est:.1f}")
    print(f"working_digits = {plan.working_digits}")
    print(f"n_terms_est    = {plan.n_terms_est}")
    return EXIT_OK


def cmd_solve(args) -> int:
    from .eigensolver import bracket_eigenvalue, certify_digits, refine

    pot = potential_from_args(args)
    mt = max_terms_override()
    idx = StateIndex(args.n)
    eps = low_precision_estimate(pot, idx)
    plan = build_plan(pot, idx, args.digits, eps, args.margin)

    cb = None
    if args.checkpoint:
        def cb(stage, lo, hi):
            save_checkpoint(args.checkpoint, pot, args.n, args.digits, args.bc,
                            plan.eval_x, stage, lo, hi)

    telemetry = []
    if args.resume:
        if not args.checkpoint:
            raise ConfigError("--resume requires --checkpoint")
        start_stage, lo, hi = load_checkpoint(
            args.checkpoint, pot, args.n, args.digits, args.bc, plan.eval_x)
        brkt = (lo, hi)
    else:
        start_stage = 0
        brkt = bracket_eigenvalue(pot, idx, plan, args.bc, eps, mt, telemetry)
        if cb is not None:
            cb(0, brkt[0], brkt[1])
    res = refine(pot, idx, brkt, plan, args.bc, mt, telemetry,
                 checkpoint_cb=cb, start_stage=start_stage)
    res.digits_certified = certify_digits(pot, idx, res, plan, eps, mt)

    doc = result_document(pot, res)
    if args.json_out:
        json_dump(doc, args.json_out)
    out = args.out or f"eps_M{pot.M}_n{args.n}_P{args.digits}.txt"
    with open(out, "w") as fh:
        fh.write(digit_file_text(res.epsilon))
    print(f"epsilon ({res.digits_certified} digits certified of {args.digits} requested)")
    print(f"digit file: {out}")
    if res.digits_certified < args.digits:
        print("certification below request", file=sys.stderr)
        return EXIT_CERTIFICATION
    return EXIT_OK


def cmd_split(args) -> int:
    report = solve_pair(args.s, args.digits, max_terms_override())
    report = compare_to_asymptotics(report)
    doc = {
        "schema_version": 1,
        "s": report.s,
        "eps_plus": report.eps_plus,
        "eps_minus": report.eps_minus,
        "delta": report.delta,
        "zj_estimate": report.zj_estimate,
        "rel_dev": report.rel_dev,
        "beyond_asymptotic_validity": float(args.s) >= 0.5,
    }
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_scan_x(args) -> int:
    pot = potential_from_args(args)
    grid = [g.strip() for g in args.x_grid.split(",") if g.strip()]
    ref = solve_eigenvalue(pot, args.n, args.ref_digits,
                           max_terms=max_terms_override())
    rows = obtainable_precision_scan(pot, StateIndex(args.n), grid, ref.epsilon)
    lines = [SCAN_CSV_HEADER] + [f"{x},{p:.2f},{pe:.2f}" for x, p, pe in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text, end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    pot = potential_from_args(args)
    p_list = [int(p) for p in args.p_list.split(",") if p.strip()]
    idx = StateIndex(args.n)
    eps_tilde = low_precision_estimate(pot, idx)
    base = solve_eigenvalue(pot, idx.n, 30, max_terms=max_terms_override(),
                            certify=False)
    rows = []
    for P in p_list:
        plan = build_plan(pot, idx, P, eps_tilde, args.margin)
        ctx = make_context(plan.working_digits)
        x = BigReal.from_str(plan.eval_x, ctx)
        e = BigReal.from_str(base.epsilon, ctx)
        mt = max_terms_override() or max(4 * plan.n_terms_est, 100 * P, 4000)
        t0 = time.perf_counter()
        se = sum_series(pot, e, idx.sigma, x, ctx, mt, with_dpsi=False,
                        x_text=plan.eval_x)
        wall = (time.perf_counter() - t0) * 1e3
        rows.append((P, se.n_terms, se.delta_d_observed, wall, plan.delta_d_est))
    lines = [BENCH_CSV_HEADER] + [f"{p},{n},{dd:.2f},{w:.1f}" for p, n, dd, w, _ in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text, end="")
    return EXIT_OK


def cmd_eval(args) -> int:
    pot = potential_from_args(args)
    ctx = make_context(args.working_digits)
    x = BigReal.from_str(args.x, ctx)
    eps = BigReal.from_str(args.eps, ctx)
    mt = max_terms_override() or args.max_terms
    se = sum_series(pot, eps, args.sigma, x, ctx, mt, x_text=args.x)
    show = min(args.working_digits, 30)
    print(f"psi         = {render_decimal(se.psi, show)}")
    print(f"dpsi        = {render_decimal(se.dpsi, show)}")
    print(f"n_terms     = {se.n_terms}")
    print(f"delta_d_obs = {se.delta_d_observed:.2f}")
    print(f"converged   = {se.converged}")
    print(f"wall_ms     = {se.wall_ms:.1f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hpse",
        description="High-precision eigenvalues of even polynomial Schrodinger problems",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="print the a priori run plan, no high-precision work")
    add_potential_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--digits", type=int, required=True)
    p.add_argument("--margin", type=int, default=10)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("solve", help="solve one eigenvalue to P digits")
    add_potential_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--digits", type=int, required=True)
    p.add_argument("--bc", choices=["dirichlet", "robin"], default="dirichlet")
    p.add_argument("--margin", type=int, default=10)
    p.add_argument("--out", help="raw digit file path")
    p.add_argument("--json-out", help="result document path")
    p.add_argument("--checkpoint", help="ladder checkpoint file")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("split", help="double-well even/odd splitting vs asymptotics")
    p.add_argument("--s", required=True)
    p.add_argument("--digits", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("scan-x", help="obtainable precision across evaluation points")
    add_potential_args(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--x-grid", required=True, help="comma list of x values")
    p.add_argument("--ref-digits", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_scan_x)

    p = sub.add_parser("bench", help="telemetry sweep over requested digits")
    add_potential_args(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--p-list", required=True, help="comma list of digit targets")
    p.add_argument("--margin", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("eval", help="one wavefunction evaluation (debugging)")
    add_potential_args(p)
    p.add_argument("--eps", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--working-digits", type=int, required=True)
    p.add_argument("--sigma", type=int, choices=[0, 1], default=0)
    p.add_argument("--max-terms", type=int, default=2_000_000)
    p.set_defaults(fn=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, CheckpointError, PlanError, SplitResolutionError, ParseError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        if isinstance(exc, SplitResolutionError) and exc.required_digits:
            print(f"hint: request at least {exc.required_digits} digits", file=sys.stderr)
        return EXIT_CONFIG
    except (BracketingError, ConvergenceError, CountingError) as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except CertificationError as exc:
        print(f"certification error: {exc}", file=sys.stderr)
        if exc.first:
            print(f"first run:  {exc.first}", file=sys.stderr)
        if exc.second:
            print(f"second run: {exc.second}", file=sys.stderr)
        return EXIT_CERTIFICATION


if __name__ == "__main__":
    raise SystemExit(main())
