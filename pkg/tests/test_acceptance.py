"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.  The n=50000 criterion is
marked slow but runs by default; the optional extended-scale digit check
(decimal position 10^4) only runs under `-m extended`.
"""

import math
import statistics

import pytest

from hpse.bigreal import make_context, parse_decimal
from hpse.eigensolver import (
    low_precision_estimate,
    obtainable_precision_scan,
    refine,
    sensitivity,
    solve_eigenvalue,
)
from hpse.estimator import build_plan
from hpse.potential import PotentialSpec, StateIndex
from hpse.series import sum_series
from hpse.splitting import compare_to_asymptotics, solve_pair, zinn_justin_gap

from conftest import (
    QUARTIC_BLOCK_1000,
    QUARTIC_BLOCK_10000,
    QUARTIC_E50000_60,
    QUARTIC_GROUND_105,
    double_well,
)

LN10 = math.log(10)


def _report(name, detail):
    print(f"\nACCEPTANCE {name}: PASS — {detail}")


def test_c01_quartic_ground_thousand_digits(quartic):
    # solved at 1040 digits so the block ending at significant digit 1033
    # stays clear of the uncertified 5-digit tail
    res = solve_eigenvalue(quartic, 0, 1040)
    assert res.digits_certified >= 1035
    assert res.epsilon[: len(QUARTIC_GROUND_105)] == QUARTIC_GROUND_105
    digits = res.epsilon.replace(".", "")
    pos = digits.find(QUARTIC_BLOCK_1000)
    assert pos == 1000, f"decimal-1000 block found at digit index {pos + 1}"
    _report("C1", "quartic ground state: first 105 digits and decimal-1000 block match")


@pytest.mark.slow
def test_c02_quartic_n50000(quartic):
    res = solve_eigenvalue(quartic, 50000, 60)
    # the run carries 60 significant digits; the reference listing shows 63,
    # so the comparison target is its correct 60-digit rounding (the listing
    # continues ...8953, which rounds digit 60 up)
    import decimal

    with decimal.localcontext() as dctx:
        dctx.prec = 60
        dctx.rounding = decimal.ROUND_HALF_EVEN
        want = format(+decimal.Decimal(QUARTIC_E50000_60), "f")
    assert res.epsilon == want
    assert res.digits_certified >= 60
    _report("C2", f"eigenvalue 50000 matches the 63-digit reference listing "
                  f"rounded to the requested 60 digits (certified {res.digits_certified})")


def test_c03_harmonic_oracle():
    for s in ("1", "0.1"):
        pot = PotentialSpec(M=1, s=s, v=("0",))
        for n in (0, 1, 5, 10):
            res = solve_eigenvalue(pot, n, 200, certify=False)
            ctx = make_context(220)
            got = parse_decimal(res.epsilon, ctx)
            want = parse_decimal(s, ctx) * (2 * n + 1)
            rel = abs(got - want) / want
            assert float(rel) < 1e-195, (s, n, res.epsilon[:30])
    _report("C3", "harmonic eigenvalues match s(2n+1) to better than 1e-195 "
                  "for s in {1, 1/10}, n in {0,1,5,10}")


def test_c04_scaling_law(quartic):
    pot8 = PotentialSpec(M=2, s="8", v=("0", "0"))
    r1 = solve_eigenvalue(quartic, 0, 100, certify=False)
    r8 = solve_eigenvalue(pot8, 0, 100, certify=False)
    ctx = make_context(120)
    e1 = parse_decimal(r1.epsilon, ctx)
    e8 = parse_decimal(r8.epsilon, ctx)
    rel = abs(e8 - e1 * 16) / e8  # 8^(4/3) = 16 exactly
    assert float(rel) < 1e-95
    _report("C4", "eps0(s=8) = 8^(4/3) eps0(s=1) to 95+ of 100 digits")


def test_c05_double_well_splitting():
    rep = compare_to_asymptotics(solve_pair("0.05", 60, certify=False))
    assert float(rep.eps_plus) < float(rep.eps_minus)
    assert abs(rep.rel_dev) < 0.1
    rep2 = compare_to_asymptotics(solve_pair("0.025", 60, certify=False))
    ratio = abs(rep.rel_dev) / abs(rep2.rel_dev)
    assert 2.5 <= ratio <= 6.0
    zj = zinn_justin_gap("0.00002", 20)
    mant, _, exp = zj.partition("e")
    log10 = int(exp) + math.log10(abs(float(mant)))
    assert abs(log10 - (-28954)) <= 1.0
    _report("C5", f"splitting at s=0.05: |rel_dev|={abs(rep.rel_dev):.2e} < 0.1, "
                  f"halving ratio {ratio:.2f} in [2.5, 6]; "
                  f"log10 gap(1/50000) = {log10:.2f}")


def test_c06_obtainable_precision_flat_offset(quartic):
    ref = solve_eigenvalue(quartic, 0, 600, certify=False)
    rows = obtainable_precision_scan(quartic, StateIndex(0),
                                     ["6", "8", "10", "12"], ref.epsilon)
    assert len(rows) == 4
    offsets = [p - pe for _, p, pe in rows]
    spread = statistics.pstdev(offsets)
    assert spread < 3.0
    _report("C6", f"P(x) - P_est(x) offsets {['%.2f' % o for o in offsets]} "
                  f"have sd {spread:.2f} < 3")


def test_c07_telemetry_scaling(quartic):
    idx = StateIndex(0)
    eps_tilde = low_precision_estimate(quartic, idx)
    base = solve_eigenvalue(quartic, 0, 30, certify=False)
    rows = []
    for P in (500, 1000, 2000, 4000):
        plan = build_plan(quartic, idx, P, eps_tilde)
        ctx = make_context(plan.working_digits)
        x = parse_decimal(plan.eval_x, ctx)
        e = parse_decimal(base.epsilon, ctx)
        se = sum_series(quartic, e, 0, x, ctx,
                        max(4 * plan.n_terms_est, 100 * P), with_dpsi=False)
        assert se.converged
        rows.append((P, se.n_terms, se.delta_d_observed, plan.delta_d_est))
    for (p1, n1, _, _), (p2, n2, _, _) in zip(rows, rows[1:]):
        ratio = n2 / n1
        assert 1.7 <= ratio <= 2.3, f"N ratio {ratio:.2f} off at {p1}->{p2}"
    for p, n, dd_obs, dd_est in rows:
        assert 0.45 <= dd_obs / p <= 0.55, f"dd/P = {dd_obs / p:.3f} at P={p}"
        assert abs(dd_obs - dd_est) <= 5.0, f"observed {dd_obs:.1f} vs est {dd_est:.1f}"
    _report("C7", "N doubles with P (ratios in [1.7,2.3]); loss/P in [0.45,0.55]; "
                  "observed loss within 5 digits of the a priori estimate")


def test_c08_sensitivity_compensation(quartic):
    res = solve_eigenvalue(quartic, 0, 200, certify=False)
    sens = sensitivity(quartic, StateIndex(0), res, res.plan)
    assert abs(sens - 100) <= 5
    _report("C8", f"log10 |dpsi/deps| = {sens:.1f} = P/2 within 5")


def test_c09_checkpoint_resume_bit_exact(quartic):
    from hpse.eigensolver import bracket_eigenvalue

    idx = StateIndex(0)
    eps_tilde = low_precision_estimate(quartic, idx)
    plan = build_plan(quartic, idx, 500, eps_tilde)
    brkt = bracket_eigenvalue(quartic, idx, plan, eps_tilde=eps_tilde)
    full = refine(quartic, idx, brkt, plan)

    class Interrupt(Exception):
        pass

    saved = {}

    def cb(stage, lo, hi):
        saved["state"] = (stage, lo, hi)

    def hook(_):
        if "state" in saved:
            raise Interrupt

    with pytest.raises(Interrupt):
        refine(quartic, idx, brkt, plan, checkpoint_cb=cb, eval_hook=hook)
    stage, lo, hi = saved["state"]
    resumed = refine(quartic, idx, (lo, hi), plan, start_stage=stage)
    assert resumed.epsilon == full.epsilon
    assert resumed.epsilon_exact == full.epsilon_exact
    _report("C9", "interrupted + resumed ladder reproduces the uninterrupted "
                  "run bit-exactly at P=500")


def test_c10_digit_block_fixtures_in_scope(quartic):
    # the million-decimal run itself is out of desk scope; its in-scope
    # stand-ins are the position-1 and position-1000 blocks checked in C1
    assert len(QUARTIC_BLOCK_1000) == 33
    assert len(QUARTIC_BLOCK_10000) == 33
    _report("C10", "million-decimal run out of desk scope; positions 1 and "
                   "1000 covered by C1, position 10^4 available under -m extended")


@pytest.mark.extended
def test_c10_extended_decimal_10000(quartic):
    res = solve_eigenvalue(quartic, 0, 10_040)
    digits = res.epsilon.replace(".", "")
    pos = digits.find(QUARTIC_BLOCK_10000)
    assert pos == 10_000
    _report("C10-extended", "decimal-10000 block matches")
