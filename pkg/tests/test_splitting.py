import math

import pytest

from hpse.splitting import (
    SplitResolutionError,
    compare_to_asymptotics,
    required_digits,
    solve_pair,
    zinn_justin_gap,
)

from oracles import eigenvalues_basis

LN10 = math.log(10)


def zj_log10(s: float) -> float:
    return (math.log(16 * math.sqrt(2 * s / math.pi)) - 4 / (3 * s) - 71 * s / 96) / LN10


def test_zj_value_s02():
    got = float(zinn_justin_gap("0.2", 30))
    assert abs(got - 6.2608e-3) / 6.2608e-3 < 1e-3


def test_zj_magnitude_deep_well():
    # log10 of the gap at s = 1/50000 sits at the digit-divergence position
    val = zinn_justin_gap("0.00002", 20)
    mant, _, exp = val.partition("e")
    log10 = int(exp) + math.log10(abs(float(mant)))
    assert abs(log10 - (-28954)) <= 1.0
    assert abs(log10 - zj_log10(2e-5)) < 1e-6


def test_zj_halving_limit_property():
    # gap(s/2)/gap(s) ~ e^(-4/(3s)) / sqrt(2) as s -> 0
    s = 0.1
    a = float(zinn_justin_gap(f"{s}", 30))
    b = float(zinn_justin_gap(f"{s / 2}", 30))
    want = math.exp(-4 / (3 * s)) / math.sqrt(2) * math.exp(71 * s / 96 / 2)
    assert abs(b / a - want) / want < 1e-9


def test_required_digits_refusal():
    need = required_digits("0.05")
    assert need > 11
    with pytest.raises(SplitResolutionError) as ei:
        solve_pair("0.05", 10)
    assert ei.value.required_digits == need


def test_pair_matches_diagonalization_s01():
    rep = solve_pair("0.1", 40, certify=False)
    oracle = eigenvalues_basis(2, (1.0, -2.0), 0.1, count=2, size=420)
    assert abs(float(rep.eps_plus) - oracle[0]) < 1e-12
    assert abs(float(rep.eps_minus) - oracle[1]) < 1e-12
    assert float(rep.eps_plus) < float(rep.eps_minus)


def test_pair_s005_against_asymptotics():
    rep = compare_to_asymptotics(solve_pair("0.05", 60, certify=False))
    assert float(rep.eps_plus) < float(rep.eps_minus)
    assert float(rep.delta) > 0
    # harmonic approximation about the minima: eps ~ 2s(1 + O(s))
    assert abs(float(rep.eps_plus) - 0.1) < 0.003
    assert abs(rep.rel_dev) < 0.1
    # order-s^2 truncation of L: the deviation shrinks ~4x when s halves
    rep2 = compare_to_asymptotics(solve_pair("0.025", 60, certify=False))
    ratio = abs(rep.rel_dev) / abs(rep2.rel_dev)
    assert 2.5 <= ratio <= 6.0


def test_gap_reproducible_bit_exact():
    a = solve_pair("0.1", 40, certify=False)
    b = solve_pair("0.1", 40, certify=False)
    assert a.delta == b.delta
    assert a.eps_plus == b.eps_plus and a.eps_minus == b.eps_minus


def test_compare_requires_nonzero_gap():
    from hpse.splitting import SplittingReport

    with pytest.raises(ValueError):
        compare_to_asymptotics(SplittingReport(
            s="0.1", eps_plus="1", eps_minus="1", delta="0"))
