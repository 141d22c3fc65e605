import math

import numpy as np
import pytest
from mpmath import mp

from bb84_eavesdrop import (
    DegenerateModelError,
    SystemParams,
    AttackPlan,
    build_default_table,
    direct_attack_rate,
    errors_attacked,
    errors_baseline,
    eve_information,
    full_report,
    poisson_pmf,
    poisson_tail,
    sifted_bits_attacked,
    sifted_bits_baseline,
    solve_blocking_prob,
    solve_measuring_prob,
)

mp.dps = 50

# Shared closure grid: mean photon numbers crossed with channel and
# detector values; r_c fixed at the canonical 0.01.
GRID_MU = [float(v) for v in np.logspace(math.log10(0.01), math.log10(5.0), 12)]
GRID_ALPHA = [0.005, 0.01, 0.1]
GRID_ETA = [0.3, 0.5, 1.0]


def grid_params():
    for mu in GRID_MU:
        for alpha in GRID_ALPHA:
            for eta in GRID_ETA:
                yield SystemParams(mu=mu, alpha=alpha, eta=eta, r_c=0.01, m=10**6)


# ---------------------------------------------------------------------------
# baseline counts


def test_sifted_baseline_canonical_point(canonical):
    # 500000 * (1 - exp(-0.005)), frozen from a 50-digit evaluation
    assert sifted_bits_baseline(canonical(1.0)) == pytest.approx(
        2493.7604036588433, rel=1e-12
    )


def test_sifted_baseline_vanishing_mean(canonical):
    params = canonical(1e-9)
    expected = 0.5 * params.m * params.eta * params.mu * params.alpha
    assert sifted_bits_baseline(params) == pytest.approx(expected, rel=1e-6)


def test_sifted_baseline_saturates_at_half_block():
    params = SystemParams(mu=20.0, alpha=1.0, eta=1.0, r_c=0.01, m=1000)
    assert sifted_bits_baseline(params) == pytest.approx(499.99999896942319, abs=1e-9)


def test_errors_baseline_examples(canonical):
    assert errors_baseline(canonical(1.0)) == pytest.approx(24.937604036588433, rel=1e-12)
    no_noise = SystemParams(mu=1.0, alpha=0.01, eta=0.5, r_c=0.0, m=10**6)
    assert errors_baseline(no_noise) == 0.0


def test_errors_baseline_is_sifted_times_noise():
    for params in grid_params():
        expected = sifted_bits_baseline(params) * params.r_c
        assert errors_baseline(params) == pytest.approx(expected, rel=1e-15)


# ---------------------------------------------------------------------------
# attacked counts


def test_sifted_attacked_examples(canonical):
    params = canonical(0.1)
    assert sifted_bits_attacked(params, p_block=1.0, direct_rate=0.0) == 0.0
    # direct substitutions frozen from 50-digit evaluations
    assert sifted_bits_attacked(params, 0.0, 0.0) == pytest.approx(237.51982223443939, rel=1e-12)
    assert sifted_bits_attacked(params, 0.5, 0.001) == pytest.approx(368.75991111721969, rel=1e-12)


def test_errors_attacked_examples(canonical):
    params = canonical(0.1)
    assert errors_attacked(params, p_block=0.3, p_measure=0.0) == 0.0
    assert errors_attacked(params, p_block=1.0, p_measure=0.7) == 0.0
    p_measure = solve_measuring_prob(params, 0.0)
    assert errors_attacked(params, 0.0, p_measure) == pytest.approx(
        errors_baseline(params), rel=1e-12
    )


# ---------------------------------------------------------------------------
# constraint solvers


def test_blocking_solution_without_direct_attacks(canonical):
    """With no direct-attack yield at small mu the count rate cannot be
    matched: the receiver would still miss the absorbed multi-photon pulses."""
    value = solve_blocking_prob(canonical(0.1), direct_rate=0.0)
    assert value == pytest.approx(-0.052280639418249, rel=1e-12)
    assert value < 0.0


def test_blocking_solution_hits_one_when_direct_attacks_carry_everything(canonical):
    params = canonical(0.3)
    rate = poisson_tail(params.eta * params.mu * params.alpha, 1) / params.eta
    assert solve_blocking_prob(params, rate) == 1.0


def test_blocking_closure_on_grid(default_table):
    for params in grid_params():
        rate = direct_attack_rate(default_table, params.mu)
        p_block = solve_blocking_prob(params, rate)
        attacked = sifted_bits_attacked(params, p_block, rate)
        baseline = sifted_bits_baseline(params)
        assert attacked == pytest.approx(baseline, rel=1e-12)


def test_measuring_solution_examples(canonical):
    params = canonical(0.1)
    assert solve_measuring_prob(params, 0.0) == pytest.approx(0.044195786855566458, rel=1e-12)
    no_noise = SystemParams(mu=0.1, alpha=0.01, eta=0.5, r_c=0.0, m=10**6)
    assert solve_measuring_prob(no_noise, 0.0) == 0.0
    assert solve_measuring_prob(no_noise, 0.5) == 0.0
    assert solve_measuring_prob(no_noise, 1.0) == 0.0


def test_measuring_closure_on_grid():
    for params in grid_params():
        for p_block in (0.0, 0.3, 0.9, 0.99):
            p_measure = solve_measuring_prob(params, p_block)
            assert errors_attacked(params, p_block, p_measure) == pytest.approx(
                errors_baseline(params), rel=1e-12
            )


def test_measuring_degenerate_when_everything_blocked(canonical):
    with pytest.raises(DegenerateModelError):
        solve_measuring_prob(canonical(0.1), p_block=1.0)


def test_solvers_degenerate_at_huge_mean():
    params = SystemParams(mu=800.0, alpha=0.01, eta=0.5, r_c=0.01, m=10**6)
    with pytest.raises(DegenerateModelError):
        solve_blocking_prob(params, 0.0)
    with pytest.raises(DegenerateModelError):
        solve_measuring_prob(params, 0.0)


# ---------------------------------------------------------------------------
# information yield


def test_information_zero_when_everything_blocked(canonical):
    plan = AttackPlan(p_block=1.0, p_measure=0.5)
    assert eve_information(canonical(0.5), plan, direct_rate=0.0) == 0.0


def test_information_direct_substitution(canonical, default_table):
    params = canonical(0.1)
    rate = direct_attack_rate(default_table, params.mu)
    p_measure = solve_measuring_prob(params, 0.0)
    plan = AttackPlan(p_block=0.0, p_measure=p_measure)
    mu = mp.mpf(str(params.mu))
    chi1 = mp.exp(-mu) * mu
    chi2 = mp.exp(-mu) * mu**2 / 2
    ea = mp.mpf(str(params.eta)) * mp.mpf(str(params.alpha))
    expected = float(
        0.5 * params.m * (0.5 * chi1 * p_measure * ea + chi2 * ea + rate * params.eta)
    )
    assert eve_information(params, plan, rate) == pytest.approx(expected, rel=1e-12)


def test_information_bounded_by_attacked_sifted_bits(default_table):
    for params in grid_params():
        report = full_report(params, default_table, match_count_rate=True)
        if report.plan.feasible:
            assert report.eve_info <= report.sifted_attacked + 1e-9


# ---------------------------------------------------------------------------
# full_report


def test_report_matched_mode_reproduces_count_rate(default_table):
    for params in grid_params():
        report = full_report(params, default_table, match_count_rate=True)
        assert report.sifted_attacked == pytest.approx(report.sifted, rel=1e-12)
        assert report.errors_attacked == pytest.approx(report.errors, rel=1e-12)


def test_report_error_only_mode_blocks_nothing(canonical, default_table):
    report = full_report(canonical(0.9), default_table, match_count_rate=False)
    assert report.plan.p_block == 0.0
    assert report.plan.feasible


def test_matching_the_count_rate_costs_information(canonical, default_table):
    """Where both attack variants are executable the constrained one yields
    no more information."""
    for mu in (0.75, 0.8, 0.9, 1.0):
        matched = full_report(canonical(mu), default_table, match_count_rate=True)
        unmatched = full_report(canonical(mu), default_table, match_count_rate=False)
        assert matched.plan.feasible and unmatched.plan.feasible
        assert matched.eve_info <= unmatched.eve_info


def test_gap_between_variants_shrinks_at_small_mean(canonical, default_table):
    def relative_gap(mu):
        matched = full_report(canonical(mu), default_table, match_count_rate=True)
        unmatched = full_report(canonical(mu), default_table, match_count_rate=False)
        return (unmatched.eve_info - matched.eve_info) / unmatched.eve_info

    assert relative_gap(0.1) < relative_gap(1.0)


def test_report_without_noise_has_no_intercept_term(default_table):
    params = SystemParams(mu=0.5, alpha=0.01, eta=0.5, r_c=0.0, m=10**6)
    report = full_report(params, default_table, match_count_rate=False)
    assert report.plan.p_measure == 0.0
    chi2 = poisson_pmf(params.mu, 2)
    expected = 0.5 * params.m * (chi2 * params.eta * params.alpha + report.direct_rate * params.eta)
    assert report.eve_info == pytest.approx(expected, rel=1e-14)


def test_report_counts_stay_in_range_when_feasible(default_table):
    for params in grid_params():
        report = full_report(params, default_table, match_count_rate=True)
        if not report.plan.feasible:
            continue
        half_block = params.m / 2
        for value in (
            report.sifted,
            report.sifted_attacked,
            report.errors,
            report.errors_attacked,
            report.eve_info,
        ):
            assert 0.0 <= value <= half_block


def test_report_scales_exactly_with_power_of_two_blocks(default_table):
    small = SystemParams(mu=0.8, alpha=0.01, eta=0.5, r_c=0.01, m=2**20)
    large = SystemParams(mu=0.8, alpha=0.01, eta=0.5, r_c=0.01, m=2**23)
    a = full_report(small, default_table)
    b = full_report(large, default_table)
    assert b.plan == a.plan
    assert b.sifted == 8.0 * a.sifted
    assert b.sifted_attacked == 8.0 * a.sifted_attacked
    assert b.errors == 8.0 * a.errors
    assert b.errors_attacked == 8.0 * a.errors_attacked
    assert b.eve_info == 8.0 * a.eve_info


def test_report_scales_linearly_with_any_block(default_table):
    base = SystemParams(mu=0.3, alpha=0.01, eta=0.5, r_c=0.01, m=10**6)
    seven = SystemParams(mu=0.3, alpha=0.01, eta=0.5, r_c=0.01, m=7 * 10**6)
    a = full_report(base, default_table)
    b = full_report(seven, default_table)
    assert b.eve_info == pytest.approx(7.0 * a.eve_info, rel=1e-12)
    assert b.sifted == pytest.approx(7.0 * a.sifted, rel=1e-12)


def test_report_returns_infeasible_results_instead_of_raising(canonical, default_table):
    report = full_report(canonical(0.05), default_table, match_count_rate=True)
    assert not report.plan.feasible_block
    assert math.isfinite(report.plan.p_block)
    assert report.plan.p_block < 0.0
