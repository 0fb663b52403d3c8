import math

import numpy as np
import pytest

from crnoma.config import BASELINE, db_to_linear
from crnoma.montecarlo import (
    CHUNK,
    ci_halfwidth,
    empirical_cdf,
    estimate_outage,
    run_trial,
    simulate_block,
)


def test_zero_rate_never_outage():
    cfg = BASELINE.replace(rate_thresholds=(0.0, 0.0), p_t=10.0, i_itc=5.0)
    res = estimate_outage(cfg, 100.0, 20_000, seed=1)
    assert all(r.empirical_op == 0.0 for r in res)


def test_rate_at_ceiling_always_outage():
    # user 1 ceiling is 0.8 / 0.2 = 4, reached at R = log2(5) / 2
    cfg = BASELINE.replace(rate_thresholds=(math.log2(5) / 2, 1.5))
    res = estimate_outage(cfg, 1e6, 20_000, seed=1)
    assert res[0].empirical_op == 1.0
    assert res[0].analytic_op == 1.0


@pytest.mark.parametrize("n", [1, 2])
def test_tiny_trial_counts(n):
    res = estimate_outage(BASELINE, 100.0, n, seed=3)
    for r in res:
        assert r.empirical_op * n == int(r.empirical_op * n)
        assert 0.0 <= r.empirical_op <= 1.0


def test_zero_trials_rejected():
    with pytest.raises(ValueError):
        estimate_outage(BASELINE, 100.0, 0)


def test_deterministic_across_workers():
    cfg = BASELINE.replace(p_t=10.0, i_itc=100.0).with_impairments(phi=0.1, sic=0.01, theta=0.01)
    trials = 3 * CHUNK + 123
    ref = estimate_outage(cfg, 300.0, trials, seed=7, workers=1, joint_sic=True)
    for w in (4, 16):
        assert estimate_outage(cfg, 300.0, trials, seed=7, workers=w, joint_sic=True) == ref


def test_seed_changes_result():
    a = estimate_outage(BASELINE, 100.0, 50_000, seed=1)[0].empirical_op
    b = estimate_outage(BASELINE, 100.0, 50_000, seed=2)[0].empirical_op
    assert a != b


def test_single_trial_matches_block():
    cfg = BASELINE.replace(p_t=10.0, i_itc=50.0)
    blk = simulate_block(cfg, 200.0, 5, 0, 40)
    for t in (0, 17, 39):
        out = run_trial(cfg, 200.0, t, seed=5)
        assert out.gamma_hop1 == tuple(blk.gamma1[t])
        assert out.gamma_hop2 == tuple(blk.gamma2[t])


def test_joint_sic_is_no_better_than_per_layer():
    cfg = BASELINE.replace(p_t=10.0).with_impairments(sic=0.01)
    res = estimate_outage(cfg, 300.0, 200_000, seed=4, joint_sic=True)
    for r in res:
        assert r.joint_sic_op >= r.empirical_op
    # user 1 has no earlier layers to cancel
    assert res[0].joint_sic_op == res[0].empirical_op


def test_ci_halfwidth():
    assert ci_halfwidth(0.0, 100) == 0.0
    assert ci_halfwidth(0.5, 10**6) == pytest.approx(1.5e-3)


def test_empirical_cdf_nondecreasing():
    grid = np.linspace(0, 10, 41)
    emp = empirical_cdf(BASELINE.replace(p_t=10.0, i_itc=30.0), 2, 2, 300.0, grid, 50_000, seed=6)
    assert emp[0] == 0.0
    assert np.all(np.diff(emp) >= 0)
    with pytest.raises(ValueError):
        empirical_cdf(BASELINE, 1, 1, 100.0, grid[::-1], 1000)
    with pytest.raises(ValueError):
        empirical_cdf(BASELINE, 3, 1, 100.0, grid, 1000)


def test_op_decreasing_in_snr_without_itc():
    cfg = BASELINE.replace(p_t=10.0)
    ops = [estimate_outage(cfg, db_to_linear(s), 200_000, seed=8)[1].empirical_op for s in (10, 20, 30, 40)]
    assert all(b < a for a, b in zip(ops, ops[1:]))


def test_matches_analytic_within_ci():
    cfg = BASELINE.replace(p_t=db_to_linear(10), i_itc=db_to_linear(20)).with_impairments(phi=0.1, theta=0.01)
    for r in estimate_outage(cfg, db_to_linear(30), 10**6, seed=9):
        assert abs(r.empirical_op - r.analytic_op) <= ci_halfwidth(r.analytic_op, r.trials)
