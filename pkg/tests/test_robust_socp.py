"""Dual-norm SOCP counterpart: margin machinery, conservatism orderings,
path equivalences, and the sampled safety of the interference slacks."""

import numpy as np
import pytest

from sinrbal import (
    UncertaintySet,
    balanced_objective,
    feasibility_socp,
    per_bs_power,
    sample_uniform,
    solve_nonrobust,
    solve_socp,
    worst_case_margin_bruteforce,
)
from sinrbal.robust_socp import f1, f2
from sinrbal.uncertainty import dual_norm, gamma_entries


def test_f1_nominal_slack_margin():
    M = np.zeros((2, 2), dtype=complex)
    M[0, 0] = 3.0  # h (1,0) picks the first row, norm 3
    assert f1(M, 5.0, np.array([1.0 + 0j, 0.0])) == pytest.approx(2.0)


def test_f2_identity_direction():
    assert f2(np.eye(2, dtype=complex), np.array([1.0, 0.0])) == pytest.approx(-1.0)


def test_f2_sign_symmetric(rng):
    M = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    d = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert f2(M, d) == pytest.approx(f2(M, -d), rel=1e-14)
    assert f2(M, d) <= 0.0


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        f1(np.eye(2, dtype=complex), 1.0, np.zeros(3, dtype=complex))
    with pytest.raises(ValueError):
        f2(np.eye(2, dtype=complex), np.zeros(3, dtype=complex))


@pytest.mark.parametrize("kind", ["l2", "linf", "l1"])
def test_bruteforce_margin_matches_dual_norm(kind, rng):
    """Grid minimization of the split worst case lands on
    f1 - rho' * dualnorm(gamma) for every supported norm."""
    for _ in range(8):
        l = int(rng.integers(1, 4))
        f1v = float(rng.uniform(0.5, 3.0))
        f2v = -np.abs(rng.standard_normal(l))
        rp = float(rng.uniform(0.05, 0.6))
        exact = f1v - rp * dual_norm(kind, gamma_entries(f2v, f2v))
        bf = worst_case_margin_bruteforce(f1v, f2v, kind, rp)
        scale = rp * dual_norm(kind, gamma_entries(f2v, f2v))
        assert bf >= exact - 1e-9          # grid point is always in-set
        assert bf <= exact + 0.02 * scale + 1e-9


def test_bruteforce_zero_radius_is_f1():
    assert worst_case_margin_bruteforce(1.7, [-1.0, -2.0], "l2", 0.0) == 1.7


def test_bruteforce_refuses_many_directions():
    with pytest.raises(ValueError):
        worst_case_margin_bruteforce(1.0, [-1.0] * 5, "l2", 0.1)


def test_degenerate_radius_recovers_nonrobust(desk_cfg, desk_channels):
    nr = solve_nonrobust(desk_channels, desk_cfg)
    uset = UncertaintySet.for_network(desk_cfg, "l2", 1e-8)
    out = solve_socp(desk_channels, desk_cfg, uset, t_hi=nr.t_star)
    assert out.t_star == pytest.approx(nr.t_star, abs=0.02)


def test_stacked_and_generic_paths_agree(desk_cfg, desk_channels):
    uset = UncertaintySet.for_network(desk_cfg, "l2", 0.2)
    nr = solve_nonrobust(desk_channels, desk_cfg)
    fast = solve_socp(desk_channels, desk_cfg, uset, t_hi=nr.t_star, fast=True)
    slow = solve_socp(desk_channels, desk_cfg, uset, t_hi=nr.t_star, fast=False)
    assert fast.extras["fast_path"] is True
    assert slow.extras["fast_path"] is False
    assert fast.t_star == pytest.approx(slow.t_star, abs=0.02)


def test_fast_path_only_for_identity_l2(desk_cfg, desk_channels):
    uset = UncertaintySet.for_network(desk_cfg, "linf", 0.2)
    res, payload = feasibility_socp(0.05, desk_channels, desk_cfg, uset)
    assert payload["fast_path"] is False


def test_design_radius_monotone(desk_cfg, desk_channels):
    nr = solve_nonrobust(desk_channels, desk_cfg)
    t = []
    for rp in (0.05, 0.1, 0.4):
        uset = UncertaintySet.for_network(desk_cfg, "l2", 0.4, rho_prime=rp)
        t.append(solve_socp(desk_channels, desk_cfg, uset, t_hi=nr.t_star).t_star)
    assert t[0] >= t[1] - 1e-9 >= t[2] - 1e-9
    assert t[0] <= nr.t_star + 1e-9


def test_box_tighter_than_ball(desk_cfg, desk_channels):
    nr = solve_nonrobust(desk_channels, desk_cfg)
    ball = solve_socp(desk_channels, desk_cfg,
                      UncertaintySet.for_network(desk_cfg, "l2", 0.3),
                      t_hi=nr.t_star)
    box = solve_socp(desk_channels, desk_cfg,
                     UncertaintySet.for_network(desk_cfg, "linf", 0.3),
                     t_hi=nr.t_star)
    assert box.t_star <= ball.t_star + 1e-9


def test_capped_set_between_ball_and_unconstrained(desk_cfg, desk_channels):
    # the ball/box intersection is a subset of the ball: certified level
    # can only improve
    nr = solve_nonrobust(desk_channels, desk_cfg)
    ball = solve_socp(desk_channels, desk_cfg,
                      UncertaintySet.for_network(desk_cfg, "l2", 0.3),
                      t_hi=nr.t_star)
    capped = solve_socp(desk_channels, desk_cfg,
                        UncertaintySet.for_network(desk_cfg, "l2_cap_linf", 0.3,
                                                   box_radius=0.08),
                        t_hi=nr.t_star)
    assert capped.t_star >= ball.t_star - 0.02
    assert capped.t_star <= nr.t_star + 1e-9


def test_nominal_own_gain_forced_real(desk_cfg, desk_channels):
    uset = UncertaintySet.for_network(desk_cfg, "l2", 0.2)
    out = solve_socp(desk_channels, desk_cfg, uset)
    for k in range(desk_cfg.num_users):
        g = desk_channels.h(desk_cfg.serving_bs[k], k) @ out.beams.m[k]
        assert abs(g.imag) < 1e-6
        assert g.real > 0


def test_power_budgets_hold(desk_cfg, desk_channels):
    uset = UncertaintySet.for_network(desk_cfg, "l2", 0.4)
    out = solve_socp(desk_channels, desk_cfg, uset)
    assert np.all(per_bs_power(out.beams, desk_cfg)
                  <= np.asarray(desk_cfg.power_budget) + 1e-6)


def test_interference_slacks_cover_sampled_errors(desk_cfg, desk_channels, rng):
    """z_{b,k} upper-bounds the received-power norm for every error drawn
    at the design radius (the side of the approximation that is exact)."""
    uset = UncertaintySet.for_network(desk_cfg, "l2", 0.25)
    out = solve_socp(desk_channels, desk_cfg, uset)
    z = out.extras["z"]
    B, K = desk_cfg.num_cells, desk_cfg.num_users
    worst = -np.inf
    for b in range(B):
        M = out.beams.bs_matrix(b, desk_cfg)
        for k in range(K):
            V = sample_uniform(uset, b, k, rng, n=400, radius="rho_prime")
            perturbed = desk_channels.h(b, k)[None, :] + V
            norms = np.linalg.norm(perturbed @ M, axis=1)
            worst = max(worst, float((norms - z[b, k]).max()))
    assert worst <= 1e-6


def test_reported_t_star_is_certified_not_realized(desk_cfg, desk_channels):
    # the certificate is conservative: nominal realized objective beats it
    uset = UncertaintySet.for_network(desk_cfg, "l2", 0.4)
    out = solve_socp(desk_channels, desk_cfg, uset)
    assert balanced_objective(desk_channels, out.beams, desk_cfg) >= out.t_star
