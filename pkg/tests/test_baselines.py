"""Zero-forcing baseline: null-space machinery and the decoupled balance."""

import numpy as np
import pytest

from sinrbal import (
    ChannelSet,
    NetworkConfig,
    ZfInfeasibleError,
    null_space_basis,
    solve_nonrobust,
    zf_balance,
)
from sinrbal.model import sinr


def test_null_space_of_single_row():
    N = null_space_basis(np.array([[1.0, 0.0, 0.0]]))
    assert N.shape == (3, 2)
    # spans e2, e3: projector equals diag(0, 1, 1)
    np.testing.assert_allclose(N @ N.conj().T,
                               np.diag([0.0, 1.0, 1.0]), atol=1e-12)


def test_null_space_annihilates_and_is_orthonormal(rng):
    M = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    N = null_space_basis(M)
    assert N.shape == (6, 3)
    assert np.abs(M @ N).max() <= 1e-10
    np.testing.assert_allclose(N.conj().T @ N, np.eye(3), atol=1e-10)


def test_null_space_degenerate_rows_widen():
    row = np.array([[2.0, 1j, 0.0, 0.0]])
    M = np.vstack([row, 3 * row])  # rank 1 despite 2 rows
    assert null_space_basis(M).shape == (4, 3)


def test_null_space_empty_and_zero_inputs():
    empty = np.empty((0, 4))
    np.testing.assert_allclose(null_space_basis(empty), np.eye(4))
    np.testing.assert_allclose(null_space_basis(np.zeros((2, 4))) @
                               null_space_basis(np.zeros((2, 4))).conj().T,
                               np.eye(4), atol=1e-12)


def test_zf_matches_nonrobust_on_orthogonal_channels():
    """With mutually orthogonal channels nulling costs nothing."""
    cfg = NetworkConfig.uniform(1, 3, 4, 2.0)
    h = np.zeros((1, 3, 4), dtype=complex)
    for k, scale in enumerate([1.0, 0.8, 1.3]):
        h[0, k, k] = scale
    channels = ChannelSet(h)
    zf = zf_balance(channels, cfg)
    nr = solve_nonrobust(channels, cfg)
    assert zf.status == "ok"
    assert zf.t_star == pytest.approx(nr.t_star, abs=2e-2)


def test_zf_never_beats_nonrobust(desk_cfg, rng):
    for _ in range(4):
        h = (rng.standard_normal((2, 4, 8)) +
             1j * rng.standard_normal((2, 4, 8))) / np.sqrt(2.0)
        channels = ChannelSet(h)
        zf = zf_balance(channels, desk_cfg)
        nr = solve_nonrobust(channels, desk_cfg)
        assert zf.t_star <= nr.t_star + 1e-6


def test_zf_kills_interference(desk_channels, desk_cfg):
    out = zf_balance(desk_channels, desk_cfg)
    assert out.status == "ok"
    assert out.extras["leakage"] <= 1e-8
    # realized SINRs agree with the interference-free prediction
    for k in range(desk_cfg.num_users):
        bk = desk_cfg.serving_bs[k]
        g = abs(desk_channels.h(bk, k) @ out.beams.m[k]) ** 2
        assert sinr(k, desk_channels, out.beams, desk_cfg) == \
            pytest.approx(g / desk_cfg.noise_var, rel=1e-6)


def test_zf_single_program_no_bisection(desk_channels, desk_cfg):
    out = zf_balance(desk_channels, desk_cfg)
    assert out.iterations == 0
    assert out.bisection is None
    assert out.method == "zf"
    assert out.extras["null_dims"] == [5, 5, 5, 5]


def test_zf_respects_power_budgets(desk_channels, desk_cfg):
    out = zf_balance(desk_channels, desk_cfg)
    for b in range(desk_cfg.num_cells):
        used = sum(np.linalg.norm(out.beams.m[k]) ** 2
                   for k in desk_cfg.user_sets[b])
        assert used <= desk_cfg.power_budget[b] * (1 + 1e-7)


def test_zf_needs_enough_antennas(rng):
    cfg = NetworkConfig.uniform(1, 4, 3, 1.0)
    h = rng.standard_normal((1, 4, 3)) + 1j * rng.standard_normal((1, 4, 3))
    with pytest.raises(ZfInfeasibleError, match="T < K"):
        zf_balance(ChannelSet(h), cfg)
