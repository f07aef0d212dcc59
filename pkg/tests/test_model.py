"""SINR arithmetic against hand-computed and independently accumulated values."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinrbal import (
    BeamformerSet,
    ChannelSet,
    NetworkConfig,
    balanced_objective,
    db2lin,
    lin2db,
    per_bs_power,
    sinr,
)


def _single_link(h, m, power=10.0, noise=1.0):
    T = len(h)
    cfg = NetworkConfig.uniform(1, 1, T, power, noise_var=noise)
    channels = ChannelSet(np.asarray(h, dtype=complex).reshape(1, 1, T))
    beams = BeamformerSet(np.asarray(m, dtype=complex).reshape(1, T))
    return cfg, channels, beams


def test_single_user_gain_over_noise():
    cfg, channels, beams = _single_link([1, 0], [2, 0])
    assert sinr(0, channels, beams, cfg) == pytest.approx(4.0)


def test_orthogonal_users_no_interference():
    cfg = NetworkConfig.uniform(1, 2, 2, 10.0)
    h = np.zeros((1, 2, 2), dtype=complex)
    h[0, 0] = [1, 0]
    h[0, 1] = [0, 1]
    channels = ChannelSet(h)
    beams = BeamformerSet(np.array([[1, 0], [0, 1]], dtype=complex))
    assert sinr(0, channels, beams, cfg) == pytest.approx(1.0)
    assert sinr(1, channels, beams, cfg) == pytest.approx(1.0)


def test_sinr_matches_direct_accumulation():
    """Re-derive every SINR with plain loops over the defining sum."""
    rng = np.random.default_rng(7)
    cfg = NetworkConfig.uniform(2, 3, 4, 5.0, noise_var=0.7,
                                weight=1.0)
    B, K, T = 2, 6, 4
    h = (rng.standard_normal((B, K, T)) + 1j * rng.standard_normal((B, K, T)))
    channels = ChannelSet(h)
    beams = BeamformerSet(rng.standard_normal((K, T))
                          + 1j * rng.standard_normal((K, T)))
    for k in range(K):
        bk = cfg.serving_bs[k]
        num = abs(h[bk, k] @ beams.m[k]) ** 2
        den = cfg.noise_var
        for i in range(K):
            if i == k:
                continue
            den += abs(h[cfg.serving_bs[i], k] @ beams.m[i]) ** 2
        assert sinr(k, channels, beams, cfg) == pytest.approx(num / den, rel=1e-12)


def test_balanced_objective_weighted_min():
    # orthogonal construction pins gamma = (1, 3); weights (2, 1) -> min(2, 3)
    cfg = NetworkConfig(
        num_cells=1, antennas_per_bs=2, num_users=2,
        serving_bs=(0, 0), user_sets=((0, 1),), power_budget=(10.0,),
        noise_var=1.0, weights=(2.0, 1.0),
    )
    h = np.zeros((1, 2, 2), dtype=complex)
    h[0, 0] = [1, 0]
    h[0, 1] = [0, 1]
    channels = ChannelSet(h)
    beams = BeamformerSet(np.array([[1, 0], [0, np.sqrt(3)]], dtype=complex))
    assert balanced_objective(channels, beams, cfg) == pytest.approx(2.0)


def test_per_bs_power_sums_squared_norms():
    cfg = NetworkConfig.uniform(1, 2, 2, 100.0)
    beams = BeamformerSet(np.array([[3, 0], [0, 4]], dtype=complex))
    assert per_bs_power(beams, cfg)[0] == pytest.approx(25.0)


def test_per_bs_power_is_frobenius_norm_squared():
    rng = np.random.default_rng(3)
    cfg = NetworkConfig.uniform(2, 2, 5, 10.0)
    beams = BeamformerSet(rng.standard_normal((4, 5))
                          + 1j * rng.standard_normal((4, 5)))
    p = per_bs_power(beams, cfg)
    for b in range(2):
        M = beams.bs_matrix(b, cfg)
        assert p[b] == pytest.approx(np.linalg.norm(M) ** 2, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.floats(-np.pi, np.pi))
def test_sinr_invariant_under_beam_phase(seed, theta):
    rng = np.random.default_rng(seed)
    cfg = NetworkConfig.uniform(1, 2, 3, 5.0)
    h = rng.standard_normal((1, 2, 3)) + 1j * rng.standard_normal((1, 2, 3))
    channels = ChannelSet(h)
    m = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    before = [sinr(k, channels, BeamformerSet(m), cfg) for k in range(2)]
    rotated = m.copy()
    rotated[0] *= np.exp(1j * theta)
    after = [sinr(k, channels, BeamformerSet(rotated), cfg) for k in range(2)]
    np.testing.assert_allclose(after, before, rtol=1e-10)


def test_sinr_decreases_with_noise():
    cfg_lo, channels, beams = _single_link([1, 1], [1, 0], noise=0.5)
    cfg_hi, _, _ = _single_link([1, 1], [1, 0], noise=2.0)
    assert sinr(0, channels, beams, cfg_hi) < sinr(0, channels, beams, cfg_lo)


def test_db_conversions_round_trip():
    assert db2lin(5.0) == pytest.approx(10 ** 0.5)
    assert lin2db(db2lin(-13.2)) == pytest.approx(-13.2)
    assert lin2db(0.0) == -np.inf


def test_channel_beam_shape_validation():
    cfg = NetworkConfig.uniform(1, 2, 3, 1.0)
    channels = ChannelSet(np.zeros((1, 2, 3), dtype=complex))
    with pytest.raises(ValueError):
        ChannelSet(np.zeros((2, 3), dtype=complex)).check_against(cfg)
    with pytest.raises(ValueError):
        BeamformerSet(np.zeros((2, 4), dtype=complex)).check_against(cfg)
    channels.check_against(cfg)  # matching shapes pass


def test_network_config_rejects_bad_topology():
    with pytest.raises(ValueError):
        NetworkConfig.uniform(0, 2, 3, 1.0)
    with pytest.raises(ValueError):
        NetworkConfig(num_cells=1, antennas_per_bs=2, num_users=2,
                      serving_bs=(0, 1), user_sets=((0, 1),),
                      power_budget=(1.0,), noise_var=1.0, weights=(1.0, 1.0))
