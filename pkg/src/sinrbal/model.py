"""Domain types for the multicell MISO downlink and exact SINR arithmetic.

Network topology, nominal channels and beamformers are immutable value
objects; the SINR operations are pure functions over them. All complex data
is stored canonically as numpy complex128 arrays. Constructors also accept
split (real, imag) pairs and coerce them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NetworkConfig",
    "ChannelSet",
    "BeamformerSet",
    "sinr",
    "balanced_objective",
    "per_bs_power",
    "db2lin",
    "lin2db",
    "as_complex_array",
]


def db2lin(x):
    """dB to linear power scale."""
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def lin2db(x):
    """Linear power scale to dB. Zero maps to -inf (numpy semantics)."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


def as_complex_array(x):
    """Coerce to the canonical complex128 layout.

    Accepts a complex array-like, a real array-like (imaginary part zero),
    or a ``(re, im)`` pair of equal-shape real array-likes.
    """
    if isinstance(x, tuple) and len(x) == 2:
        re = np.asarray(x[0], dtype=float)
        im = np.asarray(x[1], dtype=float)
        if re.shape != im.shape:
            raise ValueError(
                f"split real/imag shapes differ: {re.shape} vs {im.shape}"
            )
        return re + 1j * im
    return np.asarray(x, dtype=np.complex128)


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    """Multicell downlink topology and per-BS budgets.

    Attributes
    ----------
    num_cells : int
        Number of base stations B.
    antennas_per_bs : int
        Transmit antennas T at every BS.
    num_users : int
        Total single-antenna users K across all cells.
    serving_bs : tuple of int
        serving_bs[k] is the BS index serving user k.
    user_sets : tuple of tuple of int
        user_sets[b] lists the users of BS b, in beamformer column order.
    power_budget : tuple of float
        Per-BS transmit power P_b, linear scale (normalized to noise).
    noise_var : float
        Receiver noise variance sigma^2, common to all users.
    weights : tuple of float
        Positive balancing weights alpha_k; the balanced objective is
        min_k alpha_k * SINR_k.
    """

    num_cells: int
    antennas_per_bs: int
    num_users: int
    serving_bs: tuple
    user_sets: tuple
    power_budget: tuple
    noise_var: float
    weights: tuple

    def __post_init__(self):
        B, T, K = self.num_cells, self.antennas_per_bs, self.num_users
        if B < 1 or T < 1 or K < 1:
            raise ValueError("num_cells, antennas_per_bs, num_users must be >= 1")
        object.__setattr__(self, "serving_bs", tuple(int(b) for b in self.serving_bs))
        object.__setattr__(
            self, "user_sets", tuple(tuple(int(k) for k in us) for us in self.user_sets)
        )
        object.__setattr__(self, "power_budget", tuple(float(p) for p in self.power_budget))
        object.__setattr__(self, "weights", tuple(float(a) for a in self.weights))
        object.__setattr__(self, "noise_var", float(self.noise_var))
        if len(self.serving_bs) != K or len(self.weights) != K:
            raise ValueError("serving_bs and weights must have one entry per user")
        if len(self.user_sets) != B or len(self.power_budget) != B:
            raise ValueError("user_sets and power_budget must have one entry per BS")
        seen = [k for us in self.user_sets for k in us]
        if sorted(seen) != list(range(K)):
            raise ValueError("every user must appear in exactly one user set")
        for b, us in enumerate(self.user_sets):
            for k in us:
                if self.serving_bs[k] != b:
                    raise ValueError(f"serving_bs[{k}]={self.serving_bs[k]} but user in set of BS {b}")
        if any(a <= 0 for a in self.weights):
            raise ValueError("weights must be positive")
        if any(p < 0 for p in self.power_budget):
            raise ValueError("power budgets must be nonnegative")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")

    @classmethod
    def uniform(cls, num_cells, users_per_cell, antennas_per_bs, power,
                noise_var=1.0, weight=1.0):
        """Blockwise topology: users 0..K-1 assigned to cells in order,
        identical power budget and weight everywhere. ``power`` is linear."""
        B, Kc = int(num_cells), int(users_per_cell)
        K = B * Kc
        serving = tuple(k // Kc for k in range(K))
        sets = tuple(tuple(range(b * Kc, (b + 1) * Kc)) for b in range(B))
        return cls(
            num_cells=B,
            antennas_per_bs=int(antennas_per_bs),
            num_users=K,
            serving_bs=serving,
            user_sets=sets,
            power_budget=(float(power),) * B,
            noise_var=noise_var,
            weights=(float(weight),) * K,
        )

    def users_of(self, b):
        return self.user_sets[b]

    def cell_size(self, b):
        return len(self.user_sets[b])


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Nominal channel row vectors h_hat[b, k] (length T) for every
    (BS, user) pair, with optional large-scale gains kappa[b, k]."""

    h_hat: np.ndarray
    large_scale: np.ndarray = None

    def __post_init__(self):
        h = as_complex_array(self.h_hat)
        if h.ndim != 3:
            raise ValueError("h_hat must have shape (B, K, T)")
        object.__setattr__(self, "h_hat", _frozen(h))
        if self.large_scale is not None:
            ls = np.asarray(self.large_scale, dtype=float)
            if ls.shape != h.shape[:2]:
                raise ValueError("large_scale must have shape (B, K)")
            if np.any(ls <= 0):
                raise ValueError("large-scale gains must be positive")
            object.__setattr__(self, "large_scale", _frozen(ls))

    @property
    def num_bs(self):
        return self.h_hat.shape[0]

    @property
    def num_users(self):
        return self.h_hat.shape[1]

    @property
    def num_antennas(self):
        return self.h_hat.shape[2]

    def h(self, b, k):
        """Channel row vector from BS b to user k."""
        return self.h_hat[b, k]

    def check_against(self, cfg):
        B, K, T = self.h_hat.shape
        if (B, K, T) != (cfg.num_cells, cfg.num_users, cfg.antennas_per_bs):
            raise ValueError(
                f"channel set shape {(B, K, T)} does not match network "
                f"({cfg.num_cells}, {cfg.num_users}, {cfg.antennas_per_bs})"
            )


@dataclass(frozen=True, eq=False)
class BeamformerSet:
    """One complex beamforming vector m_k (length T) per user, stored as an
    array of shape (K, T). Per-BS matrices M_b group the columns of the
    users served by b, in user_sets order."""

    m: np.ndarray

    def __post_init__(self):
        m = as_complex_array(self.m)
        if m.ndim != 2:
            raise ValueError("m must have shape (K, T)")
        object.__setattr__(self, "m", _frozen(m))

    @classmethod
    def zeros(cls, cfg):
        return cls(np.zeros((cfg.num_users, cfg.antennas_per_bs), dtype=np.complex128))

    @property
    def num_users(self):
        return self.m.shape[0]

    def vector(self, k):
        return self.m[k]

    def bs_matrix(self, b, cfg):
        """M_b: T x K_b matrix whose columns are m_k for k in user_sets[b]."""
        users = cfg.user_sets[b]
        return self.m[list(users)].T.copy()

    def check_against(self, cfg):
        K, T = self.m.shape
        if (K, T) != (cfg.num_users, cfg.antennas_per_bs):
            raise ValueError(
                f"beamformer shape {(K, T)} does not match network "
                f"({cfg.num_users}, {cfg.antennas_per_bs})"
            )


def _check_triple(channels, beams, cfg):
    channels.check_against(cfg)
    beams.check_against(cfg)


def sinr(k, channels, beams, cfg):
    """SINR of user k under nominal channels.

    Returns |h_{b_k,k} m_k|^2 over the noise variance plus intra-cell
    interference (other beams of the serving BS seen through h_{b_k,k})
    plus inter-cell interference (all beams of every other BS seen through
    h_{b,k}).
    """
    _check_triple(channels, beams, cfg)
    if not 0 <= k < cfg.num_users:
        raise ValueError(f"user index {k} out of range")
    bk = cfg.serving_bs[k]
    denom = cfg.noise_var
    desired = 0.0
    for b in range(cfg.num_cells):
        gains = channels.h(b, k) @ beams.bs_matrix(b, cfg)
        p = np.abs(gains) ** 2
        if b == bk:
            pos = cfg.user_sets[b].index(k)
            desired = p[pos]
            denom += p.sum() - p[pos]
        else:
            denom += p.sum()
    return float(desired / denom)


def balanced_objective(channels, beams, cfg):
    """Weighted balanced SINR: min_k alpha_k * SINR_k."""
    vals = [cfg.weights[k] * sinr(k, channels, beams, cfg) for k in range(cfg.num_users)]
    return float(min(vals))


def per_bs_power(beams, cfg):
    """Transmit power used at each BS: entry b equals
    sum_{k in user_sets[b]} ||m_k||^2."""
    beams.check_against(cfg)
    out = np.empty(cfg.num_cells)
    for b in range(cfg.num_cells):
        out[b] = np.sum(np.abs(beams.m[list(cfg.user_sets[b])]) ** 2)
    return out
