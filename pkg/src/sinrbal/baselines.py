"""Zero-forcing baseline.

Each beamformer is confined to the null space of every other user's channel
from its serving BS, which kills all interference (up to numerical residue)
and decouples the network into single-user links sharing only the per-BS
power budgets. The balancing problem then collapses to a single small conic
program over the effective channels, no bisection. Needs at least as many
antennas as users.
"""

from __future__ import annotations

import time

import numpy as np

from .balancing import MethodResult
from .conic import Aff, CAff, ConicProgram, complex_soc_embed
from .model import BeamformerSet, balanced_objective

__all__ = ["ZfInfeasibleError", "null_space_basis", "zf_balance"]


class ZfInfeasibleError(RuntimeError):
    pass


def null_space_basis(M, rtol=1e-10):
    """Orthonormal basis of the right null space of M (columns, T x r).

    Rank is counted relative to the largest singular value; degenerate rows
    can make the null space wider than T - rows.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    T = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(T, dtype=np.complex128)
    _, s, Vh = np.linalg.svd(M)
    rank = int((s > rtol * s[0]).sum()) if s.size and s[0] > 0 else 0
    return Vh[rank:].conj().T


def zf_balance(channels, cfg, backend="clarabel"):
    """Balanced-SINR beamforming with full interference nulling.

    For user k the serving BS projects onto the joint null space of all
    other users' channels from that BS, leaving an interference-free link
    with effective channel h G_k. The balanced point solves one program:
    maximize u with u * sigma / alpha_k <= Re(heff_k meff_k) per user and
    the per-BS power cones (the basis is orthonormal, so power is
    preserved). The returned t_star is the nominal balanced objective of
    the mapped beamformers (u itself lives on a square-root scale), so any
    numerical leakage shows up there instead of being assumed away.
    """
    start = time.perf_counter()
    channels.check_against(cfg)
    K, T = cfg.num_users, cfg.antennas_per_bs
    if T < K:
        raise ZfInfeasibleError("zf infeasible: T < K")
    sigma = np.sqrt(cfg.noise_var)

    bases = []
    heff = []
    for k in range(K):
        bk = cfg.serving_bs[k]
        others = np.stack([channels.h(bk, j) for j in range(K) if j != k]) \
            if K > 1 else np.empty((0, T), dtype=np.complex128)
        G = null_space_basis(others)
        bases.append(G)
        heff.append(channels.h(bk, k) @ G)

    prog = ConicProgram()
    u = prog.new_vars(1)
    prog.nonneg(u)
    meff = [prog.new_cvars(G.shape[1]) for G in bases]
    for k in range(K):
        gain = meff[k].apply(heff[k][None, :])
        prog.zero(gain.im)
        prog.nonneg(gain.re - u * (sigma / cfg.weights[k]))
    for b in range(cfg.num_cells):
        stacked = CAff.stack([meff[k] for k in cfg.user_sets[b]])
        prog.soc(Aff.stack([Aff.constant(np.sqrt(cfg.power_budget[b])),
                            complex_soc_embed(stacked)]))
    prog.minimize(u * -1.0)
    res = prog.solve(backend=backend)

    if res.status != "optimal":
        status = "failed" if res.status == "unknown" else "infeasible"
        return MethodResult(method="zf", t_star=0.0, beams=None, iterations=0,
                            status=status, wall_time=time.perf_counter() - start)

    m = np.stack([bases[k] @ res.value(meff[k]) for k in range(K)])
    beams = BeamformerSet(m)
    leak = 0.0
    for k in range(K):
        bk = cfg.serving_bs[k]
        for j in range(K):
            if j != k:
                leak = max(leak, abs(channels.h(bk, j) @ m[k]))
    return MethodResult(
        method="zf",
        t_star=balanced_objective(channels, beams, cfg),
        beams=beams,
        iterations=0,
        status="ok",
        wall_time=time.perf_counter() - start,
        extras={"leakage": leak,
                "null_dims": [G.shape[1] for G in bases]},
    )
