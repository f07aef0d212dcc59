"""S-procedure SDP relaxation of worst-case SINR balancing.

Each user's worst-case SINR constraint splits into one quadratic condition
per interfering BS, quantified over the channel error of that link. For
ellipsoidal (l2-ball) errors the S-procedure turns each condition into a
linear matrix inequality in the beamformer outer products P_k = m_k m_k',
a nonnegative multiplier, and a slack; dropping the rank-1 requirement on
the P_k leaves a semidefinite feasibility problem solved inside the usual
bisection. Beamformers are recovered from the principal eigenpair, with the
captured-energy fraction reported as rank1_ratio.

The complex LMIs are embedded as real PSD blocks of doubled order. For each
link the linear map from the T^2 real parameters of a Hermitian matrix W to
svec([[A W A', A W h'], [h W A', h W h']]) is precomputed once per channel
realization; re-assembling the program at a new bisection target only
rescales the desired-user columns by alpha_k / t.
"""

from __future__ import annotations

import numpy as np

from .balancing import BisectionConfig, run_bisection, solve_nonrobust
from .conic import Aff, ConicProgram, svec, _svec_index_maps
from .model import BeamformerSet
from .uncertainty import UnsupportedUncertaintyError

__all__ = [
    "build_lmi_desired",
    "build_lmi_interference",
    "feasibility_sdp",
    "make_sdp_oracle",
    "solve_sdp",
    "extract_beamformer",
    "lmi_param_map",
    "params_to_hermitian",
    "hermitian_to_params",
]


def _require_ellipsoid(uset):
    if uset.norm_kind != "l2":
        raise UnsupportedUncertaintyError(
            "the S-procedure relaxation supports l2 (ellipsoidal) "
            f"uncertainty only, not {uset.norm_kind!r}"
        )


def _offdiag_pairs(T):
    """(i, j) with i < j, column-major, fixing the parameter ordering."""
    i = np.concatenate([np.arange(j) for j in range(1, T)]) if T > 1 else np.empty(0, int)
    j = np.concatenate([np.full(jj, jj) for jj in range(1, T)]) if T > 1 else np.empty(0, int)
    return i.astype(int), j.astype(int)


def params_to_hermitian(p, T):
    """Inverse of the parameter layout: first T entries are the diagonal,
    then Re of the strict upper triangle (column major), then Im."""
    p = np.asarray(p, dtype=float)
    if p.size != T * T:
        raise ValueError("parameter vector must have length T^2")
    i, j = _offdiag_pairs(T)
    n_off = i.size
    H = np.zeros((T, T), dtype=np.complex128)
    H[np.arange(T), np.arange(T)] = p[:T]
    x = p[T:T + n_off]
    y = p[T + n_off:]
    H[i, j] = x + 1j * y
    H[j, i] = x - 1j * y
    return H


def hermitian_to_params(H):
    H = np.asarray(H, dtype=np.complex128)
    T = H.shape[0]
    i, j = _offdiag_pairs(T)
    return np.concatenate([H.diagonal().real, H[i, j].real, H[i, j].imag])


def _svec_embed_batch(H):
    """svec of the [[X, -Y], [Y, X]] embedding for a batch of Hermitian
    matrices, shape (p, nc, nc) -> (p, svec_len(2 nc))."""
    X, Y = H.real, H.imag
    p, nc, _ = H.shape
    R = np.empty((p, 2 * nc, 2 * nc))
    R[:, :nc, :nc] = X
    R[:, :nc, nc:] = -Y
    R[:, nc:, :nc] = Y
    R[:, nc:, nc:] = X
    si, sj, scale = _svec_index_maps(2 * nc)
    return R[:, si, sj] * scale


def lmi_param_map(S):
    """Linear map (svec rows x T^2 params) from a Hermitian W to the real
    embedding of S W S^H. With S the identity this is the map onto W's own
    PSD block."""
    S = np.asarray(S, dtype=np.complex128)
    nc, T = S.shape
    outer = np.einsum("ua,vb->abuv", S, S.conj())
    i, j = _offdiag_pairs(T)
    cols = np.empty((T * T, nc, nc), dtype=np.complex128)
    cols[:T] = outer[np.arange(T), np.arange(T)]
    cols[T:T + i.size] = outer[i, j] + outer[j, i]
    cols[T + i.size:] = 1j * (outer[i, j] - outer[j, i])
    return _svec_embed_batch(cols).T


def _diag_col(values):
    """svec of the real embedding of a real diagonal matrix."""
    d = np.asarray(values, dtype=float)
    return svec(np.diag(np.concatenate([d, d])))


def _link_map(channels, uset, b, k, cache):
    key = (b, k)
    if cache is not None and key in cache["link"]:
        return cache["link"][key]
    S = np.vstack([uset.A(b, k), channels.h(b, k)[None, :]])
    M = lmi_param_map(S)
    if cache is not None:
        cache["link"][key] = M
    return M


def build_lmi_desired(prog, p_cols, tau_k, k, t, channels, cfg, uset, cache=None):
    """Desired-signal LMI for user k at target t: with
    W = (alpha_k/t) P_k - sum of the other same-cell P_i,

        [[A W A' + lam I, A W h'], [h W A', h W h' - tau_k - lam rho^2]] >= 0.

    Returns (svec Aff, real matrix order). The multiplier lam is created
    here; tau_k is shared with the noise-linking row and passed in.
    """
    _require_ellipsoid(uset)
    bk = cfg.serving_bs[k]
    M = _link_map(channels, uset, bk, k, cache)
    l = uset.n_dirs(bk, k)
    rho = float(uset.rho[bk, k])
    lam = prog.new_vars(1)
    prog.nonneg(lam)
    cols, panels = [], []
    for i in cfg.user_sets[bk]:
        scale = cfg.weights[k] / t if i == k else -1.0
        cols.append(p_cols[i])
        panels.append(M * scale)
    cols.append(tau_k.cols)
    panels.append(-_diag_col(np.concatenate([np.zeros(l), [1.0]]))[:, None])
    cols.append(lam.cols)
    panels.append(_diag_col(np.concatenate([np.ones(l), [-rho ** 2]]))[:, None])
    aff = Aff(np.concatenate(cols), np.hstack(panels), np.zeros(M.shape[0]))
    return aff, 2 * (l + 1)


def build_lmi_interference(prog, p_cols, t_bk, b, k, channels, cfg, uset, cache=None):
    """Cross-link LMI for BS b at user k (b != serving BS): with
    Q_b the sum of BS b's covariances,

        [[-A Q A' + lam I, -A Q h'], [-h Q A', -h Q h' + t_bk - lam rho^2]] >= 0.
    """
    _require_ellipsoid(uset)
    M = _link_map(channels, uset, b, k, cache)
    l = uset.n_dirs(b, k)
    rho = float(uset.rho[b, k])
    lam = prog.new_vars(1)
    prog.nonneg(lam)
    cols, panels = [], []
    for i in cfg.user_sets[b]:
        cols.append(p_cols[i])
        panels.append(-M)
    cols.append(t_bk.cols)
    panels.append(_diag_col(np.concatenate([np.zeros(l), [1.0]]))[:, None])
    cols.append(lam.cols)
    panels.append(_diag_col(np.concatenate([np.ones(l), [-rho ** 2]]))[:, None])
    aff = Aff(np.concatenate(cols), np.hstack(panels), np.zeros(M.shape[0]))
    return aff, 2 * (l + 1)


def _make_cache(channels, cfg, uset):
    T = cfg.antennas_per_bs
    return {"link": {}, "identity": lmi_param_map(np.eye(T))}


def feasibility_sdp(t, channels, cfg, uset, backend="clarabel", cache=None):
    """Rank-relaxed robust feasibility at target t.

    Returns (SolveResult, P) with P the (K, T, T) covariance array when
    feasible, else None.
    """
    if t <= 0:
        raise ValueError("target t must be positive")
    _require_ellipsoid(uset)
    channels.check_against(cfg)
    if cache is None:
        cache = _make_cache(channels, cfg, uset)
    B, K, T = cfg.num_cells, cfg.num_users, cfg.antennas_per_bs
    prog = ConicProgram()
    p_aff = [prog.new_vars(T * T) for _ in range(K)]
    p_cols = [a.cols for a in p_aff]
    tau = [prog.new_vars(1) for _ in range(K)]
    tvar = {}
    for k in range(K):
        for b in range(B):
            if b != cfg.serving_bs[k]:
                tvar[(b, k)] = prog.new_vars(1)
    for k in range(K):
        prog.nonneg(tau[k])
        aff, order = build_lmi_desired(prog, p_cols, tau[k], k, t, channels,
                                       cfg, uset, cache)
        prog.psd_svec(aff, order)
        # noise link: tau_k >= sigma^2 + sum of cross-BS slacks
        link = tau[k] - Aff.constant(cfg.noise_var)
        for b in range(B):
            if b != cfg.serving_bs[k]:
                prog.nonneg(tvar[(b, k)])
                aff_i, order_i = build_lmi_interference(
                    prog, p_cols, tvar[(b, k)], b, k, channels, cfg, uset, cache)
                prog.psd_svec(aff_i, order_i)
                link = link - tvar[(b, k)]
        prog.nonneg(link)
    ident = cache["identity"]
    for k in range(K):
        prog.psd_svec(Aff(p_cols[k], ident, np.zeros(ident.shape[0])), 2 * T)
    for b in range(B):
        # trace power: sum over served users of the diagonal parameters
        tr_cols = np.concatenate([p_cols[i][:T] for i in cfg.user_sets[b]])
        tr = Aff(tr_cols, -np.ones((1, tr_cols.size)),
                 np.array([cfg.power_budget[b]]))
        prog.nonneg(tr)
    res = prog.solve(backend=backend)
    P = None
    if res.status == "optimal":
        P = np.stack([params_to_hermitian(res.value(a), T) for a in p_aff])
    return res, P


def make_sdp_oracle(channels, cfg, uset, backend="clarabel"):
    _require_ellipsoid(uset)
    cache = _make_cache(channels, cfg, uset)
    def oracle(t):
        return feasibility_sdp(t, channels, cfg, uset, backend=backend, cache=cache)
    return oracle


def extract_beamformer(P, h_desired=None):
    """Principal-eigenpair beamformer from a covariance: m = sqrt(l1) u1,
    phase-aligned so h_desired m is real nonnegative when a channel is
    given. rank1_ratio is the captured-energy fraction l1 / sum(l_i),
    defined as 1 for a zero matrix."""
    P = np.asarray(P, dtype=np.complex128)
    w, U = np.linalg.eigh(P)
    w = np.maximum(w, 0.0)
    total = float(w.sum())
    if total <= 0.0:
        return np.zeros(P.shape[0], dtype=np.complex128), 1.0
    lead = float(w[-1])
    m = np.sqrt(lead) * U[:, -1]
    if h_desired is not None:
        g = np.asarray(h_desired, dtype=np.complex128) @ m
        if np.abs(g) > 0:
            m = m * np.exp(-1j * np.angle(g))
    return m, lead / total


def solve_sdp(channels, cfg, uset, bis_cfg=None, backend="clarabel", t_hi=None):
    """Full robust SDP solve with principal-eigenvector extraction. AUTO
    upper bound is the non-robust optimum (pass t_hi to reuse one)."""
    _require_ellipsoid(uset)
    bis_cfg = bis_cfg or BisectionConfig()
    if t_hi is None:
        if bis_cfg.t_hi == "auto":
            t_hi = solve_nonrobust(channels, cfg, bis_cfg, backend=backend).t_star
        else:
            t_hi = float(bis_cfg.t_hi)
    oracle = make_sdp_oracle(channels, cfg, uset, backend=backend)
    out = run_bisection("sdp", oracle, bis_cfg, t_hi)
    if out.beams is not None:
        P = out.beams
        beams, ratios = [], []
        for k in range(cfg.num_users):
            h = channels.h(cfg.serving_bs[k], k)
            mk, r = extract_beamformer(P[k], h)
            beams.append(mk)
            ratios.append(r)
        out.beams = BeamformerSet(np.stack(beams))
        out.extras.update(
            covariances=P,
            rank1_ratios=np.array(ratios),
            relaxation_loose=bool(min(ratios) < 0.99),
        )
    return out
