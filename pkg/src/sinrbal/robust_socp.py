"""Conservative SOCP approximation of worst-case SINR balancing.

The worst-case counterpart asks every SOC constraint of the balancing
problem to hold for all channel errors v with ||v|| <= rho'. Splitting each
complex error component into nonnegative magnitude pairs and lower-bounding
the (concave) perturbed terms direction by direction turns the semi-infinite
constraint into finitely many conic rows plus one dual-norm cap: for margins
of the form

    f1 = z - ||M_b' h_hat'||,     f2(delta) = -||(delta M_b)'||  (always <= 0),

the worst case over the set equals f1 - rho' * dualnorm(gamma) with
gamma_j = max{-f2(delta^j), -f2(-delta^j), 0}. The interference side of the
construction is exact (the split loses nothing there); the desired-signal
side is a safe lower bound at the design radius but not a guarantee at the
true radius, which is what the PE experiments quantify.

When the perturbation directions are the identity and the set is an l2
ball, the per-direction rows collapse: the interference cap for BS b is
just the Frobenius norm of M_b (one SOC per BS, shared by all users) and
the desired-side cap is ||Re m_k||. This stacked fast path is chosen
automatically.
"""

from __future__ import annotations

import numpy as np

from .balancing import (
    BisectionConfig,
    add_power_budgets,
    all_gains_at_user,
    c_factor,
    run_bisection,
    solve_nonrobust,
)
from .conic import Aff, CAff, ConicProgram, complex_soc_embed
from .model import BeamformerSet
from .uncertainty import UnsupportedNormError

__all__ = [
    "f1",
    "f2",
    "worst_case_margin_bruteforce",
    "robust_desired_block",
    "robust_interference_block",
    "feasibility_socp",
    "make_socp_oracle",
    "solve_socp",
]


def f1(M_b, z, h_hat):
    """Margin of the interference-norm slack at the nominal channel."""
    M_b = np.asarray(M_b, dtype=np.complex128)
    h_hat = np.asarray(h_hat, dtype=np.complex128).ravel()
    if h_hat.size != M_b.shape[0]:
        raise ValueError("channel length must match the antenna dimension")
    return float(z) - float(np.linalg.norm(h_hat @ M_b))


def f2(M_b, delta):
    """Directional penalty -||delta M_b||; symmetric in the sign of delta
    and never positive."""
    M_b = np.asarray(M_b, dtype=np.complex128)
    delta = np.asarray(delta, dtype=np.complex128).ravel()
    if delta.size != M_b.shape[0]:
        raise ValueError("direction length must match the antenna dimension")
    return -float(np.linalg.norm(delta @ M_b))


def worst_case_margin_bruteforce(f1_val, f2_vals, norm_kind, rho_prime,
                                 grid_res=9, rounds=4, box_ratio=None):
    """Direct minimization of the split worst-case margin, used only as a
    test oracle against the dual-norm formula.

    Minimizes f1 + sum_i [f2_i * theta_i + f2_i * phi_i] over nonnegative
    (theta, phi) with ||theta + phi|| <= rho_prime on a refining dense grid
    (f2 is symmetric, so one value per direction covers both signs). The
    objective is linear and the set convex, so grid refinement converges to
    the global minimum. Exponential in the number of directions; refuses
    more than four.
    """
    f2_vals = np.asarray(f2_vals, dtype=float).ravel()
    l = f2_vals.size
    if l > 4:
        raise ValueError("brute-force margin supports at most 4 directions")
    if l == 0 or rho_prime == 0:
        return float(f1_val)
    if norm_kind == "l2_cap_linf" and (box_ratio is None or box_ratio <= 0):
        raise ValueError("l2_cap_linf needs a positive box_ratio")
    dims = 2 * l
    res = int(grid_res) if dims <= 6 else min(int(grid_res), 5)
    cap = float(rho_prime)
    if norm_kind == "l2_cap_linf":
        comp_cap = min(cap, cap * box_ratio)
    else:
        comp_cap = cap
    lo = np.zeros(dims)
    hi = np.full(dims, comp_cap)
    best = float(f1_val)  # theta = phi = 0 is always feasible
    for _ in range(rounds):
        axes = [np.linspace(lo[d], hi[d], res) for d in range(dims)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dims)
        s = pts[:, :l] + pts[:, l:]
        if norm_kind == "l2":
            ok = np.linalg.norm(s, axis=1) <= cap * (1 + 1e-12)
        elif norm_kind == "linf":
            ok = s.max(axis=1) <= cap * (1 + 1e-12)
        elif norm_kind == "l1":
            ok = s.sum(axis=1) <= cap * (1 + 1e-12)
        elif norm_kind == "l2_cap_linf":
            ok = ((np.linalg.norm(s, axis=1) <= cap * (1 + 1e-12))
                  & (s.max(axis=1) <= cap * box_ratio * (1 + 1e-12)))
        else:
            raise UnsupportedNormError(f"unknown norm kind {norm_kind!r}")
        if not ok.any():
            break
        vals = f1_val + s[ok] @ f2_vals
        idx = int(np.argmin(vals))
        best = min(best, float(vals[idx]))
        center = pts[ok][idx]
        width = (hi - lo) / (res - 1)
        lo = np.clip(center - width, 0.0, comp_cap)
        hi = np.clip(center + width, 0.0, comp_cap)
    return best


def _dual_cap(prog, vec_aff, norm_kind, box_ratio=None):
    """Epigraph scalar L with dualnorm(vec) <= L, for vec entries that are
    themselves bounds on absolute quantities (entrywise nonnegative at any
    feasible point)."""
    L = prog.new_vars(1)
    if norm_kind == "l2":
        prog.soc(Aff.stack([L, vec_aff]))
    elif norm_kind == "linf":
        # dual of the componentwise-modulus linf bound is the l1 norm
        prog.nonneg(L - vec_aff.sum())
    elif norm_kind == "l1":
        ones = np.ones(vec_aff.size)
        prog.nonneg(L.apply(ones[:, None]) - vec_aff)
    else:
        raise UnsupportedNormError(f"no dual-norm cap for {norm_kind!r}")
    return L


def _support_expr(prog, vec_aff, radius, norm_kind, box_ratio=None):
    """Aff scalar upper-bounding the support function of the design-radius
    set at vec: radius * dualnorm(vec) for the simple norms, the infimal
    convolution split for the ball/box intersection."""
    if norm_kind == "l2_cap_linf":
        n = vec_aff.size
        u = prog.new_vars(n)
        w = prog.new_vars(n)
        r1 = prog.new_vars(1)
        prog.soc(Aff.stack([r1, vec_aff - u]))
        prog.nonneg(w - u)
        prog.nonneg(w + u)
        return r1 * radius + w.sum() * (radius * box_ratio)
    L = _dual_cap(prog, vec_aff, norm_kind)
    return L * radius


def _gain(m_caff, row):
    return m_caff.apply(np.asarray(row, dtype=np.complex128)[None, :])


def robust_desired_block(prog, m, k, t, channels, cfg, uset, fast):
    """Desired-signal rows for user k at target t.

    Nominal: C_k Re(h_hat m_k) - E >= ||(z_{1,k} ... z_{B,k}, sigma)|| with
    E covering the worst-case loss at the design radius; the direction rows
    +-C_k Re(delta^i m_k) + q_i >= 0 feed the dual-norm cap. The imaginary
    part of the nominal gain is forced to zero (the perturbed gains cannot
    be)."""
    bk = cfg.serving_bs[k]
    hrow = channels.h(bk, k)
    ck = c_factor(cfg.weights[k], t)
    desired = _gain(m[k], hrow)
    prog.zero(desired.im)
    rp = float(uset.rho_prime[bk, k])
    if fast:
        L = prog.new_vars(1)
        prog.soc(Aff.stack([L, m[k].re * ck]))
        E = L * rp
    else:
        A = uset.A(bk, k)
        q = prog.new_vars(uset.n_dirs(bk, k))
        dir_gain = (m[k].apply(A)).re * ck
        prog.nonneg(q + dir_gain)
        prog.nonneg(q - dir_gain)
        E = _support_expr(prog, q, rp, uset.norm_kind,
                          box_ratio=uset.box_ratio(bk, k))
    return desired.re * ck - E


def robust_interference_block(prog, m, b, k, z_bk, channels, cfg, uset,
                              fast, nu_shared=None):
    """Per-BS received-power slack for the (b, k) link:
    z_{b,k} - ||M_b' h_hat'|| >= E with E the design-radius support of the
    per-direction norms ||(delta^i M_b)'|| (collapsing to the Frobenius
    norm of M_b on the stacked fast path)."""
    hrow = channels.h(b, k)
    gains = CAff.stack([_gain(m[i], hrow) for i in cfg.user_sets[b]])
    rp = float(uset.rho_prime[b, k])
    if fast:
        E = nu_shared * rp
    else:
        A = uset.A(b, k)
        l = uset.n_dirs(b, k)
        mu = prog.new_vars(l)
        for i in range(l):
            row = CAff.stack([_gain(m[j], A[i]) for j in cfg.user_sets[b]])
            prog.soc(Aff.stack([mu[i], complex_soc_embed(row)]))
        E = _support_expr(prog, mu, rp, uset.norm_kind,
                          box_ratio=uset.box_ratio(b, k))
    prog.soc(Aff.stack([z_bk - E, complex_soc_embed(gains)]))


def _use_fast_path(uset, fast):
    if fast == "auto":
        return uset.is_identity and uset.norm_kind == "l2"
    return bool(fast)


def feasibility_socp(t, channels, cfg, uset, backend="clarabel", fast="auto"):
    """Robust balancing feasibility at target t.

    Returns (SolveResult, payload); payload is None unless feasible, else a
    dict with the beamformers, the z slack matrix (B, K), and the path
    taken.
    """
    if t <= 0:
        raise ValueError("target t must be positive")
    channels.check_against(cfg)
    fast = _use_fast_path(uset, fast)
    B, K = cfg.num_cells, cfg.num_users
    sigma = np.sqrt(cfg.noise_var)
    prog = ConicProgram()
    m = [prog.new_cvars(cfg.antennas_per_bs) for _ in range(K)]
    z = prog.new_vars(B * K)
    prog.nonneg(z)
    nu = None
    if fast:
        # one Frobenius cap per BS serves every outgoing link
        nu = prog.new_vars(B)
        for b in range(B):
            stacked = CAff.stack([m[i] for i in cfg.user_sets[b]])
            prog.soc(Aff.stack([nu[b], complex_soc_embed(stacked)]))
    for b in range(B):
        for k in range(K):
            robust_interference_block(
                prog, m, b, k, z[b * K + k], channels, cfg, uset, fast,
                nu_shared=None if nu is None else nu[b])
    for k in range(K):
        top = robust_desired_block(prog, m, k, t, channels, cfg, uset, fast)
        zk = Aff.stack([z[b * K + k] for b in range(B)])
        prog.soc(Aff.stack([top, zk, Aff.constant(sigma)]))
    add_power_budgets(prog, m, cfg)
    res = prog.solve(backend=backend)
    payload = None
    if res.status == "optimal":
        beams = BeamformerSet(np.stack([res.value(mk) for mk in m]))
        zval = res.value(z).reshape(B, K)
        payload = {"beams": beams, "z": zval, "fast_path": fast}
    return res, payload


def make_socp_oracle(channels, cfg, uset, backend="clarabel", fast="auto"):
    def oracle(t):
        return feasibility_socp(t, channels, cfg, uset, backend=backend, fast=fast)
    return oracle


def solve_socp(channels, cfg, uset, bis_cfg=None, backend="clarabel",
               fast="auto", t_hi=None):
    """Full robust SOCP solve. The AUTO upper bound is the non-robust
    optimum (pass t_hi to reuse one already computed)."""
    bis_cfg = bis_cfg or BisectionConfig()
    if t_hi is None:
        if bis_cfg.t_hi == "auto":
            t_hi = solve_nonrobust(channels, cfg, bis_cfg, backend=backend).t_star
        else:
            t_hi = float(bis_cfg.t_hi)
    oracle = make_socp_oracle(channels, cfg, uset, backend=backend, fast=fast)
    out = run_bisection("socp", oracle, bis_cfg, t_hi)
    if out.beams is not None:
        payload = out.beams
        out.beams = payload["beams"]
        out.extras.update(z=payload["z"], fast_path=payload["fast_path"])
    return out
