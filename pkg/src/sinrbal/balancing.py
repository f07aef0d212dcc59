"""Perfect-CSI SINR balancing and the bisection driver shared by all methods.

The balancing problem max min_k alpha_k * SINR_k under per-BS power budgets
is quasi-convex: for a fixed target t it reduces to a conic feasibility
problem, so the optimum is found by bisection on t. Every robust method in
this package plugs its own feasibility oracle into the same driver.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .conic import Aff, CAff, ConicProgram, complex_soc_embed
from .model import BeamformerSet

__all__ = [
    "BisectionConfig",
    "BisectionResult",
    "MethodResult",
    "bisect",
    "single_user_upper_bound",
    "feasibility_nonrobust",
    "make_nonrobust_oracle",
    "solve_nonrobust",
    "c_factor",
]


def c_factor(alpha, t):
    """Per-user SOC coefficient sqrt(1 + alpha/t) for target t."""
    if t <= 0:
        raise ValueError("target t must be positive")
    return np.sqrt(1.0 + alpha / t)


@dataclass(frozen=True)
class BisectionConfig:
    """t_hi may be a number or "auto": the non-robust methods cap at the
    single-user bound, robust methods at the non-robust optimum."""

    t_lo: float = 0.0
    t_hi: object = "auto"
    eps: float = 1e-2
    max_iters: int = 64

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.t_hi != "auto":
            if float(self.t_hi) <= self.t_lo:
                raise ValueError("t_hi must exceed t_lo")


@dataclass
class BisectionResult:
    t_star: float
    feasible: bool
    witness: object
    iterations: int
    resolved_t_hi: float
    unknown_probes: int = 0
    history: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass
class MethodResult:
    """Uniform result shape across all solve_* entry points."""

    method: str
    t_star: float
    beams: object
    iterations: int
    status: str            # "ok", "infeasible", "failed"
    wall_time: float
    bisection: object = None
    extras: dict = field(default_factory=dict)


def bisect(oracle, cfg, t_hi=None):
    """Largest t (within cfg.eps) at which oracle reports feasible.

    oracle(t) returns (SolveResult, payload); only status "optimal" counts
    as feasible, "unknown" is treated as infeasible (conservative). The
    upper bracket is probed first; if it turns out feasible the bracket is
    doubled (numerical safety net, the AUTO caps are true upper bounds in
    exact arithmetic). The witness of the last feasible probe is kept, no
    re-solve at the returned t.
    """
    if t_hi is None:
        if cfg.t_hi == "auto":
            raise ValueError("resolve the auto upper bound before calling bisect")
        t_hi = float(cfg.t_hi)
    lo = float(cfg.t_lo)
    hi = float(t_hi)
    if hi <= lo:
        return BisectionResult(t_star=lo, feasible=False, witness=None,
                               iterations=0, resolved_t_hi=hi)
    history = []
    warnings = []
    unknown = 0
    witness = None
    t_feas = None
    iters = 0

    def probe(t):
        nonlocal iters, unknown, witness, t_feas
        res, payload = oracle(t)
        iters += 1
        ok = res.status == "optimal"
        if res.status == "unknown":
            unknown += 1
        history.append((t, res.status))
        if ok:
            witness = payload
            t_feas = t
        return ok

    expansions = 0
    while probe(hi) and iters < cfg.max_iters:
        lo = hi
        hi = 2.0 * hi
        expansions += 1
        if expansions >= 8:
            warnings.append("expansion cap reached; upper bound unreliable")
            break
    if expansions:
        warnings.append(f"upper bound expanded {expansions}x: probe at the cap was feasible")
    top = hi
    while hi - lo > cfg.eps and iters < cfg.max_iters:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    if iters >= cfg.max_iters and hi - lo > cfg.eps:
        warnings.append("iteration cap reached before bracket closed")

    # monotonicity audit: a feasible probe above an infeasible one
    feas_ts = [t for t, s in history if s == "optimal"]
    infeas_ts = [t for t, s in history if s != "optimal"]
    if feas_ts and infeas_ts and max(feas_ts) > min(infeas_ts) + 1e-15:
        warnings.append("non-monotone oracle: feasible above an infeasible probe")

    found = witness is not None
    return BisectionResult(
        t_star=float(t_feas) if found else float(cfg.t_lo),
        feasible=found,
        witness=witness,
        iterations=iters,
        resolved_t_hi=top,
        unknown_probes=unknown,
        history=history,
        warnings=warnings,
    )


def single_user_upper_bound(channels, cfg):
    """min_k alpha_k P_{b_k} ||h_{b_k,k}||^2 / sigma^2: no user can beat its
    own interference-free, full-power SINR, so the balanced objective can't
    either."""
    vals = []
    for k in range(cfg.num_users):
        b = cfg.serving_bs[k]
        vals.append(cfg.weights[k] * cfg.power_budget[b]
                    * np.linalg.norm(channels.h(b, k)) ** 2 / cfg.noise_var)
    return float(min(vals))


def _beam_vars(prog, cfg):
    return [prog.new_cvars(cfg.antennas_per_bs) for _ in range(cfg.num_users)]


def _gain(m_caff, hrow):
    """Complex scalar h m as a CAff of length 1."""
    return m_caff.apply(np.asarray(hrow, dtype=np.complex128)[None, :])


def all_gains_at_user(m, channels, cfg, k):
    """CAff of length K: every beam's gain at user k, ordered by
    (BS, position in user_sets)."""
    parts = []
    for b in range(cfg.num_cells):
        hrow = channels.h(b, k)
        for i in cfg.user_sets[b]:
            parts.append(_gain(m[i], hrow))
    return CAff.stack(parts)


def add_power_budgets(prog, m, cfg):
    """SOC budget ||vec(M_b)|| <= sqrt(P_b) per BS."""
    for b in range(cfg.num_cells):
        stacked = CAff.stack([m[i] for i in cfg.user_sets[b]])
        prog.soc(Aff.stack([
            Aff.constant(np.sqrt(cfg.power_budget[b])),
            complex_soc_embed(stacked),
        ]))


def feasibility_nonrobust(t, channels, cfg, backend="clarabel"):
    """Balancing feasibility at target t under perfect CSI.

    Per user k the SOC constraint bounds the norm of every received beam
    gain plus noise by sqrt(1 + alpha_k/t) times the real part of the
    desired gain (forced real via an equality on its imaginary part); per
    BS a power SOC caps ||vec(M_b)||.

    Returns (SolveResult, BeamformerSet or None).
    """
    if t <= 0:
        raise ValueError("target t must be positive")
    channels.check_against(cfg)
    prog = ConicProgram()
    m = _beam_vars(prog, cfg)
    sigma = np.sqrt(cfg.noise_var)
    for k in range(cfg.num_users):
        bk = cfg.serving_bs[k]
        desired = _gain(m[k], channels.h(bk, k))
        gains = all_gains_at_user(m, channels, cfg, k)
        ck = c_factor(cfg.weights[k], t)
        prog.soc(Aff.stack([
            desired.re * ck,
            complex_soc_embed(gains),
            Aff.constant(sigma),
        ]))
        prog.zero(desired.im)
    add_power_budgets(prog, m, cfg)
    res = prog.solve(backend=backend)
    beams = None
    if res.status == "optimal":
        beams = BeamformerSet(np.stack([res.value(mk) for mk in m]))
    return res, beams


def make_nonrobust_oracle(channels, cfg, backend="clarabel"):
    def oracle(t):
        return feasibility_nonrobust(t, channels, cfg, backend=backend)
    return oracle


def _classify(bres):
    if bres.feasible:
        return "ok"
    return "failed" if bres.unknown_probes > 0 else "infeasible"


def run_bisection(method, oracle, bis_cfg, t_hi):
    """Shared wrapper: time the full bisection and package the result."""
    t0 = time.perf_counter()
    bres = bisect(oracle, bis_cfg, t_hi=t_hi)
    wall = time.perf_counter() - t0
    return MethodResult(
        method=method,
        t_star=bres.t_star,
        beams=bres.witness,
        iterations=bres.iterations,
        status=_classify(bres),
        wall_time=wall,
        bisection=bres,
    )


def solve_nonrobust(channels, cfg, bis_cfg=None, backend="clarabel"):
    """Full perfect-CSI balancing solve. AUTO upper bound is the
    single-user bound."""
    bis_cfg = bis_cfg or BisectionConfig()
    t_hi = bis_cfg.t_hi
    if t_hi == "auto":
        t_hi = single_user_upper_bound(channels, cfg)
    oracle = make_nonrobust_oracle(channels, cfg, backend=backend)
    return run_bisection("nonrobust", oracle, bis_cfg, t_hi)
