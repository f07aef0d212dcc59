"""Experiment drivers: channel generation, outage-style PE estimation,
parameter sweeps, and runtime benchmarks.

Everything here is a pure function of (configs, master seed). Channel
realizations for trial i are drawn from a dedicated SeedSequence substream
keyed by (0, trial, antennas) so that every method inside a sweep sees the
same channels, sweeps over power or radius reuse the same fading, and
antenna sweeps stay reproducible; PE sampling uses disjoint substreams
keyed by (1, trial, value index, method slot).

Results are plain dicts in a fixed CSV schema, one row per (value, trial,
method). Wall-clock runtimes are recorded as data but are of course not
part of the deterministic surface.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .balancing import BisectionConfig, solve_nonrobust
from .baselines import ZfInfeasibleError, zf_balance
from .model import ChannelSet, lin2db
from .robust_sdp import solve_sdp
from .robust_socp import solve_socp
from .uncertainty import (
    UncertaintySet,
    UnsupportedUncertaintyError,
    apply_error,
    sample_uniform,
)

__all__ = [
    "LayoutConfig",
    "SweepSpec",
    "generate_channels",
    "estimate_pe",
    "run_sweep",
    "benchmark_runtime",
    "write_csv",
    "mean_by",
    "CSV_COLUMNS",
    "METHOD_NAMES",
]

METHOD_NAMES = ("nonrobust", "sdp", "socp", "zf")

CSV_COLUMNS = ("method", "norm", "rho", "rho_prime", "power_db", "B", "K",
               "T", "trial", "t_star", "t_star_db", "pe", "runtime_ms",
               "iterations", "status", "seed")

_INT_COLUMNS = frozenset({"B", "K", "T", "trial", "iterations", "seed"})


@dataclass(frozen=True)
class LayoutConfig:
    """Cell geometry and large-scale fading parameters.

    Distances in meters. Path gain at distance d is
    beta * (d / min_distance)^(-pathloss_exponent) with log-normal beta
    (shadow_std in dB). With use_large_scale off the channels are plain
    unit-variance complex Gaussians and the geometry is unused.
    """

    cell_diameter: float = 1000.0
    min_distance: float = 100.0
    pathloss_exponent: float = 3.8
    shadow_std: float = 8.0
    use_large_scale: bool = False

    def __post_init__(self):
        if self.cell_diameter <= 0 or self.min_distance <= 0:
            raise ValueError("distances must be positive")
        if self.min_distance >= self.cell_diameter / 2:
            raise ValueError("min_distance must be below the cell radius")
        if self.pathloss_exponent <= 2:
            raise ValueError("pathloss exponent must exceed 2")
        if self.shadow_std < 0:
            raise ValueError("shadow_std must be nonnegative")


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter, a value list, and the methods to run on each
    (value, trial) cell. socp_divisors adds one socp run per entry with
    design radius rho / divisor, so the conservatism trade-off shows up as
    separate rows distinguished by the rho_prime column."""

    param: str
    values: tuple
    methods: tuple
    trials: int = 200
    pe_samples: int = 10_000
    seed: int = 0
    norm_kind: str = "l2"
    base_rho: float = 0.1
    socp_divisors: tuple = (1.0,)

    def __post_init__(self):
        if self.param not in ("rho", "power_db", "antennas"):
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "socp_divisors", tuple(self.socp_divisors))
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if not self.methods:
            raise ValueError("sweep needs at least one method")
        for m in self.methods:
            if m not in METHOD_NAMES:
                raise ValueError(f"unknown method {m!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.pe_samples < 0:
            raise ValueError("pe_samples must be >= 0")
        if any(d <= 0 for d in self.socp_divisors):
            raise ValueError("socp divisors must be positive")
        if self.param == "antennas" and any(int(v) != v or v < 1 for v in self.values):
            raise ValueError("antenna counts must be positive integers")


def generate_channels(layout, cfg, rng):
    """Draw one channel realization h = sqrt(kappa) htilde.

    htilde has unit-variance complex Gaussian entries. With large-scale
    fading enabled, each user lands uniformly in its serving cell's
    flat-top hexagon (circumradius cell_diameter/2, BSs on the x axis one
    diameter apart), redrawn while closer than min_distance to its own BS;
    kappa combines log-normal shadowing with the distance power law.
    """
    B, K, T = cfg.num_cells, cfg.num_users, cfg.antennas_per_bs
    htilde = (rng.standard_normal((B, K, T))
              + 1j * rng.standard_normal((B, K, T))) / np.sqrt(2)
    if layout is None or not layout.use_large_scale:
        return ChannelSet(htilde)
    R = layout.cell_diameter / 2.0
    root3 = np.sqrt(3.0)
    centers = np.arange(B) * layout.cell_diameter
    pos = np.empty((K, 2))
    for k in range(K):
        while True:
            x = rng.uniform(-R, R)
            y = rng.uniform(-root3 * R / 2, root3 * R / 2)
            if root3 * abs(x) + abs(y) > root3 * R:
                continue
            if np.hypot(x, y) < layout.min_distance:
                continue
            break
        pos[k] = (x + centers[cfg.serving_bs[k]], y)
    d = np.hypot(pos[None, :, 0] - centers[:, None], pos[None, :, 1])
    shadow = 10.0 ** (layout.shadow_std * rng.standard_normal((B, K)) / 10.0)
    kappa = shadow * (d / layout.min_distance) ** (-layout.pathloss_exponent)
    return ChannelSet(htilde * np.sqrt(kappa)[..., None], large_scale=kappa)


def estimate_pe(beams, t_star, uset, channels, cfg, n_samples, rng):
    """Monte-Carlo probability that the balanced objective under sampled
    channel errors (drawn at the TRUE radius rho) meets the solver's
    returned objective, with 1e-6 relative slack for solver tolerance."""
    if beams is None:
        raise ValueError("estimate_pe needs beamformers from a completed solve")
    beams.check_against(cfg)
    channels.check_against(cfg)
    n = int(n_samples)
    if n < 1:
        raise ValueError("n_samples must be >= 1")
    B, K = cfg.num_cells, cfg.num_users
    sig = np.empty((K, n))
    interf = np.zeros((K, n))
    for b in range(B):
        Mb = beams.bs_matrix(b, cfg)
        users = cfg.user_sets[b]
        for k in range(K):
            v = sample_uniform(uset, b, k, rng, n=n)
            hp = apply_error(channels.h(b, k), uset.A(b, k), v)
            p = np.abs(hp @ Mb) ** 2
            if cfg.serving_bs[k] == b:
                pos = users.index(k)
                sig[k] = p[:, pos]
                interf[k] += p.sum(axis=1) - p[:, pos]
            else:
                interf[k] += p.sum(axis=1)
    sinr = sig / (cfg.noise_var + interf)
    obj = (np.asarray(cfg.weights)[:, None] * sinr).min(axis=0)
    return float(np.mean(obj >= t_star * (1 - 1e-6)))


def _cfg_with(cfg, param, value):
    if param == "rho":
        return cfg
    if param == "power_db":
        lin = 10.0 ** (float(value) / 10.0)
        return replace(cfg, power_budget=tuple(lin for _ in range(cfg.num_cells)))
    if param == "antennas":
        return replace(cfg, antennas_per_bs=int(value))
    raise ValueError(f"unknown sweep parameter {param!r}")


def _trial_rng(seed, spawn_key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=spawn_key))


def _method_slots(spec):
    slots = []
    for m in spec.methods:
        if m == "socp":
            for div in spec.socp_divisors:
                slots.append(("socp", float(div)))
        else:
            slots.append((m, None))
    return slots


def _power_db(cfg):
    return lin2db(cfg.power_budget[0])


def _db_or(t):
    if not np.isfinite(t) or t <= 0:
        return float("-inf") if t == 0 else float("nan")
    return lin2db(t)


def _base_row(cfg, norm, rho, rho_prime, trial, seed):
    return {
        "method": "", "norm": norm, "rho": float(rho),
        "rho_prime": float(rho_prime), "power_db": _power_db(cfg),
        "B": cfg.num_cells, "K": cfg.num_users, "T": cfg.antennas_per_bs,
        "trial": trial, "t_star": float("nan"), "t_star_db": float("nan"),
        "pe": float("nan"), "runtime_ms": float("nan"), "iterations": 0,
        "status": "", "seed": seed,
    }


def _fill_result(row, out):
    row["t_star"] = out.t_star
    row["t_star_db"] = _db_or(out.t_star)
    row["runtime_ms"] = out.wall_time * 1e3
    row["iterations"] = out.iterations
    row["status"] = out.status
    if out.extras.get("relaxation_loose"):
        row["status"] = "relaxation-loose"
    return row


def run_sweep(spec, layout, cfg, bis_cfg=None, backend="clarabel"):
    """Execute a sweep and return one result dict per (value, trial,
    method slot). Failures of individual solves become status rows.

    The non-robust optimum doubles as the bisection cap for the robust
    methods, so it is solved once per (trial, effective network) and
    shared.
    """
    if "sdp" in spec.methods and spec.norm_kind != "l2":
        raise UnsupportedUncertaintyError(
            "the sdp method supports l2 (ellipsoidal) uncertainty only")
    bis_cfg = bis_cfg or BisectionConfig()
    rows = []
    chan_cache = {}
    nr_cache = {}
    slots = _method_slots(spec)
    for vi, value in enumerate(spec.values):
        cfg_v = _cfg_with(cfg, spec.param, value)
        rho = float(value) if spec.param == "rho" else float(spec.base_rho)
        uset_pe = UncertaintySet.for_network(cfg_v, spec.norm_kind, rho)
        socp_usets = {
            div: UncertaintySet.for_network(cfg_v, spec.norm_kind, rho,
                                            divisor=div)
            for div in spec.socp_divisors if "socp" in spec.methods
        }
        for trial in range(spec.trials):
            ck = (trial, cfg_v.antennas_per_bs)
            if ck not in chan_cache:
                chan_cache[ck] = generate_channels(
                    layout, cfg_v, _trial_rng(spec.seed, (0, trial, ck[1])))
            channels = chan_cache[ck]
            nk = (trial, cfg_v.antennas_per_bs, cfg_v.power_budget)
            nr = nr_cache.get(nk)
            if nr is None:
                nr = solve_nonrobust(channels, cfg_v, bis_cfg, backend=backend)
                nr_cache[nk] = nr
            t_cap = nr.t_star if nr.t_star > 0 else None
            for mi, (meth, div) in enumerate(slots):
                rp = {"nonrobust": 0.0, "zf": 0.0, "sdp": rho}.get(
                    meth, rho / div if div else rho)
                row = _base_row(cfg_v, spec.norm_kind, rho, rp, trial, spec.seed)
                row["method"] = meth
                try:
                    if meth == "nonrobust":
                        out = nr
                    elif meth == "sdp":
                        out = solve_sdp(channels, cfg_v, uset_pe,
                                        bis_cfg, backend=backend, t_hi=t_cap)
                    elif meth == "socp":
                        out = solve_socp(channels, cfg_v, socp_usets[div],
                                         bis_cfg, backend=backend, t_hi=t_cap)
                    else:
                        out = zf_balance(channels, cfg_v, backend=backend)
                except ZfInfeasibleError:
                    row["status"] = "infeasible"
                    rows.append(row)
                    continue
                except Exception:
                    row["status"] = "failed"
                    rows.append(row)
                    continue
                _fill_result(row, out)
                if out.beams is not None and spec.pe_samples > 0:
                    pe_rng = _trial_rng(spec.seed, (1, trial, vi, mi))
                    row["pe"] = estimate_pe(out.beams, out.t_star, uset_pe,
                                            channels, cfg_v,
                                            spec.pe_samples, pe_rng)
                rows.append(row)
    return rows


def benchmark_runtime(methods, antennas, cfg, layout=None, trials=5,
                      norm_kind="l2", rho=0.1, seed=0, bis_cfg=None,
                      backend="clarabel"):
    """Mean full-bisection wall time per (method, antenna count).

    One untimed warm-up solve per network size covers JIT/caching effects.
    Returns one aggregate row per (method, T) with trial set to the number
    of timed trials; a method that fails on any trial is reported with
    status "failed" and no runtime, mirroring the did-not-finish markers
    of runtime tables.
    """
    for m in methods:
        if m not in METHOD_NAMES:
            raise ValueError(f"unknown method {m!r}")
    if "sdp" in methods and norm_kind != "l2":
        raise UnsupportedUncertaintyError(
            "the sdp method supports l2 (ellipsoidal) uncertainty only")
    bis_cfg = bis_cfg or BisectionConfig()
    rows = []
    for T in antennas:
        cfg_T = replace(cfg, antennas_per_bs=int(T))
        uset = UncertaintySet.for_network(cfg_T, norm_kind, rho)
        chans = [generate_channels(layout, cfg_T,
                                   _trial_rng(seed, (0, trial, int(T))))
                 for trial in range(trials + 1)]
        nr = [solve_nonrobust(c, cfg_T, bis_cfg, backend=backend)
              for c in chans]
        caps = [r.t_star if r.t_star > 0 else None for r in nr]

        def once(meth, i):
            if meth == "nonrobust":
                return nr[i]
            if meth == "sdp":
                return solve_sdp(chans[i], cfg_T, uset, bis_cfg,
                                 backend=backend, t_hi=caps[i])
            if meth == "socp":
                return solve_socp(chans[i], cfg_T, uset, bis_cfg,
                                  backend=backend, t_hi=caps[i])
            return zf_balance(chans[i], cfg_T, backend=backend)

        for meth in methods:
            rp = {"nonrobust": 0.0, "zf": 0.0}.get(meth, rho)
            row = _base_row(cfg_T, norm_kind, rho, rp, trials, seed)
            row["method"] = meth
            try:
                once(meth, 0)  # warm-up, discarded
                outs = [once(meth, i) for i in range(1, trials + 1)]
            except Exception:
                row["status"] = "failed"
                rows.append(row)
                continue
            if any(o.status not in ("ok",) for o in outs):
                row["status"] = "failed"
                rows.append(row)
                continue
            row["t_star"] = float(np.mean([o.t_star for o in outs]))
            row["t_star_db"] = _db_or(row["t_star"])
            row["runtime_ms"] = float(np.mean([o.wall_time for o in outs])) * 1e3
            row["iterations"] = int(round(np.mean([o.iterations for o in outs])))
            row["status"] = "ok"
            rows.append(row)
    return rows


def _fmt(col, v):
    if col in ("method", "norm", "status"):
        return str(v)
    if col in _INT_COLUMNS:
        return str(int(v))
    return "%.9g" % float(v)


def write_csv(rows, dest):
    """Write result rows to a path or text stream, fixed column order,
    floats at 9 significant digits."""
    def _write(f):
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_fmt(c, r[c]) for c in CSV_COLUMNS])
    if hasattr(dest, "write"):
        _write(dest)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as f:
            _write(f)


def mean_by(rows, value_field, keys=("method", "rho", "rho_prime")):
    """Group rows by the given key columns and average a numeric field,
    skipping NaNs. Returns {key tuple: mean}."""
    acc = {}
    for r in rows:
        v = float(r[value_field])
        if np.isnan(v):
            continue
        k = tuple(r[c] for c in keys)
        acc.setdefault(k, []).append(v)
    return {k: float(np.mean(v)) for k, v in acc.items()}
