"""Command-line front end.

Four commands sharing one config format: `solve` runs a single method on
one generated channel realization and prints the result row, `pe` does the
same plus the Monte-Carlo exceedance estimate, `sweep` executes a full
parameter sweep, `bench` times methods across antenna counts. Exit codes:
0 success, 1 validation/configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import sys

from .balancing import solve_nonrobust
from .baselines import ZfInfeasibleError, zf_balance
from .config import ConfigError, load_config
from .experiments import (
    _base_row,
    _fill_result,
    _trial_rng,
    benchmark_runtime,
    estimate_pe,
    generate_channels,
    run_sweep,
    write_csv,
)
from .robust_sdp import solve_sdp
from .robust_socp import solve_socp
from .uncertainty import UnsupportedNormError, UnsupportedUncertaintyError

__all__ = ["main", "build_parser"]


def build_parser():
    p = argparse.ArgumentParser(
        prog="sinrbal",
        description="Robust multicell downlink SINR balancing experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "run one method on one channel realization, row to stdout",
        "pe": "solve, then Monte-Carlo exceedance probability",
        "sweep": "run a parameter sweep and write a CSV table",
        "bench": "time methods across antenna counts",
    }
    for name, h in helps.items():
        sp = sub.add_parser(name, help=h)
        sp.add_argument("--config", required=True, metavar="PATH",
                        help="JSON run configuration")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--out", default=None, metavar="PATH",
                        help="override the output path (default stdout)")
        sp.add_argument("--pe-samples", type=int, default=None,
                        dest="pe_samples", help="override the PE sample count")
    return p


def _solve_one(rc):
    """One method on one realization; returns (result, row, channels)."""
    cfg = rc.network
    channels = generate_channels(
        rc.layout, cfg, _trial_rng(rc.seed, (0, 0, cfg.antennas_per_bs)))
    u = rc.unc
    if rc.method == "zf":
        out = zf_balance(channels, cfg)
        rp = 0.0
    elif rc.method == "nonrobust":
        out = solve_nonrobust(channels, cfg, rc.bisection)
        rp = 0.0
    else:
        uset = rc.uncertainty_for()
        nr = solve_nonrobust(channels, cfg, rc.bisection)
        cap = nr.t_star if nr.t_star > 0 else None
        if rc.method == "sdp":
            out = solve_sdp(channels, cfg, uset, rc.bisection, t_hi=cap)
            rp = float(u.rho)
        else:
            out = solve_socp(channels, cfg, uset, rc.bisection, t_hi=cap)
            rp = float(uset.rho_prime.max())
    row = _base_row(cfg, u.norm, float(u.rho), rp, 0, rc.seed)
    row["method"] = rc.method
    _fill_result(row, out)
    return out, row, channels


def _emit(rows, out_path):
    if out_path:
        write_csv(rows, out_path)
    else:
        write_csv(rows, sys.stdout)


def cmd_solve(rc):
    out, row, _ = _solve_one(rc)
    _emit([row], rc.out)
    if out.status == "failed":
        print("error: conic backend failed during the solve", file=sys.stderr)
        return 2
    return 0


def cmd_pe(rc):
    out, row, channels = _solve_one(rc)
    if out.status == "failed":
        _emit([row], rc.out)
        print("error: conic backend failed during the solve", file=sys.stderr)
        return 2
    if out.beams is not None and rc.pe_samples > 0:
        uset = rc.uncertainty_for()
        rng = _trial_rng(rc.seed, (1, 0, 0, 0))
        row["pe"] = estimate_pe(out.beams, out.t_star, uset, channels,
                                rc.network, rc.pe_samples, rng)
    _emit([row], rc.out)
    return 0


def cmd_sweep(rc):
    spec = rc.sweep_spec()
    rows = run_sweep(spec, rc.layout, rc.network, rc.bisection)
    _emit(rows, rc.out)
    return 0


def cmd_bench(rc):
    spec = rc.sweep_spec()
    if spec.param != "antennas":
        raise ConfigError("bench needs sweep.param == 'antennas'")
    rows = benchmark_runtime(spec.methods, spec.values, rc.network,
                             layout=rc.layout, trials=spec.trials,
                             norm_kind=spec.norm_kind, rho=spec.base_rho,
                             seed=rc.seed, bis_cfg=rc.bisection)
    _emit(rows, rc.out)
    return 0


_COMMANDS = {"solve": cmd_solve, "pe": cmd_pe, "sweep": cmd_sweep,
             "bench": cmd_bench}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = load_config(args.config)
        rc = rc.with_overrides(seed=args.seed, out=args.out,
                               pe_samples=args.pe_samples)
        return _COMMANDS[args.command](rc)
    except (ConfigError, UnsupportedNormError, UnsupportedUncertaintyError,
            ZfInfeasibleError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except RuntimeError as e:
        print(f"error: solver failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
