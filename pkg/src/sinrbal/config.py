"""JSON run configuration.

One flat schema with nested sections mirroring the library types; every
key is checked against the schema and unknown keys are rejected by name,
so typos fail loudly instead of silently running defaults. dB-to-linear
power conversion happens here and nowhere else in the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .balancing import BisectionConfig
from .experiments import METHOD_NAMES, LayoutConfig, SweepSpec
from .model import NetworkConfig, db2lin
from .uncertainty import NORM_KINDS, UncertaintySet

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    pass


def _section(data, name, allowed, required=()):
    raw = data.get(name, {})
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown config key {name}.{key}")
    for key in required:
        if key not in raw:
            raise ConfigError(f"missing config key {name}.{key}")
    return raw


@dataclass(frozen=True)
class _UncParams:
    norm: str = "l2"
    rho: float = 0.1
    rho_prime: object = None
    divisor: object = None
    box_radius: object = None


@dataclass(frozen=True)
class RunConfig:
    network: NetworkConfig
    layout: LayoutConfig
    unc: _UncParams
    method: str
    bisection: BisectionConfig
    sweep: object          # raw dict, or None when the config has no sweep
    out: object
    seed: int
    pe_samples: int

    def uncertainty_for(self, cfg=None):
        u = self.unc
        return UncertaintySet.for_network(
            cfg if cfg is not None else self.network, u.norm, u.rho,
            rho_prime=u.rho_prime, divisor=u.divisor, box_radius=u.box_radius)

    def sweep_spec(self):
        if self.sweep is None:
            raise ConfigError("missing config section 'sweep'")
        s = dict(self.sweep)
        return SweepSpec(
            param=s["param"],
            values=tuple(s["values"]),
            methods=tuple(s.get("methods", (self.method,))),
            trials=int(s.get("trials", 200)),
            pe_samples=int(s.get("pe_samples", self.pe_samples)),
            seed=self.seed,
            norm_kind=self.unc.norm,
            base_rho=float(self.unc.rho),
            socp_divisors=tuple(s.get("socp_divisors", (1.0,))),
        )

    def with_overrides(self, seed=None, out=None, pe_samples=None):
        rc = self
        if seed is not None:
            rc = replace(rc, seed=int(seed))
        if out is not None:
            rc = replace(rc, out=out)
        if pe_samples is not None:
            rc = replace(rc, pe_samples=int(pe_samples))
        return rc


_TOP_KEYS = ("network", "layout", "uncertainty", "bisection", "sweep",
             "method", "out", "seed", "pe_samples")


def load_config(path):
    """Parse and validate a JSON run configuration."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path!r} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    net = _section(data, "network",
                   allowed=("num_cells", "users_per_cell", "antennas_per_bs",
                            "power_db", "noise_var", "weight", "weights"),
                   required=("num_cells", "users_per_cell", "antennas_per_bs"))
    try:
        cfg = NetworkConfig.uniform(
            int(net["num_cells"]), int(net["users_per_cell"]),
            int(net["antennas_per_bs"]),
            float(db2lin(net.get("power_db", 5.0))),
            noise_var=float(net.get("noise_var", 1.0)),
            weight=float(net.get("weight", 1.0)))
        if "weights" in net:
            cfg = replace(cfg, weights=tuple(float(w) for w in net["weights"]))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid network section: {e}") from e

    lay = _section(data, "layout",
                   allowed=("cell_diameter", "min_distance",
                            "pathloss_exponent", "shadow_std",
                            "use_large_scale"))
    try:
        layout = LayoutConfig(**lay)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid layout section: {e}") from e

    unc = _section(data, "uncertainty",
                   allowed=("norm", "rho", "rho_prime", "divisor",
                            "box_radius"))
    norm = unc.get("norm", "l2")
    if norm not in NORM_KINDS:
        raise ConfigError(f"uncertainty.norm must be one of {NORM_KINDS}")
    uparams = _UncParams(norm=norm, rho=float(unc.get("rho", 0.1)),
                         rho_prime=unc.get("rho_prime"),
                         divisor=unc.get("divisor"),
                         box_radius=unc.get("box_radius"))

    bis = _section(data, "bisection",
                   allowed=("t_lo", "t_hi", "eps", "max_iters"))
    try:
        bisection = BisectionConfig(**bis)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid bisection section: {e}") from e

    sweep = None
    if "sweep" in data and data["sweep"] is not None:
        sweep = _section(data, "sweep",
                         allowed=("param", "values", "methods", "trials",
                                  "pe_samples", "socp_divisors"),
                         required=("param", "values"))

    method = data.get("method", "nonrobust")
    if method not in METHOD_NAMES:
        raise ConfigError(f"method must be one of {METHOD_NAMES}")

    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    pe_samples = data.get("pe_samples", 10_000)
    if not isinstance(pe_samples, int) or pe_samples < 0:
        raise ConfigError("pe_samples must be a nonnegative integer")

    return RunConfig(network=cfg, layout=layout, unc=uparams, method=method,
                     bisection=bisection, sweep=sweep,
                     out=data.get("out"), seed=seed, pe_samples=pe_samples)
