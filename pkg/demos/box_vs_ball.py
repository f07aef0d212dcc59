"""Uncertainty geometry matters at equal radius.

A sup-norm box of radius rho contains the L2 ball of radius rho, an L1
ball is contained in it, and capping the ball with a small box shrinks it.
Certified levels order accordingly: more uncertainty, lower certificate.
"""

import numpy as np

from sinrbal import (
    ChannelSet,
    NetworkConfig,
    UncertaintySet,
    db2lin,
    solve_nonrobust,
    solve_socp,
)

cfg = NetworkConfig.uniform(2, 2, 8, db2lin(5.0))
rng = np.random.default_rng(21)
h = (rng.standard_normal((2, 4, 8)) + 1j * rng.standard_normal((2, 4, 8)))
channels = ChannelSet(h / np.sqrt(2.0))
rho = 0.3

nr = solve_nonrobust(channels, cfg)
sets = [
    ("l1 ball", UncertaintySet.for_network(cfg, "l1", rho)),
    ("l2 ball", UncertaintySet.for_network(cfg, "l2", rho)),
    ("l2 ball + box cap", UncertaintySet.for_network(
        cfg, "l2_cap_linf", rho, box_radius=rho / 4.0)),
    ("linf box", UncertaintySet.for_network(cfg, "linf", rho)),
]

print(f"perfect CSI: t* = {nr.t_star:.4f}, radius {rho}\n")
for name, uset in sets:
    out = solve_socp(channels, cfg, uset, t_hi=nr.t_star)
    print(f"  {name:18s} t* = {out.t_star:.4f}")

print("\nexpected: capped ball >= l2 ball >= linf box, and l1 >= l2 "
      "(the l1 ball is the smallest of the three)")
