"""Certified level versus uncertainty radius, SOCP against SDP.

Both robust designs trade nominal performance for a worst-case guarantee.
The SDP handles the serving-channel error exactly and certifies a higher
level; the SOCP protects every link norm separately and lands lower, but
solves much faster. Exceedance is estimated against the true ball.
"""

import numpy as np

from sinrbal import (
    ChannelSet,
    NetworkConfig,
    UncertaintySet,
    db2lin,
    estimate_pe,
    solve_nonrobust,
    solve_sdp,
    solve_socp,
)

cfg = NetworkConfig.uniform(2, 2, 8, db2lin(5.0))
rng = np.random.default_rng(3)
h = (rng.standard_normal((2, 4, 8)) + 1j * rng.standard_normal((2, 4, 8)))
channels = ChannelSet(h / np.sqrt(2.0))
n_pe = 2000

nr = solve_nonrobust(channels, cfg)
print(f"perfect CSI: t* = {nr.t_star:.4f}\n")
print(f"{'rho':>5} {'t*_sdp':>8} {'t*_socp':>8} {'PE_sdp':>7} {'PE_socp':>8} "
      f"{'ms_sdp':>7} {'ms_socp':>8}")

for rho in (0.05, 0.1, 0.2, 0.4, 0.7, 1.0):
    uset = UncertaintySet.for_network(cfg, "l2", rho)
    sdp = solve_sdp(channels, cfg, uset, t_hi=nr.t_star)
    socp = solve_socp(channels, cfg, uset, t_hi=nr.t_star)
    pe = [estimate_pe(o.beams, o.t_star, uset, channels, cfg, n_pe,
                      np.random.default_rng(1)) for o in (sdp, socp)]
    print(f"{rho:5.2f} {sdp.t_star:8.4f} {socp.t_star:8.4f} "
          f"{pe[0]:7.3f} {pe[1]:8.3f} "
          f"{sdp.wall_time * 1e3:7.0f} {socp.wall_time * 1e3:8.0f}")

print("\nboth certificates hold on every sampled error; the gap between "
      "them is the price of the SOCP's per-link decoupling")
