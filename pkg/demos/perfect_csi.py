"""Perfect-CSI balancing on one random instance.

The solver equalizes weighted SINRs: at the optimum every user sits at the
same level t* and at least one base station exhausts its budget. The
bisection trace shows the feasibility probes closing in.
"""

import numpy as np

from sinrbal import (
    ChannelSet,
    NetworkConfig,
    db2lin,
    lin2db,
    per_bs_power,
    solve_nonrobust,
)
from sinrbal.model import sinr

cfg = NetworkConfig.uniform(2, 2, 8, db2lin(5.0))
rng = np.random.default_rng(7)
h = (rng.standard_normal((2, 4, 8)) + 1j * rng.standard_normal((2, 4, 8)))
channels = ChannelSet(h / np.sqrt(2.0))

out = solve_nonrobust(channels, cfg)
print(f"t* = {out.t_star:.4f} ({lin2db(out.t_star):.2f} dB), "
      f"{out.iterations} probes, {out.wall_time * 1e3:.0f} ms")

for k in range(cfg.num_users):
    s = sinr(k, channels, out.beams, cfg)
    print(f"  user {k} (BS {cfg.serving_bs[k]}): SINR {s:.4f}")

used = per_bs_power(out.beams, cfg)
for b in range(cfg.num_cells):
    print(f"  BS {b}: power {used[b]:.3f} / {cfg.power_budget[b]:.3f}")

print("\nbisection trace:")
for t, status in out.bisection.history:
    print(f"  {t:8.4f}  {status}")
