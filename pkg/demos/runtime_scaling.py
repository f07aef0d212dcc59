"""Wall time of the two robust designs across array sizes.

Each LMI in the SDP couples a full T x T covariance per user, so its cost
climbs steeply with T; the SOCP's cones stay small. Run times are
hardware-bound, the point is the ratio.
"""

from sinrbal import NetworkConfig, benchmark_runtime, db2lin

cfg = NetworkConfig.uniform(2, 2, 8, db2lin(5.0))
rows = benchmark_runtime(["socp", "sdp"], [4, 8, 12], cfg,
                         trials=3, rho=0.4)

ms = {(r["method"], r["T"]): r for r in rows}
print(f"{'T':>4} {'socp ms':>9} {'sdp ms':>9} {'ratio':>7}")
for T in (4, 8, 12):
    s, d = ms[("socp", T)], ms[("sdp", T)]
    print(f"{T:4d} {s['runtime_ms']:9.0f} {d['runtime_ms']:9.0f} "
          f"{d['runtime_ms'] / s['runtime_ms']:7.1f}")
print("\nfull-bisection means over 3 seeded trials, one warm-up discarded")
