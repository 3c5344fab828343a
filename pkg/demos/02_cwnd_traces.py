"""
Congestion window traces on a small buffer
==========================================

One flow on the dumbbell with a 5-packet drop-tail buffer, run once per
controller. Small buffers are where the controllers differ most: the link
drains every time the window is cut, and what matters is how fast the
window climbs back.

Runs in scaled mode (100 Mbps, 10 s). Writes ``cwnd_traces.png`` when
matplotlib is available.
"""

from agilesd import FlowSpec, build_dumbbell, run

BANDWIDTH = 100_000_000
DURATION = 10.0

topo = build_dumbbell(1, buffer=5, bandwidth=BANDWIDTH)
print(f"base RTT {topo.base_rtt() * 1e3:.0f} ms, BDP {topo.bdp_packets():.0f} packets")

traces = {}
for cca in ("agile-sd", "cubic", "newreno"):
    res = run(topo, [FlowSpec(cca)], DURATION, seed=1, trace_interval=0.005)
    f = res.flows[0]
    util = f.goodput_packets * topo.payload_bytes * 8 / (DURATION * BANDWIDTH)
    print(f"{cca:9s} utilization={util:.3f} fast_retransmits={f.fast_retransmits} timeouts={f.timeouts}")
    traces[cca] = [(r.time_s, r.cwnd) for r in res.trace if r.event == "ack"]

# %%
# Plot
# ----

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    fig, ax = plt.subplots(figsize=(8, 4))
    for cca, pts in traces.items():
        ax.plot([t for t, _ in pts], [w for _, w in pts], label=cca, lw=0.8)
    ax.axhline(topo.bdp_packets(), color="grey", ls=":", label="BDP")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("cwnd (segments)")
    ax.legend()
    fig.tight_layout()
    fig.savefig("cwnd_traces.png", dpi=120)
    print("wrote cwnd_traces.png")
