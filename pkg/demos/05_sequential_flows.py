"""
Flows that come and go
======================

In the sequential scenario flows join one at a time and leave in reverse
order, so the bottleneck is shared by 1, 2, ... 5 and back down to 1 flows.
The trace shows each flow's window making room for newcomers and
reclaiming the link when they leave.

Watch flow 0 while the others ramp up: with only a few segments in flight
it cannot collect three duplicate ACKs, so each loss costs it a
retransmission timeout. The simulator has no timing jitter, and the
ACK-clocked newcomers can keep the drop-tail queue full in lockstep for a
while, a known artefact of deterministic drop-tail simulation.
"""

from agilesd.experiments import ScenarioSpec, run_scenario

spec = ScenarioSpec(kind="sequential", n_flows=4, bandwidth=100_000_000, duration=16.0,
                    buffer=100, seed=3, trace_interval=0.1)
for i, (start, stop) in enumerate(spec.lifetimes()):
    print(f"flow {i}: active {start:4.1f} s to {stop:4.1f} s")

rep = run_scenario(spec)
for i, thr in enumerate(rep.per_flow_throughput):
    print(f"flow {i}: {thr / 1e6:6.2f} Mbps over its lifetime")

# %%
# Window of every flow at a few instants

for t in (1.0, 5.0, 8.0, 11.0, 15.0):
    row = []
    for i, (start, stop) in enumerate(spec.lifetimes()):
        if not start <= t < stop:
            row.append("      -")
            continue
        pts = [r.cwnd for r in rep.result.trace if r.flow_id == i and r.event == "ack" and r.time_s <= t]
        row.append(f"{pts[-1]:7.1f}" if pts else "      -")
    print(f"t={t:4.1f} s  " + " ".join(row))
