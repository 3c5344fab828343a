"""
Fairness between flows
======================

Three fairness questions, each answered with Jain's index:

* intra-protocol: five Agile-SD flows sharing the bottleneck,
* inter-protocol: one Agile-SD flow against one NewReno flow,
* RTT fairness: five Agile-SD flows whose access delays span 1 to 16 ms.

An index of 1 means equal shares; ``1/n`` means one flow took everything.
"""

from agilesd.experiments import ScenarioSpec, jain_fairness, run_scenario

small = dict(bandwidth=100_000_000, duration=10.0, buffer=100, seed=1, trace_interval=None)

for title, spec in [
    ("intra", ScenarioSpec(kind="synchronous", n_flows=5, **small)),
    ("inter", ScenarioSpec(kind="inter-fairness", ccas="agile-sd+newreno", **small)),
    ("rtt", ScenarioSpec(kind="rtt-fairness", **small)),
]:
    rep = run_scenario(spec)
    shares = ", ".join(f"{x / 1e6:.1f}" for x in rep.per_flow_throughput)
    print(f"{title:5s} JFI={rep.jfi:.3f}  per-flow Mbps: {shares}")

# %%
# The index itself

print(jain_fairness([10, 10, 10]), jain_fairness([1, 0]), round(jain_fairness([4, 2, 2]), 4))
