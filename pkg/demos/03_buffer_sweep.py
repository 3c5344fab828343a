"""
Utilization against buffer size
===============================

The single-flow sweep behind the throughput-vs-buffer comparison: every
controller over a range of buffer sizes and packet error rates. Each row
gets its own seed derived from the master seed, so the table does not
depend on the order of the sweep.

Scaled mode keeps this to a few minutes. For the full 1 Gbps / 100 s
version use ``agilesd sweep``.
"""

from agilesd.experiments import ScenarioSpec, sweep

base = ScenarioSpec(bandwidth=100_000_000, duration=10.0, seed=1, trace_interval=None)
reports = sweep(base, buffers=[5, 25, 100, 250], pers=[0.0, 1e-4], ccas=["agile-sd", "cubic", "newreno"])

print(f"{'cca':9s} {'buffer':>6s} {'per':>7s} {'util':>6s} {'loss':>9s}")
for rep in reports:
    s = rep.spec
    print(f"{s.ccas[0]:9s} {s.buffer:6d} {s.per:7.0e} {rep.utilization:6.3f} {rep.loss_ratio:9.2e}")

# %%
# Agile-SD's edge over NewReno at each small buffer

by_key = {(r.spec.ccas[0], r.spec.buffer, r.spec.per): r.utilization for r in reports}
for buf in (5, 25):
    gain = by_key[("agile-sd", buf, 0.0)] / by_key[("newreno", buf, 0.0)] - 1
    print(f"buffer {buf}: Agile-SD vs NewReno {gain:+.0%}")
