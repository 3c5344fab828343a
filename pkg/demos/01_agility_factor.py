"""
The agility factor and the shrinking epoch
==========================================

After a loss Agile-SD grows its window by ``lambda / cwnd`` per ACK instead
of ``1 / cwnd``. Lambda starts at ``lambda_max`` and decays to 1 as the
window climbs back toward the point where the loss happened.
"""

from agilesd import AgileParams, AgileSD, agility_factor, epoch_time, gap_current, gap_total

params = AgileParams()  # lambda_max = 3, beta1 = 0.90, beta2 = 0.95

# A window of 1000 segments meets a loss in congestion avoidance.
ctl = AgileSD(params)
ctl.cwnd, ctl.ssthresh = 1000.0, 500.0
ctl.on_triple_dup_ack()
ctl.exit_recovery()
print(f"after the loss: cwnd={ctl.cwnd:.1f} ssthresh={ctl.ssthresh:.1f}")
print(f"cwnd_loss={ctl.cwnd_loss:.1f} cwnd_degraded={ctl.cwnd_degraded:.1f}")

# %%
# Lambda as the window climbs back
# --------------------------------
# The gap left to recover shrinks with every ACK, and so does lambda.

for cwnd in (950, 960, 970, 980, 990, 999, 1005):
    gc = gap_current(ctl.cwnd_loss, cwnd)
    gt = gap_total(ctl.cwnd_loss, ctl.cwnd_degraded)
    print(f"cwnd={cwnd:5d}  gap_current={gc:5.1f}  lambda={agility_factor(params, gc, gt):.3f}")

# %%
# Counting ACKs to close the gap
# ------------------------------
# One window's worth of ACKs is one RTT, so the count below is the epoch
# length in RTTs. Standard TCP needs one RTT per segment of gap.

acks = 0
while ctl.cwnd < ctl.cwnd_loss:
    ctl.on_ack()
    acks += 1
rtts = acks / ctl.cwnd
print(f"Agile-SD climbed back in {acks} ACKs, about {rtts:.1f} RTTs (NewReno: 50 RTTs)")

# %%
# The four-cycle worked example
# -----------------------------
# With a 20 ms RTT and lambdas 4, 3, 2, 1 the epoch lasts 41.67 ms
# instead of 80 ms.

fast = epoch_time(0.020, [4, 3, 2, 1])
slow = epoch_time(0.020, [1, 1, 1, 1])
print(f"epoch {fast * 1e3:.2f} ms vs {slow * 1e3:.0f} ms, shrunk by {1 - fast / slow:.1%}")
