"""Evaluation scenarios, metrics and parameter sweeps on the dumbbell."""

from __future__ import annotations

import enum
import hashlib
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, TextIO

from .cca import CONTROLLERS, AgileParams
from .netsim import (
    DEFAULT_ACCESS_DELAY,
    DEFAULT_BANDWIDTH,
    DEFAULT_BOTTLENECK_DELAY,
    FlowSpec,
    RunResult,
    build_dumbbell,
    run,
)

DEFAULT_MULTI_FLOWS = 5
DEFAULT_RTT_DELAYS = (0.001, 0.002, 0.004, 0.008, 0.016)


class ScenarioKind(str, enum.Enum):
    SINGLE_FLOW = "single"
    SEQUENTIAL = "sequential"
    SYNCHRONOUS = "synchronous"
    INTER_FAIRNESS = "inter-fairness"
    RTT_FAIRNESS = "rtt-fairness"


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to reproduce one simulation run.

    ``ccas`` holds either one controller name (every flow uses it) or one
    name per flow. ``n_flows``, ``stagger`` and ``access_delays`` left as
    ``None`` take scenario-dependent defaults.
    """

    kind: ScenarioKind = ScenarioKind.SINGLE_FLOW
    ccas: tuple = ("agile-sd",)
    n_flows: Optional[int] = None
    buffer: int = 500
    per: float = 0.0
    duration: float = 100.0
    stagger: Optional[float] = None
    access_delays: Optional[tuple] = None
    seed: int = 0
    bandwidth: int = DEFAULT_BANDWIDTH
    bottleneck_delay: float = DEFAULT_BOTTLENECK_DELAY
    agile: AgileParams = field(default_factory=AgileParams)
    timeout_ssthresh_fraction: float = 0.5
    warmup: float = 0.0
    throughput_mode: str = "goodput"
    trace_interval: Optional[float] = 0.01

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        if isinstance(self.ccas, str):
            object.__setattr__(self, "ccas", tuple(self.ccas.split("+")))
        else:
            object.__setattr__(self, "ccas", tuple(self.ccas))
        for name in self.ccas:
            if name not in CONTROLLERS:
                raise ValueError(f"unknown congestion controller {name!r}")
        if self.access_delays is not None:
            object.__setattr__(self, "access_delays", tuple(float(d) for d in self.access_delays))
        if self.throughput_mode not in ("goodput", "raw"):
            raise ValueError("throughput_mode must be 'goodput' or 'raw'")
        n = self.flow_count
        if self.kind is ScenarioKind.SINGLE_FLOW and n != 1:
            raise ValueError("a single-flow scenario has exactly one flow")
        if self.kind is ScenarioKind.INTER_FAIRNESS and len(self.ccas) < 2:
            raise ValueError("inter-fairness needs one controller name per flow")
        if len(self.ccas) not in (1, n):
            raise ValueError(f"{len(self.ccas)} controller names for {n} flows")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not 0.0 <= self.warmup < self.duration:
            raise ValueError("warmup must lie in [0, duration)")

    @property
    def flow_count(self) -> int:
        if self.n_flows is not None:
            return self.n_flows
        if self.kind is ScenarioKind.SINGLE_FLOW:
            return 1
        if self.kind is ScenarioKind.INTER_FAIRNESS:
            return len(self.ccas)
        if self.kind is ScenarioKind.RTT_FAIRNESS and self.access_delays is not None:
            return len(self.access_delays)
        return DEFAULT_MULTI_FLOWS

    def flow_ccas(self) -> list:
        n = self.flow_count
        return list(self.ccas) * n if len(self.ccas) == 1 else list(self.ccas)

    def delays(self) -> tuple:
        n = self.flow_count
        if self.access_delays is not None:
            if len(self.access_delays) != n:
                raise ValueError(f"{len(self.access_delays)} access delays for {n} flows")
            return self.access_delays
        if self.kind is ScenarioKind.RTT_FAIRNESS:
            if n > len(DEFAULT_RTT_DELAYS):
                raise ValueError(f"give access_delays explicitly for more than {len(DEFAULT_RTT_DELAYS)} flows")
            return DEFAULT_RTT_DELAYS[:n]
        return (DEFAULT_ACCESS_DELAY,) * n

    def lifetimes(self) -> list:
        """``(start, stop)`` of every flow in seconds."""
        n, d = self.flow_count, self.duration
        if self.kind is ScenarioKind.SEQUENTIAL:
            s = self.stagger if self.stagger is not None else d / (2 * n)
            if (n - 1) * s * 2 >= d:
                raise ValueError(f"stagger {s} s leaves no lifetime for the innermost flow")
            return [(i * s, d - i * s) for i in range(n)]
        return [(0.0, d)] * n

    def schedule(self) -> list:
        return [
            FlowSpec(cca, start, stop, self.agile, self.timeout_ssthresh_fraction)
            for cca, (start, stop) in zip(self.flow_ccas(), self.lifetimes())
        ]

    def topology(self):
        return build_dumbbell(
            self.flow_count,
            self.buffer,
            self.per,
            self.delays(),
            bandwidth=self.bandwidth,
            bottleneck_delay=self.bottleneck_delay,
        )


@dataclass
class MetricsReport:
    spec: ScenarioSpec
    per_flow_throughput: list
    per_flow_loss_ratio: list
    aggregate_throughput: float
    utilization: float
    loss_ratio: float
    jfi: float
    result: Optional[RunResult] = field(default=None, repr=False, compare=False)

    def csv_rows(self) -> list:
        spec = self.spec
        rtt = spec.kind is ScenarioKind.RTT_FAIRNESS
        inter = spec.kind is ScenarioKind.INTER_FAIRNESS
        jfi = _num(self.jfi)
        rows = []
        for i, (cca, thr, lr) in enumerate(
            zip(spec.flow_ccas(), self.per_flow_throughput, self.per_flow_loss_ratio)
        ):
            rows.append([
                cca, spec.kind.value, str(spec.buffer), _num(spec.per), str(spec.seed), str(i),
                _num(thr), _num(lr),
                "" if (rtt or inter) else jfi,
                jfi if rtt else "",
                str(spec.flow_count), _num(spec.duration), _num(self.utilization),
                jfi if inter else "",
            ])
        return rows


CSV_HEADER = (
    "cca,scenario,buffer,per,seed,flow_id,throughput_bps,loss_ratio,jfi_intra,jfi_rtt,"
    "n_flows,duration,utilization,jfi_inter"
)


def _num(x: float) -> str:
    return format(x, ".10g")


# --------------------------------------------------------------------------
# Metrics


def jain_fairness(throughputs: Sequence[float]) -> float:
    """Jain's index ``(sum x)^2 / (n * sum x^2)``; 1 means perfectly equal shares."""
    xs = [float(x) for x in throughputs]
    if not xs:
        raise ValueError("fairness of an empty set of flows is undefined")
    if any(x < 0 for x in xs):
        raise ValueError("throughputs must be non-negative")
    sq = sum(x * x for x in xs)
    if sq == 0.0:
        raise ValueError("fairness is undefined when every flow has zero throughput")
    s = sum(xs)
    return s * s / (len(xs) * sq)


def average_throughput(delivered_bytes: float, active_time: float) -> float:
    """Bits per second over ``active_time`` seconds."""
    if active_time <= 0:
        raise ValueError("active_time must be positive")
    return delivered_bytes * 8.0 / active_time


def loss_ratio(dropped: int, sent: int) -> float:
    if sent <= 0:
        raise ValueError("loss ratio is undefined when nothing was sent")
    return dropped / sent


def metrics_from_run(spec: ScenarioSpec, result: RunResult) -> MetricsReport:
    topo = result.topology
    payload = topo.payload_bytes
    raw = spec.throughput_mode == "raw"
    thr, lrs = [], []
    total_bytes = 0.0
    for f in result.flows:
        if raw:
            pkts = f.raw_packets - f.raw_at_warmup
        else:
            pkts = f.goodput_packets - f.goodput_at_warmup
        total_bytes += pkts * payload
        thr.append(average_throughput(pkts * payload, f.stop - f.start - result.warmup))
        lrs.append(loss_ratio(f.dropped, f.sent) if f.sent else 0.0)
    span = max(f.stop for f in result.flows) - min(f.start for f in result.flows) - result.warmup
    aggregate = average_throughput(total_bytes, span)
    sent = sum(f.sent for f in result.flows)
    dropped = sum(f.dropped for f in result.flows)
    return MetricsReport(
        spec=spec,
        per_flow_throughput=thr,
        per_flow_loss_ratio=lrs,
        aggregate_throughput=aggregate,
        utilization=aggregate / topo.bandwidth,
        loss_ratio=loss_ratio(dropped, sent) if sent else 0.0,
        jfi=jain_fairness(thr) if any(thr) else 0.0,
        result=result,
    )


def run_scenario(spec: ScenarioSpec) -> MetricsReport:
    """Build the topology, run the simulator and reduce the run to metrics."""
    result = run(
        spec.topology(),
        spec.schedule(),
        spec.duration,
        seed=spec.seed,
        trace_interval=spec.trace_interval,
        warmup=spec.warmup,
    )
    return metrics_from_run(spec, result)


# --------------------------------------------------------------------------
# Sweeps


def derive_seed(master: int, *key) -> int:
    """Stable per-run seed from a master seed and the run's parameters."""
    text = "|".join([str(master)] + [repr(k) for k in key])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def sweep_specs(
    base: ScenarioSpec,
    buffers: Sequence[int],
    pers: Sequence[float],
    ccas: Sequence[str],
) -> list:
    if not buffers or not pers or not ccas:
        raise ValueError("buffers, pers and ccas must all be non-empty")
    specs = []
    for cca, buf, per in itertools.product(ccas, buffers, pers):
        specs.append(
            replace(
                base,
                ccas=tuple(cca.split("+")),
                buffer=int(buf),
                per=float(per),
                seed=derive_seed(base.seed, cca, int(buf), float(per)),
            )
        )
    return specs


def sweep(
    base: ScenarioSpec,
    buffers: Sequence[int],
    pers: Sequence[float],
    ccas: Sequence[str],
    workers: int = 1,
    keep_runs: bool = False,
) -> list:
    """Run the Cartesian product ``ccas x buffers x pers``.

    Each row gets its own seed derived from ``base.seed`` and the row's
    parameters, so rows do not depend on sweep order or worker count.
    """
    specs = sweep_specs(base, buffers, pers, ccas)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_scenario, specs))
    else:
        reports = [run_scenario(s) for s in specs]
    if not keep_runs:
        for r in reports:
            r.result = None
    return reports


def write_metrics_csv(reports: Iterable[MetricsReport], fh: TextIO) -> None:
    fh.write(CSV_HEADER + "\n")
    for rep in reports:
        for row in rep.csv_rows():
            fh.write(",".join(row) + "\n")
