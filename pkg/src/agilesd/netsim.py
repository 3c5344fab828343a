"""Packet-level discrete-event simulator for a single-bottleneck dumbbell.

Topology::

    S_i --access--> R1 ==bottleneck==> R2 --access--> D_i
    S_i <--access-- R1 <==bottleneck== R2 <--access-- D_i

Every link direction is a serialized FIFO transmitter with its own
drop-tail queue. Link occupancy is tracked analytically: a transmitter keeps
the time it becomes idle, so a packet's far-end arrival time is known the
moment it is admitted and no per-hop "transmit complete" event is needed.
Events only exist where packets from several flows meet (the two router
ingresses) and at endpoints.

Time is kept in integer nanoseconds; results are reported in seconds.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from .cca import AgileParams, CongestionController, make_controller

NS_PER_S = 1_000_000_000

DEFAULT_BANDWIDTH = 1_000_000_000  # bits/s, every link
DEFAULT_ACCESS_DELAY = 0.001
DEFAULT_BOTTLENECK_DELAY = 0.004
PAYLOAD_BYTES = 1000
HEADER_BYTES = 40
ACK_BYTES = 40

MIN_RTO = 0.2
MAX_RTO = 60.0
INITIAL_RTO = 1.0


def to_ns(seconds: float) -> int:
    return int(round(seconds * NS_PER_S))


class PacketKind(enum.IntEnum):
    DATA = 0
    ACK = 1


class Packet(NamedTuple):
    """A data segment or a cumulative ACK.

    For ACKs ``seq`` is the next sequence number the receiver expects and
    ``sent_at`` echoes the send time of the data packet that triggered it.
    """

    flow_id: int
    seq: int
    kind: PacketKind
    size: int
    sent_at: int


class EventKind(enum.IntEnum):
    FLOW_START = 0
    FLOW_STOP = 1
    WARMUP_MARK = 2
    DATA_AT_BOTTLENECK = 3
    DATA_AT_RECEIVER = 4
    ACK_AT_BOTTLENECK = 5
    ACK_AT_SENDER = 6
    RTO_EXPIRY = 7


# --------------------------------------------------------------------------
# Links and queues


class DropTailQueue:
    """Bounded FIFO that discards arrivals when full.

    Entries carry the time they will leave the queue (start of their
    transmission); ``drain(now)`` forgets entries whose time has come.
    Entries added without a departure time stay until ``dequeue``.
    """

    __slots__ = ("capacity", "_items", "drops", "high_water")

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError(f"queue capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: deque = deque()
        self.drops = 0
        self.high_water = 0

    def __len__(self) -> int:
        return len(self._items)

    def enqueue(self, packet, leaves_at: float = float("inf")) -> bool:
        items = self._items
        if len(items) >= self.capacity:
            self.drops += 1
            return False
        items.append((leaves_at, packet))
        if len(items) > self.high_water:
            self.high_water = len(items)
        return True

    def dequeue(self):
        return self._items.popleft()[1]

    def drain(self, now: float) -> int:
        items = self._items
        while items and items[0][0] <= now:
            items.popleft()
        return len(items)

    def contents(self) -> list:
        return [p for _, p in self._items]


class Link:
    """One direction of a point-to-point link with a drop-tail output queue."""

    __slots__ = ("bandwidth", "prop_delay", "queue", "busy_until", "_ser", "last_start")

    def __init__(self, bandwidth: int, prop_delay: float, capacity: int) -> None:
        if bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        self.bandwidth = int(bandwidth)
        self.prop_delay = to_ns(prop_delay)
        self.queue = DropTailQueue(capacity)
        self.busy_until = 0
        self.last_start = -1
        self._ser: dict = {}

    def serialization(self, size: int) -> int:
        """Nanoseconds needed to clock ``size`` bytes onto the wire."""
        ns = self._ser.get(size)
        if ns is None:
            ns = -(-size * 8 * NS_PER_S // self.bandwidth)
            self._ser[size] = ns
        return ns

    def transmit(self, now: int, packet: Packet) -> int:
        """Admit ``packet`` at time ``now``; return far-end arrival time or -1 if dropped.

        Calls on one link must come in non-decreasing ``now`` order.
        """
        start = self.busy_until
        if start > now:
            queue = self.queue
            items = queue._items
            while items and items[0][0] <= now:
                items.popleft()
            if len(items) >= queue.capacity:
                queue.drops += 1
                return -1
            items.append((start, packet))
            if len(items) > queue.high_water:
                queue.high_water = len(items)
        else:
            start = now
        self.last_start = start
        ser = self._ser.get(packet.size)
        if ser is None:
            ser = self.serialization(packet.size)
        done = start + ser
        self.busy_until = done
        return done + self.prop_delay

    def queue_length(self, now: int) -> int:
        return self.queue.drain(now)


def enqueue(queue: DropTailQueue, packet) -> bool:
    """Tail-drop admission: ``True`` if appended, ``False`` if the queue was full."""
    return queue.enqueue(packet)


def maybe_corrupt(packet, per: float, rng: random.Random) -> bool:
    """Return ``True`` if ``packet`` is lost to a bit error (probability ``per``)."""
    if per <= 0.0:
        return False
    if per >= 1.0:
        return True
    return rng.random() < per


# --------------------------------------------------------------------------
# Topology and schedule


@dataclass(frozen=True)
class DumbbellTopology:
    """Static description of the dumbbell; links are instantiated per run."""

    n_flows: int
    buffer: int
    per: float = 0.0
    access_delays: tuple = ()
    bandwidth: int = DEFAULT_BANDWIDTH
    bottleneck_delay: float = DEFAULT_BOTTLENECK_DELAY
    payload_bytes: int = PAYLOAD_BYTES
    header_bytes: int = HEADER_BYTES
    ack_bytes: int = ACK_BYTES

    @property
    def data_bytes(self) -> int:
        return self.payload_bytes + self.header_bytes

    def base_rtt(self, flow_id: int = 0) -> float:
        """Round-trip propagation delay in seconds (no serialization)."""
        return 2.0 * (2.0 * self.access_delays[flow_id] + self.bottleneck_delay)

    def bdp_packets(self, flow_id: int = 0) -> float:
        """Bandwidth-delay product in full-size data packets."""
        return self.bandwidth * self.base_rtt(flow_id) / (8.0 * self.data_bytes)


def build_dumbbell(
    n_flows: int,
    buffer: int,
    per: float = 0.0,
    access_delay_per_flow: Optional[Sequence[float]] = None,
    bandwidth: int = DEFAULT_BANDWIDTH,
    bottleneck_delay: float = DEFAULT_BOTTLENECK_DELAY,
    payload_bytes: int = PAYLOAD_BYTES,
) -> DumbbellTopology:
    """Describe ``n_flows`` sender/receiver pairs around one bottleneck.

    ``access_delay_per_flow`` sets the one-way delay of both access links of
    each pair (default 1 ms each). Every link runs at ``bandwidth`` and every
    output queue holds ``buffer`` packets.
    """
    if n_flows < 1:
        raise ValueError(f"need at least one flow, got {n_flows}")
    if buffer < 1:
        raise ValueError(f"buffer must hold at least one packet, got {buffer}")
    if not 0.0 <= per <= 1.0:
        raise ValueError(f"per must lie in [0, 1], got {per}")
    if access_delay_per_flow is None:
        delays = (DEFAULT_ACCESS_DELAY,) * n_flows
    else:
        delays = tuple(float(d) for d in access_delay_per_flow)
        if len(delays) != n_flows:
            raise ValueError(
                f"got {len(delays)} access delays for {n_flows} flows"
            )
        if any(d < 0 for d in delays):
            raise ValueError("access delays must be non-negative")
    return DumbbellTopology(
        n_flows=n_flows,
        buffer=int(buffer),
        per=float(per),
        access_delays=delays,
        bandwidth=int(bandwidth),
        bottleneck_delay=float(bottleneck_delay),
        payload_bytes=int(payload_bytes),
    )


@dataclass(frozen=True)
class FlowSpec:
    """One bulk (FTP-like) transfer: which controller, when it runs."""

    cca: str = "agile-sd"
    start: float = 0.0
    stop: Optional[float] = None
    agile: Optional[AgileParams] = None
    timeout_ssthresh_fraction: float = 0.5

    def controller(self) -> CongestionController:
        return make_controller(self.cca, self.agile, self.timeout_ssthresh_fraction)


# --------------------------------------------------------------------------
# Endpoints


class Receiver:
    """Cumulative-ACK sink: one ACK per data packet, out-of-order data buffered."""

    __slots__ = ("flow_id", "expected", "ooo", "delivered", "duplicates")

    def __init__(self, flow_id: int) -> None:
        self.flow_id = flow_id
        self.expected = 0
        self.ooo: set = set()
        self.delivered = 0
        self.duplicates = 0

    def on_data(self, seq: int) -> int:
        """Accept a data segment and return the cumulative ACK number."""
        self.delivered += 1
        expected = self.expected
        if seq == expected:
            expected += 1
            ooo = self.ooo
            if ooo:
                while expected in ooo:
                    ooo.remove(expected)
                    expected += 1
            self.expected = expected
        elif seq > expected:
            if seq in self.ooo:
                self.duplicates += 1
            else:
                self.ooo.add(seq)
        else:
            self.duplicates += 1
        return self.expected


class Sender:
    """Bulk sender with NewReno-style loss recovery around a pluggable controller.

    ``net`` supplies ``send_data(sender, seq, now)`` and
    ``schedule_rto(sender, when_ns)``; the simulator implements both, tests
    can stub them.
    """

    __slots__ = (
        "flow_id", "controller", "net",
        "snd_una", "next_seq", "high_water", "dup_acks", "inflate",
        "in_recovery", "recover", "partial_seen",
        "srtt", "rttvar", "rto", "rto_deadline", "rto_event_at",
        "active", "sent", "retransmits", "fast_retransmits", "timeouts",
        "acks_received", "min_rtt",
    )

    def __init__(self, flow_id: int, controller: CongestionController, net) -> None:
        self.flow_id = flow_id
        self.controller = controller
        self.net = net
        self.snd_una = 0
        self.next_seq = 0
        self.high_water = 0
        self.dup_acks = 0
        self.inflate = 0
        self.in_recovery = False
        self.recover = -1
        self.partial_seen = False
        self.srtt: Optional[float] = None
        self.rttvar = 0.0
        self.rto = INITIAL_RTO
        self.rto_deadline: Optional[int] = None
        self.rto_event_at: Optional[int] = None
        self.active = False
        self.sent = 0
        self.retransmits = 0
        self.fast_retransmits = 0
        self.timeouts = 0
        self.acks_received = 0
        self.min_rtt = float("inf")

    @property
    def outstanding(self) -> int:
        return self.next_seq - self.snd_una

    @property
    def inflight(self) -> int:
        """Segments believed to be in the network (outstanding minus dup-ACK credit)."""
        return self.next_seq - self.snd_una - self.inflate

    # -- transmission helpers

    def _emit(self, seq: int, now: int) -> None:
        self.sent += 1
        if seq < self.high_water:
            self.retransmits += 1
        else:
            self.high_water = seq + 1
        self.net.send_data(self, seq, now)

    def _arm(self, now: int) -> None:
        deadline = now + int(self.rto * NS_PER_S)
        self.rto_deadline = deadline
        # timer events are lazy: only schedule one if none is pending early enough
        if self.rto_event_at is None or deadline < self.rto_event_at:
            self.rto_event_at = deadline
            self.net.schedule_rto(self, deadline)

    def fill_window(self, now: int) -> int:
        """Send new segments while ``inflight < floor(cwnd)``; return how many."""
        if not self.active:
            return 0
        limit = int(self.controller.cwnd) + self.inflate + self.snd_una
        n = 0
        while self.next_seq < limit:
            seq = self.next_seq
            self.next_seq = seq + 1
            self._emit(seq, now)
            n += 1
        if n and self.rto_deadline is None:
            self._arm(now)
        return n

    def start(self, now: int) -> None:
        self.active = True
        self.fill_window(now)

    def stop(self) -> None:
        self.active = False
        self.rto_deadline = None

    # -- ACK processing

    def _rtt_sample(self, rtt: float) -> None:
        if rtt < self.min_rtt:
            self.min_rtt = rtt
        if self.srtt is None:
            self.srtt = rtt
            self.rttvar = rtt / 2.0
        else:
            self.rttvar = 0.75 * self.rttvar + 0.25 * abs(self.srtt - rtt)
            self.srtt = 0.875 * self.srtt + 0.125 * rtt
        rto = self.srtt + 4.0 * self.rttvar
        self.rto = MIN_RTO if rto < MIN_RTO else (MAX_RTO if rto > MAX_RTO else rto)

    def on_ack(self, ack_no: int, echo_ts: int, now: int) -> None:
        if ack_no > self.high_water:
            raise AssertionError(
                f"flow {self.flow_id}: ACK {ack_no} beyond highest sent {self.high_water}"
            )
        self.acks_received += 1
        ctl = self.controller
        if ack_no > self.snd_una:
            acked = ack_no - self.snd_una
            self.snd_una = ack_no
            if self.next_seq < ack_no:
                self.next_seq = ack_no
            self.dup_acks = 0
            self._rtt_sample((now - echo_ts) / NS_PER_S)
            if self.in_recovery:
                if ack_no > self.recover:
                    self.in_recovery = False
                    self.inflate = 0
                    ctl.exit_recovery(now / NS_PER_S)
                    self._restart_timer(now)
                else:
                    # partial ACK: next hole is lost too
                    inflate = self.inflate - acked + 1
                    self.inflate = inflate if inflate > 0 else 0
                    if self.active:
                        self._emit(ack_no, now)
                    if not self.partial_seen:
                        self.partial_seen = True
                        self._restart_timer(now)
            else:
                ctl.on_ack(acked, now / NS_PER_S)
                self._restart_timer(now)
            self.fill_window(now)
        elif ack_no == self.snd_una and self.next_seq > ack_no:
            self.dup_acks += 1
            if self.in_recovery:
                self.inflate += 1
                self.fill_window(now)
            elif self.dup_acks == 3 and ack_no > self.recover:
                self.fast_retransmits += 1
                self.in_recovery = True
                self.partial_seen = False
                self.recover = self.next_seq - 1
                ctl.on_triple_dup_ack(now / NS_PER_S)
                self.inflate = 3
                if self.active:
                    self._emit(ack_no, now)
                self.fill_window(now)

    def _restart_timer(self, now: int) -> None:
        if self.next_seq > self.snd_una and self.active:
            self._arm(now)
        else:
            self.rto_deadline = None

    def on_rto(self, now: int) -> bool:
        """Handle a timer event; return ``True`` if a timeout actually fired."""
        if now != self.rto_event_at:
            return False  # superseded by an earlier timer event
        self.rto_event_at = None
        deadline = self.rto_deadline
        if deadline is None or not self.active:
            return False
        if now < deadline:
            self.rto_event_at = deadline
            self.net.schedule_rto(self, deadline)
            return False
        if self.next_seq <= self.snd_una:
            self.rto_deadline = None
            return False
        return self.expire(now)

    def expire(self, now: int) -> bool:
        """Retransmission timeout: collapse the window and go back to ``snd_una``."""
        if self.next_seq <= self.snd_una:
            self.rto_deadline = None
            return False
        self.timeouts += 1
        self.controller.on_timeout(now / NS_PER_S)
        self.in_recovery = False
        self.inflate = 0
        self.dup_acks = 0
        self.recover = self.next_seq - 1
        self.next_seq = self.snd_una
        self.rto = min(self.rto * 2.0, MAX_RTO)
        self.rto_deadline = None
        self.fill_window(now)
        if self.rto_deadline is None:
            self._arm(now)
        return True


# --------------------------------------------------------------------------
# Simulation


class TraceRow(NamedTuple):
    time_s: float
    flow_id: int
    event: str
    cwnd: float
    ssthresh: float
    queue_len: int


@dataclass
class FlowResult:
    flow_id: int
    cca: str
    start: float
    stop: float
    sent: int = 0
    retransmits: int = 0
    delivered: int = 0
    dropped_queue: int = 0
    dropped_per: int = 0
    in_flight_at_end: int = 0
    fast_retransmits: int = 0
    timeouts: int = 0
    goodput_packets: int = 0
    raw_packets: int = 0
    goodput_at_warmup: int = 0
    raw_at_warmup: int = 0
    acks_dropped: int = 0
    final_cwnd: float = 0.0
    min_rtt: float = float("inf")

    @property
    def dropped(self) -> int:
        return self.dropped_queue + self.dropped_per

    def conserved(self) -> bool:
        return self.delivered + self.dropped_queue + self.dropped_per + self.in_flight_at_end == self.sent


@dataclass
class RunResult:
    topology: DumbbellTopology
    duration: float
    seed: int
    warmup: float
    flows: list
    trace: list = field(default_factory=list)
    exhausted: bool = False
    end_time: float = 0.0
    events: int = 0
    bottleneck_high_water: int = 0

    def conserved(self) -> bool:
        return all(f.conserved() for f in self.flows)


class Simulation:
    """Single run of the dumbbell; build with a topology and schedule, call ``run``."""

    def __init__(
        self,
        topology: DumbbellTopology,
        schedule: Sequence[FlowSpec],
        duration: float,
        seed: int = 0,
        trace_interval: Optional[float] = 0.01,
        warmup: float = 0.0,
    ) -> None:
        if len(schedule) > topology.n_flows:
            raise ValueError(
                f"schedule has {len(schedule)} flows but topology only {topology.n_flows}"
            )
        if duration <= 0:
            raise ValueError("duration must be positive")
        self.topology = topology
        self.schedule = list(schedule)
        self.duration = duration
        self.seed = seed
        self.warmup = warmup
        self.rng = random.Random(seed)
        self._heap: list = []
        self._counter = itertools.count()
        self.now = 0

        bw, buf = topology.bandwidth, topology.buffer
        self.bottleneck_fwd = Link(bw, topology.bottleneck_delay, buf)
        self.bottleneck_rev = Link(bw, topology.bottleneck_delay, buf)
        self.senders: list = []
        self.receivers: list = []
        self.access_up: list = []      # S_i -> R1
        self.access_down: list = []    # R2 -> D_i
        self.access_ack_up: list = []  # D_i -> R2
        self.access_ack_down: list = []  # R1 -> S_i
        self.results: list = []
        self.trace: list = []
        self._trace_step = to_ns(trace_interval) if trace_interval else None
        self._next_sample: list = []

        for i, spec in enumerate(self.schedule):
            d = topology.access_delays[i]
            self.access_up.append(Link(bw, d, buf))
            self.access_down.append(Link(bw, d, buf))
            self.access_ack_up.append(Link(bw, d, buf))
            self.access_ack_down.append(Link(bw, d, buf))
            self.senders.append(Sender(i, spec.controller(), self))
            self.receivers.append(Receiver(i))
            stop = duration if spec.stop is None else min(spec.stop, duration)
            if not 0.0 <= spec.start < stop:
                raise ValueError(f"flow {i}: need 0 <= start < stop, got [{spec.start}, {stop}]")
            self.results.append(FlowResult(i, spec.cca, spec.start, stop))
            self._next_sample.append(0)
            self._push(to_ns(spec.start), EventKind.FLOW_START, i, None)
            if warmup > 0:
                self._push(to_ns(spec.start + warmup), EventKind.WARMUP_MARK, i, None)
            self._push(to_ns(stop), EventKind.FLOW_STOP, i, None)

        self._data_size = topology.data_bytes
        self._ack_size = topology.ack_bytes

    # -- hooks used by Sender

    def _push(self, t: int, kind: int, flow: int, pkt) -> None:
        heapq.heappush(self._heap, (t, next(self._counter), kind, flow, pkt))

    def send_data(self, sender: Sender, seq: int, now: int) -> None:
        i = sender.flow_id
        pkt = Packet(i, seq, PacketKind.DATA, self._data_size, now)
        t = self.access_up[i].transmit(now, pkt)
        if t < 0:
            self.results[i].dropped_queue += 1
        else:
            heapq.heappush(self._heap, (t, next(self._counter), 3, i, pkt))

    def schedule_rto(self, sender: Sender, when: int) -> None:
        self._push(when, EventKind.RTO_EXPIRY, sender.flow_id, None)

    # -- tracing

    def _queue_seen(self, i: int, now: int) -> int:
        return self.access_up[i].queue_length(now) + self.bottleneck_fwd.queue_length(now)

    def _record(self, i: int, now: int, event: str) -> None:
        ctl = self.senders[i].controller
        self.trace.append(
            TraceRow(now / NS_PER_S, i, event, ctl.cwnd, ctl.ssthresh, self._queue_seen(i, now))
        )

    # -- main loop

    def run(self) -> RunResult:
        heap = self._heap
        pop = heapq.heappop
        push = heapq.heappush
        counter = self._counter
        end = to_ns(self.duration)
        senders, receivers, results = self.senders, self.receivers, self.results
        bfwd, brev = self.bottleneck_fwd, self.bottleneck_rev
        access_down, ack_up, ack_down = self.access_down, self.access_ack_up, self.access_ack_down
        per = self.topology.per
        uniform = len(set(self.topology.access_delays[: len(senders)])) <= 1
        rand = self.rng.random
        step = self._trace_step
        next_sample = self._next_sample
        ack_size = self._ack_size
        events = 0
        exhausted = False

        while True:
            if not heap:
                exhausted = True
                break
            if heap[0][0] > end:
                break
            t, _, kind, i, pkt = pop(heap)
            self.now = t
            events += 1

            if kind == 6:  # ACK_AT_SENDER
                s = senders[i]
                fr = s.fast_retransmits
                s.on_ack(pkt.seq, pkt.sent_at, t)
                if s.fast_retransmits != fr:
                    self._record(i, t, "triple_dup_ack")
                elif step is not None and t >= next_sample[i] and s.active:
                    next_sample[i] = t + step
                    self._record(i, t, "ack")
            elif kind == 3:  # DATA_AT_BOTTLENECK
                a = bfwd.transmit(t, pkt)
                if a < 0:
                    results[i].dropped_queue += 1
                elif per > 0.0 and rand() < per:
                    results[i].dropped_per += 1
                else:
                    a = access_down[i].transmit(a, pkt)
                    if a < 0:
                        results[i].dropped_queue += 1
                    else:
                        push(heap, (a, next(counter), 4, i, pkt))
            elif kind == 4:  # DATA_AT_RECEIVER
                ack_no = receivers[i].on_data(pkt.seq)
                ack = Packet(i, ack_no, PacketKind.ACK, ack_size, pkt.sent_at)
                a = ack_up[i].transmit(t, ack)
                if a < 0:
                    results[i].acks_dropped += 1
                elif uniform:
                    # equal access delays keep R2 arrivals in processing order,
                    # so the shared reverse link can be served without an event
                    a = brev.transmit(a, ack)
                    if a >= 0:
                        a = ack_down[i].transmit(a, ack)
                    if a < 0:
                        results[i].acks_dropped += 1
                    else:
                        push(heap, (a, next(counter), 6, i, ack))
                else:
                    push(heap, (a, next(counter), 5, i, ack))
            elif kind == 5:  # ACK_AT_BOTTLENECK
                a = brev.transmit(t, pkt)
                if a >= 0:
                    a = ack_down[i].transmit(a, pkt)
                if a < 0:
                    results[i].acks_dropped += 1
                else:
                    push(heap, (a, next(counter), 6, i, pkt))
            elif kind == 7:  # RTO_EXPIRY
                if senders[i].on_rto(t):
                    self._record(i, t, "timeout")
            elif kind == 0:  # FLOW_START
                senders[i].start(t)
                self._record(i, t, "start")
            elif kind == 1:  # FLOW_STOP
                r = results[i]
                r.goodput_packets = receivers[i].expected
                r.raw_packets = receivers[i].delivered
                self._record(i, t, "stop")
                senders[i].stop()
            elif kind == 2:  # WARMUP_MARK
                results[i].goodput_at_warmup = receivers[i].expected
                results[i].raw_at_warmup = receivers[i].delivered

        in_flight = [0] * len(senders)
        for ev in heap:
            if ev[2] == 3 or ev[2] == 4:
                in_flight[ev[3]] += 1
        for i, r in enumerate(results):
            s = senders[i]
            r.sent = s.sent
            r.retransmits = s.retransmits
            r.fast_retransmits = s.fast_retransmits
            r.timeouts = s.timeouts
            r.delivered = receivers[i].delivered
            r.in_flight_at_end = in_flight[i]
            r.final_cwnd = s.controller.cwnd
            r.min_rtt = s.min_rtt
        return RunResult(
            topology=self.topology,
            duration=self.duration,
            seed=self.seed,
            warmup=self.warmup,
            flows=results,
            trace=self.trace,
            exhausted=exhausted,
            end_time=self.now / NS_PER_S,
            events=events,
            bottleneck_high_water=bfwd.queue.high_water,
        )


def run(
    topology: DumbbellTopology,
    schedule: Sequence[FlowSpec],
    duration: float,
    seed: int = 0,
    trace_interval: Optional[float] = 0.01,
    warmup: float = 0.0,
) -> RunResult:
    """Simulate ``schedule`` on ``topology`` for ``duration`` seconds."""
    return Simulation(topology, schedule, duration, seed, trace_interval, warmup).run()


def write_trace_csv(rows: Iterable[TraceRow], fh) -> None:
    """Write trace rows as ``time_s,flow_id,event,cwnd,ssthresh,queue_len``."""
    fh.write("time_s,flow_id,event,cwnd,ssthresh,queue_len\n")
    for r in rows:
        fh.write(f"{r.time_s:.9f},{r.flow_id},{r.event},{r.cwnd:.6f},{_fmt(r.ssthresh)},{r.queue_len}\n")


def _fmt(x: float) -> str:
    return "inf" if x == float("inf") else f"{x:.6f}"
