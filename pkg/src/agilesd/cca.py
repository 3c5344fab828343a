"""Congestion-control algorithms: Agile-SD, NewReno and Cubic.

Every controller is a small deterministic state machine driven by three
events (new cumulative ACK, third duplicate ACK, retransmission timeout).
Windows are measured in fractional segments and grow per ACK, not per RTT.

The module-level functions (``gap_total``, ``agility_factor``,
``agile_on_ack`` ...) are the pure, state-in/state-out form of the Agile-SD
rules; the controller classes are the mutable form the simulator drives.
Both share one implementation.
"""

from __future__ import annotations

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

#: Smallest window a multiplicative decrease may leave behind.
MIN_CWND = 2.0


class Phase(enum.Enum):
    SLOW_START = "slow_start"
    CONGESTION_AVOIDANCE = "congestion_avoidance"
    FAST_RECOVERY = "fast_recovery"


class EventKind(enum.Enum):
    ACK_RECEIVED = "ack"
    TRIPLE_DUP_ACK = "triple_dup_ack"
    TIMEOUT = "timeout"
    RECOVERY_EXIT = "recovery_exit"


class ControllerEvent(NamedTuple):
    kind: EventKind
    now: float = 0.0
    acked_segments: int = 1


class TracePoint(NamedTuple):
    """One record emitted through a controller's trace hook."""

    time: float
    event: str
    cwnd: float
    ssthresh: float
    phase: Phase
    lam: float


TraceHook = Callable[[TracePoint], None]


@dataclass(frozen=True)
class AgileParams:
    """Agile-SD tuning knobs.

    ``lambda_min`` is pinned to 1. ``beta1`` is the decrease factor for a
    loss detected in slow start and ``beta2`` the one for congestion
    avoidance; ``beta1 <= beta2`` is required (equality is allowed so the
    algorithm can be configured to mimic NewReno exactly).
    """

    lambda_max: float = 3.0
    beta1: float = 0.90
    beta2: float = 0.95
    initial_cwnd: int = 2
    lambda_min: float = 1.0

    def __post_init__(self) -> None:
        if self.lambda_min != 1.0:
            raise ValueError("lambda_min must be 1")
        if not self.lambda_max >= 1.0:
            raise ValueError(f"lambda_max must be >= 1, got {self.lambda_max}")
        if not 0.0 < self.beta1 < 1.0:
            raise ValueError(f"beta1 must lie in (0, 1), got {self.beta1}")
        if not 0.0 < self.beta2 < 1.0:
            raise ValueError(f"beta2 must lie in (0, 1), got {self.beta2}")
        if self.beta1 > self.beta2:
            raise ValueError(
                f"beta1 ({self.beta1}) must not exceed beta2 ({self.beta2})"
            )
        if int(self.initial_cwnd) != self.initial_cwnd or self.initial_cwnd < 1:
            raise ValueError(f"initial_cwnd must be a positive integer, got {self.initial_cwnd}")


@dataclass(frozen=True)
class ControllerState:
    """Snapshot of a controller's congestion variables.

    ``cwnd_loss`` and ``cwnd_degraded`` are ``None`` until the first
    fast-retransmit loss.
    """

    cwnd: float
    ssthresh: float
    cwnd_loss: Optional[float] = None
    cwnd_degraded: Optional[float] = None
    phase: Phase = Phase.SLOW_START


# --------------------------------------------------------------------------
# Agile-SD arithmetic


def gap_total(cwnd_loss: float, cwnd_degraded: float) -> float:
    """Window released by the last loss, floored at one segment."""
    return max(cwnd_loss - cwnd_degraded, 1.0)


def gap_current(cwnd_loss: float, cwnd: float) -> float:
    """Distance from the current window to the last loss point, floored at one."""
    return max(cwnd_loss - cwnd, 1.0)


def agility_factor(params: AgileParams, gap_current: float, gap_total: float) -> float:
    """Return the agility factor, clamped to ``[lambda_min, lambda_max]``."""
    lam = max(params.lambda_max * gap_current / gap_total, params.lambda_min)
    return min(lam, params.lambda_max)


def epoch_time(rtt: float, lambdas: Iterable[float]) -> float:
    """Time to climb back to the loss point when cycle ``i`` lasts ``rtt / lambda_i``.

    >>> round(epoch_time(0.020, [4, 3, 2, 1]) * 1e3, 3)
    41.667
    """
    if rtt <= 0:
        raise ValueError("rtt must be positive")
    total = 0.0
    for lam in lambdas:
        if lam < 1:
            raise ValueError(f"agility factors must be >= 1, got {lam}")
        total += rtt / lam
    return total


# --------------------------------------------------------------------------
# Controller contract


class CongestionController(ABC):
    """Common surface the simulator talks to.

    Subclasses only implement the window arithmetic. Phase is derived:
    fast recovery while the sender says so, otherwise slow start iff
    ``cwnd < ssthresh``.
    """

    name = "base"

    def __init__(
        self,
        initial_cwnd: int = 2,
        initial_ssthresh: float = math.inf,
        timeout_ssthresh_fraction: float = 0.5,
        trace: Optional[TraceHook] = None,
    ) -> None:
        if initial_cwnd < 1:
            raise ValueError("initial_cwnd must be >= 1")
        if not 0.0 < timeout_ssthresh_fraction <= 1.0:
            raise ValueError("timeout_ssthresh_fraction must lie in (0, 1]")
        self.initial_cwnd = float(initial_cwnd)
        self.timeout_ssthresh_fraction = timeout_ssthresh_fraction
        self.cwnd = float(initial_cwnd)
        self.ssthresh = float(initial_ssthresh)
        self.in_recovery = False
        self.trace = trace

    @property
    def phase(self) -> Phase:
        if self.in_recovery:
            return Phase.FAST_RECOVERY
        if self.cwnd < self.ssthresh:
            return Phase.SLOW_START
        return Phase.CONGESTION_AVOIDANCE

    def current_lambda(self) -> float:
        """Growth multiplier that the next congestion-avoidance ACK would use."""
        return 1.0

    @abstractmethod
    def on_ack(self, acked: int = 1, now: float = 0.0) -> None:
        """A cumulative ACK acknowledged ``acked`` new segments."""

    @abstractmethod
    def _reduce(self, now: float) -> None:
        """Multiplicative decrease on a fast-retransmit loss."""

    def on_triple_dup_ack(self, now: float = 0.0) -> None:
        self._reduce(now)
        self.in_recovery = True
        self._emit(now, "triple_dup_ack")

    def exit_recovery(self, now: float = 0.0) -> None:
        self.in_recovery = False
        self._emit(now, "recovery_exit")

    def on_timeout(self, now: float = 0.0) -> None:
        before = self.cwnd
        self.ssthresh = max(before * self.timeout_ssthresh_fraction, MIN_CWND)
        self.cwnd = self.initial_cwnd
        self.in_recovery = False
        self._timeout_hook(now, before)
        self._emit(now, "timeout")

    def _timeout_hook(self, now: float, cwnd_before: float) -> None:
        pass

    def apply(self, event: ControllerEvent) -> None:
        kind = event.kind
        if kind is EventKind.ACK_RECEIVED:
            if event.acked_segments < 1:
                raise ValueError("an ACK event must acknowledge at least one segment")
            self.on_ack(event.acked_segments, event.now)
        elif kind is EventKind.TRIPLE_DUP_ACK:
            self.on_triple_dup_ack(event.now)
        elif kind is EventKind.TIMEOUT:
            self.on_timeout(event.now)
        elif kind is EventKind.RECOVERY_EXIT:
            self.exit_recovery(event.now)
        else:  # pragma: no cover
            raise ValueError(f"unknown event kind {kind!r}")

    def replay(self, events: Iterable[ControllerEvent]) -> list[float]:
        """Apply ``events`` in order and return the cwnd after each one."""
        out = []
        for ev in events:
            self.apply(ev)
            out.append(self.cwnd)
        return out

    def _emit(self, now: float, event: str) -> None:
        if self.trace is not None:
            self.trace(
                TracePoint(now, event, self.cwnd, self.ssthresh, self.phase, self.current_lambda())
            )


class NewReno(CongestionController):
    """Slow start, +1/cwnd per ACK, halve on loss."""

    name = "newreno"

    def on_ack(self, acked: int = 1, now: float = 0.0) -> None:
        if self.cwnd < self.ssthresh:
            self.cwnd += 1.0
        else:
            self.cwnd += 1.0 / self.cwnd
        if self.trace is not None:
            self._emit(now, "ack")

    def _reduce(self, now: float) -> None:
        half = max(self.cwnd / 2.0, min(MIN_CWND, self.cwnd))
        self.ssthresh = half
        self.cwnd = half


class AgileSD(CongestionController):
    """Agile-SD: agility-factor congestion avoidance with phase-dependent decrease."""

    name = "agile-sd"

    def __init__(
        self,
        params: Optional[AgileParams] = None,
        initial_ssthresh: float = math.inf,
        timeout_ssthresh_fraction: float = 0.5,
        trace: Optional[TraceHook] = None,
    ) -> None:
        self.params = params if params is not None else AgileParams()
        super().__init__(
            self.params.initial_cwnd, initial_ssthresh, timeout_ssthresh_fraction, trace
        )
        self.cwnd_loss: Optional[float] = None
        self.cwnd_degraded: Optional[float] = None
        # hot-path copies
        self._lmax = float(self.params.lambda_max)
        self._lmin = float(self.params.lambda_min)

    @classmethod
    def from_state(cls, state: ControllerState, params: Optional[AgileParams] = None) -> "AgileSD":
        ctl = cls(params)
        ctl.cwnd = float(state.cwnd)
        ctl.ssthresh = float(state.ssthresh)
        ctl.cwnd_loss = state.cwnd_loss
        ctl.cwnd_degraded = state.cwnd_degraded
        ctl.in_recovery = state.phase is Phase.FAST_RECOVERY
        return ctl

    def state(self) -> ControllerState:
        return ControllerState(
            self.cwnd, self.ssthresh, self.cwnd_loss, self.cwnd_degraded, self.phase
        )

    def current_lambda(self) -> float:
        if self.cwnd_loss is None:
            return self._lmax
        return agility_factor(
            self.params,
            gap_current(self.cwnd_loss, self.cwnd),
            gap_total(self.cwnd_loss, self.cwnd_degraded),
        )

    def on_ack(self, acked: int = 1, now: float = 0.0) -> None:
        cwnd = self.cwnd
        if cwnd < self.ssthresh:
            self.cwnd = cwnd + 1.0
        else:
            loss = self.cwnd_loss
            if loss is None:
                lam = self._lmax
            else:
                gt = loss - self.cwnd_degraded
                if gt < 1.0:
                    gt = 1.0
                gc = loss - cwnd
                if gc < 1.0:
                    gc = 1.0
                lam = self._lmax * gc / gt
                if lam < self._lmin:
                    lam = self._lmin
                elif lam > self._lmax:
                    lam = self._lmax
            self.cwnd = cwnd + lam / cwnd
        if self.trace is not None:
            self._emit(now, "ack")

    def _reduce(self, now: float) -> None:
        before = self.cwnd
        beta = self.params.beta1 if before < self.ssthresh else self.params.beta2
        after = max(before * beta, min(MIN_CWND, before))
        self.cwnd_loss = before
        self.cwnd = after
        self.ssthresh = after - 1.0
        self.cwnd_degraded = after


class Cubic(CongestionController):
    """Minimal Cubic: cubic window target plus a NewReno-equivalent floor.

    No fast convergence, no hybrid slow start.
    """

    name = "cubic"

    def __init__(
        self,
        c: float = 0.4,
        beta: float = 0.3,
        initial_cwnd: int = 2,
        initial_ssthresh: float = math.inf,
        timeout_ssthresh_fraction: float = 0.5,
        trace: Optional[TraceHook] = None,
    ) -> None:
        if c <= 0:
            raise ValueError("c must be positive")
        if not 0.0 < beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        super().__init__(initial_cwnd, initial_ssthresh, timeout_ssthresh_fraction, trace)
        self.c = c
        self.beta = beta
        self.w_max = 0.0
        self.k = 0.0
        self.epoch_start: Optional[float] = None
        self.w_est = self.cwnd
        self._est_gain = 3.0 * beta / (2.0 - beta)

    def target(self, now: float) -> float:
        """Cubic window ``C (t - K)^3 + W_max`` at absolute time ``now``."""
        t = now - (self.epoch_start if self.epoch_start is not None else now)
        return self.c * (t - self.k) ** 3 + self.w_max

    def _start_epoch(self, now: float) -> None:
        self.epoch_start = now
        if self.cwnd < self.w_max:
            self.k = ((self.w_max - self.cwnd) / self.c) ** (1.0 / 3.0)
        else:
            self.k = 0.0
            self.w_max = self.cwnd
        self.w_est = self.cwnd

    def on_ack(self, acked: int = 1, now: float = 0.0) -> None:
        cwnd = self.cwnd
        if cwnd < self.ssthresh:
            self.cwnd = cwnd + 1.0
        else:
            if self.epoch_start is None:
                self._start_epoch(now)
            t = now - self.epoch_start
            target = self.c * (t - self.k) ** 3 + self.w_max
            if target > 1.5 * cwnd:
                target = 1.5 * cwnd
            if target > cwnd:
                new = cwnd + (target - cwnd) / cwnd
            else:
                new = cwnd + 0.01 / cwnd
            self.w_est += self._est_gain / cwnd
            if self.w_est > new:
                new = self.w_est
            self.cwnd = new
        if self.trace is not None:
            self._emit(now, "ack")

    def _reduce(self, now: float) -> None:
        self.w_max = self.cwnd
        after = max(self.cwnd * (1.0 - self.beta), min(MIN_CWND, self.cwnd))
        self.cwnd = after
        self.ssthresh = after
        self._start_epoch(now)

    def _timeout_hook(self, now: float, cwnd_before: float) -> None:
        self.w_max = cwnd_before
        self.epoch_start = None


# --------------------------------------------------------------------------
# Pure state-transition form of Agile-SD


def agile_on_ack(state: ControllerState, params: AgileParams) -> ControllerState:
    ctl = AgileSD.from_state(state, params)
    ctl.on_ack()
    return ctl.state()


def agile_on_triple_dup_ack(state: ControllerState, params: AgileParams) -> ControllerState:
    """Apply the loss reaction; the returned state is already in fast recovery."""
    ctl = AgileSD.from_state(replace(state, phase=_unrecovered(state)), params)
    ctl.on_triple_dup_ack()
    return ctl.state()


def agile_on_timeout(state: ControllerState, params: AgileParams) -> ControllerState:
    ctl = AgileSD.from_state(state, params)
    ctl.on_timeout()
    return ctl.state()


def _unrecovered(state: ControllerState) -> Phase:
    if state.phase is not Phase.FAST_RECOVERY:
        return state.phase
    return Phase.SLOW_START if state.cwnd < state.ssthresh else Phase.CONGESTION_AVOIDANCE


# --------------------------------------------------------------------------
# Registry

CONTROLLERS = {
    "agile-sd": AgileSD,
    "newreno": NewReno,
    "cubic": Cubic,
}


def make_controller(
    name: str,
    agile: Optional[AgileParams] = None,
    timeout_ssthresh_fraction: float = 0.5,
    trace: Optional[TraceHook] = None,
) -> CongestionController:
    """Build a controller by its registry name (``agile-sd``, ``newreno``, ``cubic``)."""
    agile = agile if agile is not None else AgileParams()
    if name == "agile-sd":
        return AgileSD(agile, timeout_ssthresh_fraction=timeout_ssthresh_fraction, trace=trace)
    if name == "newreno":
        return NewReno(agile.initial_cwnd, timeout_ssthresh_fraction=timeout_ssthresh_fraction, trace=trace)
    if name == "cubic":
        return Cubic(initial_cwnd=agile.initial_cwnd, timeout_ssthresh_fraction=timeout_ssthresh_fraction, trace=trace)
    raise ValueError(f"unknown congestion controller {name!r}; choose from {sorted(CONTROLLERS)}")


__all__: Sequence[str] = [
    "MIN_CWND",
    "Phase",
    "EventKind",
    "ControllerEvent",
    "TracePoint",
    "AgileParams",
    "ControllerState",
    "gap_total",
    "gap_current",
    "agility_factor",
    "epoch_time",
    "CongestionController",
    "NewReno",
    "AgileSD",
    "Cubic",
    "agile_on_ack",
    "agile_on_triple_dup_ack",
    "agile_on_timeout",
    "CONTROLLERS",
    "make_controller",
]
