"""Agile-SD congestion control and a packet-level dumbbell simulator."""

from .cca import (
    AgileParams,
    AgileSD,
    CongestionController,
    ControllerEvent,
    ControllerState,
    Cubic,
    EventKind,
    NewReno,
    Phase,
    agile_on_ack,
    agile_on_timeout,
    agile_on_triple_dup_ack,
    agility_factor,
    epoch_time,
    gap_current,
    gap_total,
    make_controller,
)
from .netsim import DumbbellTopology, FlowSpec, RunResult, build_dumbbell, run

__version__ = "0.1.0"
