import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agilesd.cca import (
    AgileParams,
    AgileSD,
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

DEFAULT = AgileParams()


def ca_state(cwnd, loss=None, degraded=None):
    return ControllerState(cwnd=cwnd, ssthresh=cwnd - 1, cwnd_loss=loss,
                           cwnd_degraded=degraded, phase=Phase.CONGESTION_AVOIDANCE)


# -- params


def test_default_params():
    assert (DEFAULT.lambda_min, DEFAULT.lambda_max) == (1.0, 3.0)
    assert (DEFAULT.beta1, DEFAULT.beta2, DEFAULT.initial_cwnd) == (0.90, 0.95, 2)


@pytest.mark.parametrize("kwargs", [
    dict(lambda_min=2.0),
    dict(lambda_max=0.5),
    dict(beta1=0.99, beta2=0.95),
    dict(beta1=0.0),
    dict(beta2=1.0),
    dict(initial_cwnd=0),
])
def test_params_rejected(kwargs):
    with pytest.raises(ValueError):
        AgileParams(**kwargs)


# -- gaps and agility factor


@pytest.mark.parametrize("loss, degraded, expected", [(12, 9, 3), (5, 5, 1), (9, 12, 1)])
def test_gap_total(loss, degraded, expected):
    assert gap_total(loss, degraded) == expected


@pytest.mark.parametrize("loss, cwnd, expected", [(12, 10, 2), (12, 12, 1), (12, 14, 1)])
def test_gap_current(loss, cwnd, expected):
    assert gap_current(loss, cwnd) == expected


def test_agility_factor_examples():
    assert agility_factor(AgileParams(lambda_max=3), 7.0, 7.0) == 3.0
    assert agility_factor(AgileParams(lambda_max=3), 1.0, 1000.0) == 1.0
    # 4 * 2 / 4
    assert agility_factor(AgileParams(lambda_max=4), 2.0, 4.0) == 2.0


def test_agility_factor_clamped_above():
    assert agility_factor(AgileParams(lambda_max=3), 10.0, 2.0) == 3.0


@given(
    lmax=st.floats(1.0, 10.0),
    gt=st.floats(1.0, 1e5),
    frac=st.floats(0.0, 1.0),
)
def test_agility_factor_range(lmax, gt, frac):
    gc = max(1.0, frac * gt)
    lam = agility_factor(AgileParams(lambda_max=lmax), gc, gt)
    assert 1.0 <= lam <= lmax


@given(loss=st.floats(20.0, 1e4), drop=st.floats(0.05, 0.5), steps=st.integers(2, 50))
def test_lambda_non_increasing_towards_loss_point(loss, drop, steps):
    degraded = loss * (1 - drop)
    prev = math.inf
    for k in range(steps + 1):
        cwnd = degraded + (loss - degraded) * k / steps
        ctl = AgileSD.from_state(ca_state(cwnd, loss, degraded))
        lam = ctl.current_lambda()
        assert lam <= prev
        prev = lam


# -- on_ack


def test_agile_ca_ack_worked_example():
    out = agile_on_ack(ca_state(9.0, 12.0, 9.0), DEFAULT)
    # gap_current = 3, gap_total = 3 -> lambda = 3, alpha = 3/9
    assert out.cwnd == pytest.approx(9 + 3 / 9, rel=1e-15)
    assert out.cwnd == pytest.approx(9.3333, abs=1e-4)


@pytest.mark.parametrize("loss, degraded", [(None, None), (12.0, 9.0), (500.0, 20.0), (30.0, 29.5)])
def test_lambda_max_one_is_newreno_increment(loss, degraded):
    params = AgileParams(lambda_max=1.0)
    out = agile_on_ack(ca_state(25.0, loss, degraded), params)
    assert out.cwnd == 25.0 + 1.0 / 25.0


def test_agile_slow_start_ack():
    state = ControllerState(cwnd=4.0, ssthresh=64.0)
    out = agile_on_ack(state, DEFAULT)
    assert out.cwnd == 5.0
    assert out.phase is Phase.SLOW_START


def test_slow_start_hands_over_at_ssthresh():
    ctl = AgileSD()
    ctl.ssthresh = 5.0
    for _ in range(3):
        ctl.on_ack()
    assert ctl.cwnd == 5.0 and ctl.phase is Phase.CONGESTION_AVOIDANCE
    ctl.on_ack()
    assert 5.0 < ctl.cwnd < 6.0


def test_before_first_loss_uses_lambda_max():
    ctl = AgileSD.from_state(ca_state(10.0))
    assert ctl.current_lambda() == 3.0
    ctl.on_ack()
    assert ctl.cwnd == 10.0 + 3.0 / 10.0


def test_linear_growth_beyond_loss_point():
    # cwnd past cwnd_loss: gap_current clamps to 1
    ctl = AgileSD.from_state(ca_state(120.0, 100.0, 95.0))
    assert ctl.current_lambda() == 1.0
    ctl.on_ack()
    assert ctl.cwnd == 120.0 + 1.0 / 120.0


# -- loss and timeout reactions


def test_triple_dup_in_slow_start():
    state = ControllerState(cwnd=100.0, ssthresh=math.inf)
    out = agile_on_triple_dup_ack(state, DEFAULT)
    assert out.cwnd == pytest.approx(90.0)
    assert out.ssthresh == pytest.approx(89.0)
    assert out.cwnd_loss == 100.0
    assert out.cwnd_degraded == pytest.approx(90.0)
    assert out.phase is Phase.FAST_RECOVERY


def test_triple_dup_in_congestion_avoidance():
    out = agile_on_triple_dup_ack(ca_state(100.0), DEFAULT)
    assert out.cwnd == pytest.approx(95.0)
    assert out.ssthresh == pytest.approx(94.0)


def test_triple_dup_floor():
    out = agile_on_triple_dup_ack(ca_state(2.0), DEFAULT)
    assert out.cwnd == 2.0
    assert out.ssthresh >= 1.0
    assert out.cwnd_loss >= out.cwnd_degraded


def test_recovery_exit_returns_to_congestion_avoidance():
    ctl = AgileSD()
    ctl.cwnd = 100.0
    ctl.on_triple_dup_ack()
    assert ctl.phase is Phase.FAST_RECOVERY
    ctl.exit_recovery()
    assert ctl.phase is Phase.CONGESTION_AVOIDANCE


@pytest.mark.parametrize("cwnd, ssthresh", [(500.0, 250.0), (2.0, 2.0), (40.0, 20.0)])
def test_timeout(cwnd, ssthresh):
    out = agile_on_timeout(ca_state(cwnd, 600.0, 570.0), DEFAULT)
    assert out.cwnd == 2.0
    assert out.ssthresh == ssthresh


def test_timeout_enters_slow_start():
    out = agile_on_timeout(ca_state(500.0), DEFAULT)
    assert out.phase is Phase.SLOW_START


def test_timeout_fraction_knob():
    ctl = AgileSD(timeout_ssthresh_fraction=0.7)
    ctl.cwnd = 100.0
    ctl.on_timeout()
    assert ctl.ssthresh == pytest.approx(70.0)


@settings(max_examples=300)
@given(cwnd=st.floats(3.0, 1e5), ssthresh=st.one_of(st.just(math.inf), st.floats(2.0, 1e5)))
def test_triple_dup_postconditions(cwnd, ssthresh):
    ctl = AgileSD()
    ctl.cwnd, ctl.ssthresh = cwnd, ssthresh
    slow = cwnd < ssthresh
    ctl.on_triple_dup_ack()
    beta = 0.90 if slow else 0.95
    assert ctl.cwnd == cwnd * beta
    assert ctl.ssthresh == ctl.cwnd - 1
    assert ctl.cwnd_degraded == ctl.cwnd
    assert ctl.cwnd_loss == cwnd


# -- epoch time


def test_epoch_time_examples():
    assert epoch_time(0.020, [4, 3, 2, 1]) == pytest.approx(0.020 * (1 / 4 + 1 / 3 + 1 / 2 + 1))
    assert epoch_time(0.020, [4, 3, 2, 1]) * 1e3 == pytest.approx(41.667, abs=5e-4)
    assert epoch_time(0.020, [1, 1, 1, 1]) == pytest.approx(0.080, rel=1e-12)
    assert epoch_time(0.020, []) == 0.0


@given(rtt=st.floats(1e-4, 1.0), k=st.integers(0, 200))
def test_epoch_time_standard_tcp(rtt, k):
    assert epoch_time(rtt, [1.0] * k) == pytest.approx(k * rtt, rel=1e-12)


def test_epoch_time_rejects_bad_input():
    with pytest.raises(ValueError):
        epoch_time(0.0, [1])
    with pytest.raises(ValueError):
        epoch_time(0.02, [0.5])


# -- NewReno


def test_newreno_examples():
    ctl = NewReno()
    ctl.cwnd, ctl.ssthresh = 10.0, 5.0
    ctl.on_ack()
    assert ctl.cwnd == pytest.approx(10.1)
    ctl = NewReno()
    ctl.cwnd, ctl.ssthresh = 10.0, 5.0
    ctl.on_triple_dup_ack()
    assert ctl.cwnd == 5.0 and ctl.ssthresh == 5.0
    ctl.on_timeout()
    assert ctl.cwnd == 2.0 and ctl.phase is Phase.SLOW_START


# -- Cubic


def test_cubic_k_and_reduction():
    ctl = Cubic()
    ctl.cwnd, ctl.ssthresh = 100.0, 50.0
    ctl.on_triple_dup_ack(now=3.0)
    assert ctl.cwnd == pytest.approx(70.0)
    assert ctl.w_max == 100.0
    assert ctl.k == pytest.approx((100 * 0.3 / 0.4) ** (1 / 3), rel=1e-12)
    assert ctl.k == pytest.approx(4.217, abs=1e-3)
    assert ctl.target(3.0) == pytest.approx(70.0)
    assert ctl.target(3.0 + ctl.k) == pytest.approx(100.0)


def test_cubic_grows_towards_target():
    ctl = Cubic()
    ctl.cwnd, ctl.ssthresh = 100.0, 50.0
    ctl.on_triple_dup_ack(now=0.0)
    ctl.exit_recovery(0.0)
    # sparse ACKs keep the Reno estimate low; up to t = 4 s < K the window
    # follows the concave part of the cubic towards w_max
    now = 0.0
    for _ in range(1000):
        now += 0.004
        ctl.on_ack(1, now)
    assert ctl.w_est < 90.0
    assert 95.0 < ctl.cwnd <= ctl.target(now) + 1e-9


@settings(max_examples=100)
@given(w=st.floats(10.0, 5000.0), n=st.integers(1, 3000), dt=st.floats(1e-5, 1e-2))
def test_cubic_never_below_reno_estimate(w, n, dt):
    ctl = Cubic()
    ctl.cwnd, ctl.ssthresh = w, 1.0
    ctl.on_triple_dup_ack(0.0)
    ctl.exit_recovery(0.0)
    for k in range(n):
        ctl.on_ack(1, (k + 1) * dt)
        assert ctl.cwnd >= ctl.w_est - 1e-9


# -- contract


@pytest.mark.parametrize("name", ["agile-sd", "newreno", "cubic"])
def test_replay_is_deterministic(name):
    events = [ControllerEvent(EventKind.ACK_RECEIVED, 0.001 * k) for k in range(200)]
    events += [ControllerEvent(EventKind.TRIPLE_DUP_ACK, 0.2), ControllerEvent(EventKind.RECOVERY_EXIT, 0.21)]
    events += [ControllerEvent(EventKind.ACK_RECEIVED, 0.21 + 0.001 * k) for k in range(300)]
    events += [ControllerEvent(EventKind.TIMEOUT, 0.6)]
    events += [ControllerEvent(EventKind.ACK_RECEIVED, 0.6 + 0.001 * k) for k in range(50)]
    a = make_controller(name).replay(events)
    b = make_controller(name).replay(events)
    assert a == b
    assert min(a) >= 1.0


def test_unknown_controller():
    with pytest.raises(ValueError):
        make_controller("vegas")


def test_zero_acked_rejected():
    with pytest.raises(ValueError):
        AgileSD().apply(ControllerEvent(EventKind.ACK_RECEIVED, 0.0, 0))


def test_trace_hook():
    points = []
    ctl = AgileSD(trace=points.append)
    ctl.on_ack(1, 0.5)
    ctl.on_triple_dup_ack(0.6)
    assert [p.event for p in points] == ["ack", "triple_dup_ack"]
    p = points[-1]
    assert p.time == 0.6 and p.phase is Phase.FAST_RECOVERY
    assert p.cwnd == ctl.cwnd and p.ssthresh == ctl.ssthresh and p.lam == 3.0
