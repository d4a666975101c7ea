"""Forecasting strategies: the interval strategy, the randomized point
strategies, and the doubling-epoch schedule around them."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calibgames import (
    CalState,
    DoublingSchedule,
    ForecastDistribution,
    IntervalAction,
    condition_a_index,
    condition_b_index,
    foster99_next,
    foster99_weights,
    make_forecaster,
    make_grid,
    pi_f99_next,
    point_mass,
    potc_cal_next,
    potential,
    two_point,
)
from calibgames.forecasters import PiF99Forecaster


# --- actions and distributions ---


def test_interval_action_validation():
    assert IntervalAction(3, 3).degenerate
    assert not IntervalAction(3, 4).degenerate
    with pytest.raises(ValueError):
        IntervalAction(0, 2)
    with pytest.raises(ValueError):
        IntervalAction(2, 1)


def test_forecast_distribution_validation():
    d = ForecastDistribution(np.array([0.25, 0.75]))
    assert d.support.tolist() == [0, 1]
    assert d.mean_forecast(make_grid(2)) == pytest.approx(0.625)
    with pytest.raises(ValueError):
        ForecastDistribution(np.array([0.5, 0.4]))
    with pytest.raises(ValueError):
        ForecastDistribution(np.array([-0.1, 1.1]))
    with pytest.raises(ValueError):
        ForecastDistribution(np.array([]))


def test_point_mass_and_two_point():
    np.testing.assert_array_equal(point_mass(3, 1).weights, [0, 1, 0])
    np.testing.assert_allclose(two_point(3, 0, 1, 0.25).weights, [0.25, 0.75, 0])
    with pytest.raises(ValueError):
        point_mass(3, 3)


# --- the deficit/excess dichotomy ---


def test_fresh_state_satisfies_condition_a_everywhere():
    state = CalState(make_grid(3))
    assert condition_a_index(state) == 0
    assert condition_a_index(state, "largest") == 2
    assert condition_b_index(state) is None


def test_condition_b_after_opposite_drifts():
    state = CalState(make_grid(2))
    state.update(0, 1.0)  # bin 0 mean 1.0, above its right edge
    state.update(1, 0.0)  # bin 1 mean 0.0, below its left edge
    assert condition_a_index(state) is None
    assert condition_b_index(state) == 0


def test_interval_strategy_trace():
    """First three actions on the two-bin grid against outcomes 1, 0."""
    state = CalState(make_grid(2))
    actions = []
    for y in (1.0, 0.0):
        act = potc_cal_next(state)
        actions.append((act.lo, act.hi))
        realized = act.hi if y == 1.0 else act.lo
        state.update(realized, y)
    act = potc_cal_next(state)
    actions.append((act.lo, act.hi))
    assert actions == [(0, 0), (1, 1), (0, 1)]


@settings(max_examples=300)
@given(
    seq=st.lists(st.tuples(st.integers(0, 4), st.floats(0.0, 1.0)), max_size=80),
    tie=st.sampled_from(["smallest", "largest"]),
)
def test_dichotomy_always_yields_an_action(seq, tie):
    """Whatever the history, condition A or condition B fires."""
    state = CalState(make_grid(5))
    for i, y in seq:
        state.update(i, y)
    act = potc_cal_next(state, tie)
    a = condition_a_index(state, tie)
    if a is not None:
        assert act.lo == act.hi == a
    else:
        b = condition_b_index(state, tie)
        assert b is not None
        assert (act.lo, act.hi) == (b, b + 1)


def test_invalid_tie_break_rejected():
    state = CalState(make_grid(2))
    with pytest.raises(ValueError):
        potc_cal_next(state, "random")


@pytest.mark.parametrize("tie", ["smallest", "largest"])
def test_potential_stays_at_most_one_under_interval_play(tie):
    """Drive the interval strategy with adversarial binary outcomes.

    The outcome always realizes the endpoint that the potential
    argument charges, and no bin's potential ever exceeds 1.
    """
    grid = make_grid(3)
    state = CalState(grid)
    rng = np.random.default_rng(42)
    for _ in range(600):
        act = potc_cal_next(state, tie)
        y = float(rng.integers(0, 2))
        realized = act.hi if y == 1.0 else act.lo
        state.update(realized, y)
        worst = max(potential(state, i) for i in range(grid.m))
        assert worst <= 1.0 + 1e-12


def test_potential_fresh_state_is_zero():
    state = CalState(make_grid(4))
    assert all(potential(state, i) == 0.0 for i in range(4))


# --- randomized point strategy ---


def test_foster_weights_oracle():
    state = CalState(make_grid(2))
    state.update(0, 1.0)  # N=1, excess 0.5
    state.update(1, 0.0)
    state.update(1, 0.0)  # N=2, deficit 0.5
    w0, w1 = foster99_weights(state, 0)
    assert (w0, w1) == pytest.approx((2 / 3, 1 / 3))
    dist = foster99_next(state)
    np.testing.assert_allclose(dist.weights, [2 / 3, 1 / 3])


def test_foster_weights_guard_on_degenerate_input():
    # not a condition-B index; the defensive branch splits evenly
    assert foster99_weights(CalState(make_grid(2)), 0) == (0.5, 0.5)


def test_foster_point_mass_under_condition_a():
    dist = foster99_next(CalState(make_grid(3)))
    np.testing.assert_array_equal(dist.weights, [1, 0, 0])


@settings(max_examples=300)
@given(seq=st.lists(st.tuples(st.integers(0, 4), st.floats(0.0, 1.0)), max_size=80))
def test_foster_mixture_cancels_expected_drift(seq):
    """At a condition-B pair the expected one-round drifts cancel:
    u_i N_i excess(i) equals u_{i+1} N_{i+1} deficit(i+1)."""
    state = CalState(make_grid(5))
    for i, y in seq:
        state.update(i, y)
    b = condition_b_index(state)
    if b is None:
        return
    wi, wj = foster99_weights(state, b)
    assert wi + wj == pytest.approx(1.0, abs=1e-12)
    assert 0.0 <= wi <= 1.0
    lhs = wi * float(state.counts[b]) * state.excess(b)
    rhs = wj * float(state.counts[b + 1]) * state.deficit(b + 1)
    assert lhs == pytest.approx(rhs, abs=1e-12)


# --- doubling schedule ---


def test_schedule_epoch_arithmetic():
    sched = DoublingSchedule(make_grid(5), t0=1000)
    assert [sched.epoch_length(k) for k in range(4)] == [1000, 2000, 4000, 8000]
    assert [sched.cumulative(k) for k in range(4)] == [0, 1000, 3000, 7000]
    assert sched.epoch_of(1) == 0
    assert sched.epoch_of(1000) == 0
    assert sched.epoch_of(1001) == 1
    assert sched.epoch_of(3000) == 1
    assert sched.epoch_of(3001) == 2
    with pytest.raises(ValueError):
        sched.epoch_of(0)


def test_schedule_validation():
    with pytest.raises(ValueError):
        DoublingSchedule(make_grid(5), t0=5)
    with pytest.raises(ValueError):
        DoublingSchedule(make_grid(5), t0=1000, kk_scale=0.0)


def test_per_bin_count_regression():
    sched = DoublingSchedule(make_grid(5), t0=1000)
    assert sched.k_k_raw(0) == pytest.approx(48679.1910256771, abs=1e-6)
    assert sched.k_k(0) == 48680


def test_kk_scale_scales_the_raw_count_quadratically():
    full = DoublingSchedule(make_grid(5), t0=1000)
    tenth = DoublingSchedule(make_grid(5), t0=1000, kk_scale=0.1)
    assert tenth.k_k_raw(0) == pytest.approx(0.01 * full.k_k_raw(0), rel=1e-12)
    assert tenth.k_k(0) == 487
    counts = [tenth.k_k(k) for k in range(5)]
    assert counts == [487, 636, 812, 1016, 1252]
    assert counts == sorted(counts)  # longer epochs initialize more heavily


def test_initialization_slots():
    """kk_scale 0.01 gives K_0 = 5 on the five-bin grid, so the first
    epoch's init phase is rounds 1..25, five rounds per bin."""
    grid = make_grid(5)
    sched = DoublingSchedule(grid, t0=1000, kk_scale=0.01)
    assert sched.k_k(0) == 5
    state = CalState(grid)
    assert pi_f99_next(state, sched, 1).support.tolist() == [0]
    assert pi_f99_next(state, sched, 5).support.tolist() == [0]
    assert pi_f99_next(state, sched, 6).support.tolist() == [1]
    assert pi_f99_next(state, sched, 25).support.tolist() == [4]
    # past the init phase the strategy defers to the drift-cancelling one
    state.update(0, 1.0)
    state.update(1, 0.0)
    np.testing.assert_array_equal(
        pi_f99_next(state, sched, 26).weights, foster99_next(state).weights
    )


def test_second_epoch_uses_its_own_count():
    grid = make_grid(5)
    sched = DoublingSchedule(grid, t0=1000, kk_scale=0.01)
    k1 = sched.k_k(1)
    assert k1 == 7
    state = CalState(grid)
    # round 1001 opens epoch 1; slots advance every k1 rounds
    assert pi_f99_next(state, sched, 1001).support.tolist() == [0]
    assert pi_f99_next(state, sched, 1000 + k1).support.tolist() == [0]
    assert pi_f99_next(state, sched, 1001 + k1).support.tolist() == [1]
    assert pi_f99_next(state, sched, 1000 + 5 * k1).support.tolist() == [4]


def test_epoch_wrapper_restarts_from_scratch():
    grid = make_grid(5)
    fc = PiF99Forecaster(t0=1000, kk_scale=0.01)
    fc.start(grid)
    rng = np.random.default_rng(3)
    for t in range(1, 1001):
        dist = fc.next_point(t)
        idx = int(dist.support[int(rng.integers(0, len(dist.support)))])
        fc.observe(idx, float(rng.integers(0, 2)), t)
    assert fc.state.t == 1000
    dist = fc.next_point(1001)
    # fresh epoch: state dropped, init phase restarts at bin 0
    assert fc.state.t == 0
    assert dist.support.tolist() == [0]


# --- registry ---


def test_make_forecaster_names():
    assert make_forecaster("potc-cal").name == "potc-cal"
    assert make_forecaster("foster99").kind == "point"
    assert make_forecaster("pi-f99", t0=2000, kk_scale=0.5).t0 == 2000
    assert make_forecaster("constant:3").name == "constant:3"
    assert make_forecaster("uniform").name == "uniform"


def test_make_forecaster_errors():
    with pytest.raises(ValueError, match="potc-cal"):
        make_forecaster("nope")
    with pytest.raises(ValueError):
        make_forecaster("constant:x")
    with pytest.raises(ValueError):
        make_forecaster("potc-cal", tie_break="middle")


def test_constant_forecaster_checks_range_at_start():
    fc = make_forecaster("constant:9")
    with pytest.raises(ValueError):
        fc.start(make_grid(5))


def test_uniform_forecaster_distribution():
    fc = make_forecaster("uniform")
    fc.start(make_grid(4))
    np.testing.assert_allclose(fc.next_point(1).weights, [0.25] * 4)
