"""Grid construction, bin lookup, and running per-bin statistics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calibgames import CalState, bin_of, make_grid


def test_make_grid_two_bins():
    grid = make_grid(2)
    assert grid.m == 2
    assert grid.epsilon == 0.25
    np.testing.assert_array_equal(grid.midpoints, [0.25, 0.75])
    np.testing.assert_array_equal(grid.lefts, [0.0, 0.5])
    np.testing.assert_array_equal(grid.rights, [0.5, 1.0])


def test_make_grid_five_bins():
    grid = make_grid(5)
    np.testing.assert_allclose(grid.midpoints, [0.1, 0.3, 0.5, 0.7, 0.9])
    assert grid.epsilon == 0.1


@pytest.mark.parametrize("m", [1, 0, -3])
def test_make_grid_rejects_degenerate_bin_counts(m):
    with pytest.raises(ValueError):
        make_grid(m)


def test_bin_of_oracles():
    assert bin_of(make_grid(2), 0.5) == 1
    assert bin_of(make_grid(5), 0.0) == 0
    assert bin_of(make_grid(5), 1.0) == 4
    assert bin_of(make_grid(5), 0.2) == 1  # boundary point belongs to the upper bin
    assert bin_of(make_grid(2), 0.49999) == 0


@pytest.mark.parametrize("v", [-0.1, 1.1, 2.0])
def test_bin_of_rejects_out_of_range(v):
    with pytest.raises(ValueError):
        bin_of(make_grid(4), v)


@given(m=st.integers(2, 30), v=st.floats(0.0, 1.0))
def test_bin_of_lands_in_its_own_interval(m, v):
    """The resolved bin contains v and v lies within epsilon of its midpoint."""
    grid = make_grid(m)
    i = bin_of(grid, v)
    assert grid.lefts[i] <= v <= grid.rights[i]
    if i < m - 1:
        assert v < grid.rights[i]
    assert abs(v - grid.midpoints[i]) <= grid.epsilon + 1e-15


def test_fresh_state_reports_midpoints():
    grid = make_grid(2)
    state = CalState(grid)
    assert state.t == 0
    np.testing.assert_array_equal(state.means(), grid.midpoints)
    assert state.mean(0) == 0.25
    # the midpoint sits strictly inside the bin, so both gaps are negative
    assert state.deficit(0) == -0.25
    assert state.excess(0) == -0.25


def test_update_trace():
    grid = make_grid(2)
    state = CalState(grid)
    state.update(0, 1.0)
    assert state.t == 1
    assert state.counts.tolist() == [1, 0]
    assert state.mean(0) == 1.0
    assert state.deficit(0) == -1.0
    assert state.excess(0) == 0.5
    # bin 1 is untouched and still reports its midpoint
    assert state.mean(1) == 0.75
    assert state.deficit(1) == -0.25
    assert state.excess(1) == -0.25
    state.update(0, 0.0)
    assert state.mean(0) == 0.5
    assert state.bin(0).n == 2
    assert state.bin(0).mean == 0.5


def test_update_validation():
    state = CalState(make_grid(3))
    with pytest.raises(ValueError):
        state.update(3, 0.5)
    with pytest.raises(ValueError):
        state.update(-1, 0.5)
    with pytest.raises(ValueError):
        state.update(0, 1.5)
    with pytest.raises(ValueError):
        state.update(0, -0.01)


def test_copy_is_independent():
    state = CalState(make_grid(2))
    state.update(0, 1.0)
    dup = state.copy()
    dup.update(1, 0.0)
    assert state.t == 1 and dup.t == 2
    assert state.counts.tolist() == [1, 0]
    assert dup.counts.tolist() == [1, 1]


updates = st.lists(
    st.tuples(st.integers(0, 3), st.floats(0.0, 1.0)), min_size=1, max_size=60
)


@settings(max_examples=200)
@given(seq=updates)
def test_deficit_plus_excess_is_constant(seq):
    """deficit + excess telescopes to -(bin width) no matter the history."""
    grid = make_grid(4)
    state = CalState(grid)
    for i, y in seq:
        state.update(i, y)
    for i in range(grid.m):
        assert state.deficit(i) + state.excess(i) == pytest.approx(-1.0 / grid.m, abs=1e-12)


@settings(max_examples=200)
@given(seq=updates, i=st.integers(0, 3), y=st.floats(0.0, 1.0))
def test_one_update_moves_the_mean_by_at_most_one_over_n(seq, i, y):
    grid = make_grid(4)
    state = CalState(grid)
    for j, out in seq:
        state.update(j, out)
    before = state.mean(i)
    state.update(i, y)
    n = int(state.counts[i])
    assert abs(state.mean(i) - before) <= 1.0 / n + 1e-12


@settings(max_examples=100)
@given(seq=updates)
def test_means_vector_matches_scalar_means(seq):
    state = CalState(make_grid(4))
    for i, y in seq:
        state.update(i, y)
    np.testing.assert_allclose(state.means(), [state.mean(i) for i in range(4)], rtol=0, atol=0)
