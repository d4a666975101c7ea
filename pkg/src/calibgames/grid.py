"""Uniform forecast grids and running per-bin outcome statistics.

A grid with m bins covers [0, 1] with half-open intervals [i/m, (i+1)/m)
indexed 0..m-1; the last interval is closed at 1. Bin i has midpoint
(2i+1)/(2m), so every point of a bin lies within epsilon = 1/(2m) of its
midpoint. Forecasts are restricted to midpoints throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    """A uniform m-bin forecasting grid over [0, 1]."""

    m: int
    midpoints: np.ndarray
    lefts: np.ndarray
    rights: np.ndarray
    epsilon: float


def make_grid(m: int) -> Grid:
    """Build the uniform grid with m bins.

    Args:
        m: number of bins, at least 2 (so the half-width 1/(2m) stays below 1/2).
    """
    if m < 2:
        raise ValueError(f"grid needs at least two bins, got m={m}")
    i = np.arange(m)
    return Grid(
        m=m,
        midpoints=(2 * i + 1) / (2 * m),
        lefts=i / m,
        rights=(i + 1) / m,
        epsilon=1.0 / (2 * m),
    )


def bin_of(grid: Grid, v: float) -> int:
    """Index of the bin containing v.

    Bins are half-open to the right except the last, so boundary points
    i/m belong to bin i. Raises ValueError for v outside [0, 1].
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"value {v} outside [0, 1]")
    # compare against the stored edges so the half-open convention is
    # consistent with the floats in lefts/rights
    idx = int(np.searchsorted(grid.rights, v, side="right"))
    return min(idx, grid.m - 1)


@dataclass
class BinStats:
    """Snapshot of one bin: visit count and running outcome mean."""

    n: int
    mean: float


class CalState:
    """Per-bin visit counts and outcome sums for one game.

    An unvisited bin reports its midpoint as the mean, so deficit and
    excess are defined from round one. Each game instance owns its own
    state; nothing here is safe to share across concurrent games.
    """

    __slots__ = ("grid", "t", "counts", "totals")

    def __init__(self, grid: Grid):
        self.grid = grid
        self.t = 0
        self.counts = np.zeros(grid.m, dtype=np.int64)
        self.totals = np.zeros(grid.m, dtype=np.float64)

    def mean(self, i: int) -> float:
        if self.counts[i] == 0:
            return float(self.grid.midpoints[i])
        return float(self.totals[i]) / float(self.counts[i])

    def means(self) -> np.ndarray:
        """Vector of bin means, midpoints where unvisited."""
        out = self.grid.midpoints.copy()
        hit = self.counts > 0
        out[hit] = self.totals[hit] / self.counts[hit]
        return out

    def deficit(self, i: int) -> float:
        """Gap from the bin's left edge down to its running mean."""
        return float(self.grid.lefts[i]) - self.mean(i)

    def excess(self, i: int) -> float:
        """Overshoot of the bin's running mean past its right edge."""
        return self.mean(i) - float(self.grid.rights[i])

    def update(self, i: int, outcome: float) -> None:
        """Record an outcome in bin i."""
        if not 0 <= i < self.grid.m:
            raise ValueError(f"bin index {i} outside 0..{self.grid.m - 1}")
        if not 0.0 <= outcome <= 1.0:
            raise ValueError(f"outcome {outcome} outside [0, 1]")
        self.counts[i] += 1
        self.totals[i] += outcome
        self.t += 1

    def bin(self, i: int) -> BinStats:
        return BinStats(n=int(self.counts[i]), mean=self.mean(i))

    def copy(self) -> "CalState":
        dup = CalState.__new__(CalState)
        dup.grid = self.grid
        dup.t = self.t
        dup.counts = self.counts.copy()
        dup.totals = self.totals.copy()
        return dup
