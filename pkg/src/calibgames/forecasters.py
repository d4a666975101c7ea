"""Forecasting strategies.

The deterministic interval strategy and the randomized point strategies
all revolve around one dichotomy over the running bin statistics. For
bin i with left edge l_i, right edge r_i and running mean p_i, define

    deficit(i) = l_i - p_i      excess(i) = p_i - r_i.

Either some bin's mean lies inside its own interval (condition A: both
quantities <= 0), or some adjacent pair brackets a crossing (condition
B: excess(i) > 0 and deficit(i+1) > 0). Exactly one qualifying index is
needed per round; ties are broken toward the smallest index by default,
and every guarantee is tie-break independent.

Pure decision functions (state in, action out) sit next to thin
stateful wrapper classes that the game engines drive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import CalState, Grid

TIE_BREAKS = ("smallest", "largest")


@dataclass(frozen=True)
class IntervalAction:
    """An interval forecast: one bin, or two adjacent bins."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (self.hi == self.lo or self.hi == self.lo + 1):
            raise ValueError(
                f"interval action must span one bin or two adjacent bins, got ({self.lo}, {self.hi})"
            )

    @property
    def degenerate(self) -> bool:
        return self.hi == self.lo


@dataclass(frozen=True, eq=False)
class ForecastDistribution:
    """Probability distribution over point forecasts (bin midpoints)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("weights must be a nonempty vector")
        if (w < -1e-12).any():
            raise ValueError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {float(w.sum())!r}")

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights)

    def mean_forecast(self, grid: Grid) -> float:
        return float(np.dot(self.weights, grid.midpoints))


def point_mass(m: int, i: int) -> ForecastDistribution:
    if not 0 <= i < m:
        raise ValueError(f"bin index {i} outside 0..{m - 1}")
    w = np.zeros(m)
    w[i] = 1.0
    return ForecastDistribution(w)


def two_point(m: int, i: int, j: int, wi: float) -> ForecastDistribution:
    w = np.zeros(m)
    w[i] += wi
    w[j] += 1.0 - wi
    return ForecastDistribution(w)


def _scan_order(m: int, tie_break: str) -> range:
    if tie_break == "smallest":
        return range(m)
    if tie_break == "largest":
        return range(m - 1, -1, -1)
    raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")


def condition_a_index(state: CalState, tie_break: str = "smallest") -> int | None:
    """A bin whose running mean lies inside its own interval, or None."""
    grid = state.grid
    for i in _scan_order(grid.m, tie_break):
        p = state.mean(i)
        if grid.lefts[i] <= p <= grid.rights[i]:
            return i
    return None


def condition_b_index(state: CalState, tie_break: str = "smallest") -> int | None:
    """An adjacent pair bracketing a crossing: excess(i) > 0 and deficit(i+1) > 0."""
    grid = state.grid
    order = _scan_order(grid.m - 1, tie_break)
    for i in order:
        if state.mean(i) > grid.rights[i] and state.mean(i + 1) < grid.lefts[i + 1]:
            return i
    return None


def potential(state: CalState, i: int) -> float:
    """N_i * max(deficit(i), excess(i)); stays <= 1 under the interval strategy."""
    n = int(state.counts[i])
    if n == 0:
        return 0.0
    return n * max(state.deficit(i), state.excess(i))


def potc_cal_next(state: CalState, tie_break: str = "smallest") -> IntervalAction:
    """Next action of the deterministic interval strategy.

    Play (i, i) on a condition-A bin when one exists (a fresh state
    always has one, since unvisited bins report their midpoint), else
    play the bracketing pair (i, i+1) from condition B. The dichotomy
    guarantees one of the two branches fires.
    """
    i = condition_a_index(state, tie_break)
    if i is not None:
        return IntervalAction(i, i)
    i = condition_b_index(state, tie_break)
    if i is not None:
        return IntervalAction(i, i + 1)
    raise RuntimeError("no playable action: deficit/excess dichotomy violated")


def foster99_weights(state: CalState, i: int) -> tuple[float, float]:
    """Mixing weights over bins (i, i+1) at a condition-B index.

    Weighted so the expected per-bin drifts cancel:
    u_i * N_i * excess(i) = u_{i+1} * N_{i+1} * deficit(i+1).
    """
    w = float(state.counts[i + 1]) * state.deficit(i + 1)
    z = float(state.counts[i]) * state.excess(i)
    if w + z <= 0.0:
        # degenerate guard; unreachable at a genuine condition-B index
        return 0.5, 0.5
    return w / (w + z), z / (w + z)


def foster99_next(state: CalState, tie_break: str = "smallest") -> ForecastDistribution:
    """Next forecast distribution of the randomized point strategy.

    Point mass on a condition-A bin when one exists, else the
    drift-cancelling mixture over the condition-B pair.
    """
    m = state.grid.m
    i = condition_a_index(state, tie_break)
    if i is not None:
        return point_mass(m, i)
    i = condition_b_index(state, tie_break)
    if i is None:
        raise RuntimeError("no playable action: deficit/excess dichotomy violated")
    wi, _ = foster99_weights(state, i)
    return two_point(m, i, i + 1, wi)


# --- doubling schedule for the horizon-free point strategy ---


@dataclass(frozen=True)
class DoublingSchedule:
    """Epoch bookkeeping for the horizon-free point strategy.

    Epoch k >= 0 covers rounds ((2^k - 1) * t0, (2^(k+1) - 1) * t0], so
    it lasts exactly T_k = 2^k * t0 rounds, and restarts the strategy
    from scratch; its first m * K_k rounds initialize each bin in turn
    with K_k visits, where K_k is computed from the epoch's own length
    T_k. kk_scale multiplies c1 to make desk-scale experiments feasible
    (the default constants put K_k in the 10^4..10^6 range).
    """

    grid: Grid
    t0: int = 1000
    c1: float = 0.85
    c2: float = 0.72
    c3: float = 5.2
    kk_scale: float = 1.0

    def __post_init__(self):
        if self.t0 < 6:
            raise ValueError(f"t0 must be at least 6 so the count formula is defined, got {self.t0}")
        if self.kk_scale <= 0:
            raise ValueError(f"kk_scale must be positive, got {self.kk_scale}")

    def epoch_length(self, k: int) -> int:
        """T_k = 2^k * t0."""
        return (1 << k) * self.t0

    def cumulative(self, k: int) -> int:
        """Rounds played before epoch k starts: (2^k - 1) * t0."""
        return ((1 << k) - 1) * self.t0

    def epoch_of(self, t: int) -> int:
        """The k >= 0 with cumulative(k) < t <= cumulative(k + 1)."""
        if t < 1:
            raise ValueError(f"round index must be >= 1, got {t}")
        k = 0
        while self.cumulative(k + 1) < t:
            k += 1
        return k

    def k_k_raw(self, k: int) -> float:
        """Per-bin initialization count before rounding up."""
        tk = float(self.epoch_length(k))
        c1 = self.c1 * self.kk_scale
        eps = self.grid.epsilon
        return (c1 * math.log(tk) / eps) ** 2 * (
            math.log(math.log(tk / 2.0)) + self.c2 * math.log(self.c3 * self.grid.m * tk**2)
        )

    def k_k(self, k: int) -> int:
        """Per-bin initialization count K_k for epoch k."""
        return math.ceil(self.k_k_raw(k))


def pi_f99_next(
    state: CalState, schedule: DoublingSchedule, t: int, tie_break: str = "smallest"
) -> ForecastDistribution:
    """Next forecast of the horizon-free strategy at global round t.

    state must hold only the current epoch's observations. During the
    epoch's initialization phase the forecast is a point mass cycling
    through the bins, K_k rounds each; afterwards it defers to the
    drift-cancelling strategy on the epoch-local state.
    """
    k = schedule.epoch_of(t)
    tau = t - schedule.cumulative(k)
    kk = schedule.k_k(k)
    m = schedule.grid.m
    if tau <= m * kk:
        return point_mass(m, (tau - 1) // kk)
    return foster99_next(state, tie_break)


# --- stateful wrappers driven by the engines ---


class Forecaster:
    """Base class: engines call start once, then next_*/observe per round."""

    kind = "point"  # or "interval"
    name = "forecaster"

    def start(self, grid: Grid) -> None:
        self.grid = grid

    def next_point(self, t: int) -> ForecastDistribution:
        raise NotImplementedError(f"{self.name} does not emit point forecasts")

    def next_interval(self, t: int) -> IntervalAction:
        raise NotImplementedError(f"{self.name} does not emit interval forecasts")

    def observe(self, realized_index: int, outcome: float, t: int) -> None:
        pass


class PotcCalForecaster(Forecaster):
    """Deterministic interval strategy with the m/T exact-calibration bound."""

    kind = "interval"
    name = "potc-cal"

    def __init__(self, tie_break: str = "smallest"):
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
        self.tie_break = tie_break

    def start(self, grid: Grid) -> None:
        super().start(grid)
        self.state = CalState(grid)

    def next_interval(self, t: int) -> IntervalAction:
        return potc_cal_next(self.state, self.tie_break)

    def observe(self, realized_index: int, outcome: float, t: int) -> None:
        self.state.update(realized_index, outcome)


class Foster99Forecaster(Forecaster):
    """Randomized point strategy with the classical 1/sqrt(T) decay."""

    name = "foster99"

    def __init__(self, tie_break: str = "smallest"):
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
        self.tie_break = tie_break

    def start(self, grid: Grid) -> None:
        super().start(grid)
        self.state = CalState(grid)

    def next_point(self, t: int) -> ForecastDistribution:
        return foster99_next(self.state, self.tie_break)

    def observe(self, realized_index: int, outcome: float, t: int) -> None:
        self.state.update(realized_index, outcome)


class PiF99Forecaster(Forecaster):
    """Horizon-free point strategy: doubling epochs around foster99."""

    name = "pi-f99"

    def __init__(
        self,
        t0: int = 1000,
        c1: float = 0.85,
        c2: float = 0.72,
        c3: float = 5.2,
        kk_scale: float = 1.0,
        tie_break: str = "smallest",
    ):
        self.t0 = t0
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3
        self.kk_scale = kk_scale
        self.tie_break = tie_break

    def start(self, grid: Grid) -> None:
        super().start(grid)
        self.schedule = DoublingSchedule(
            grid, t0=self.t0, c1=self.c1, c2=self.c2, c3=self.c3, kk_scale=self.kk_scale
        )
        self._epoch = 0
        self.state = CalState(grid)

    def next_point(self, t: int) -> ForecastDistribution:
        k = self.schedule.epoch_of(t)
        if k != self._epoch:
            # epoch boundary: restart from scratch
            self._epoch = k
            self.state = CalState(self.grid)
        return pi_f99_next(self.state, self.schedule, t, self.tie_break)

    def observe(self, realized_index: int, outcome: float, t: int) -> None:
        self.state.update(realized_index, outcome)


class ConstantForecaster(Forecaster):
    """Always forecasts the same bin midpoint."""

    def __init__(self, i: int):
        self.i = i
        self.name = f"constant:{i}"

    def start(self, grid: Grid) -> None:
        if not 0 <= self.i < grid.m:
            raise ValueError(f"bin index {self.i} outside 0..{grid.m - 1}")
        super().start(grid)

    def next_point(self, t: int) -> ForecastDistribution:
        return point_mass(self.grid.m, self.i)


class UniformForecaster(Forecaster):
    """Uniform random bin midpoint each round (randomized baseline)."""

    name = "uniform"

    def next_point(self, t: int) -> ForecastDistribution:
        return ForecastDistribution(np.full(self.grid.m, 1.0 / self.grid.m))


FORECASTER_NAMES = ("potc-cal", "foster99", "pi-f99", "constant:<i>", "uniform")


def make_forecaster(
    name: str,
    t0: int = 1000,
    kk_scale: float = 1.0,
    tie_break: str = "smallest",
) -> Forecaster:
    """Build a forecaster from its registry name.

    Schedule options (t0, kk_scale) only affect pi-f99.
    """
    if name == "potc-cal":
        return PotcCalForecaster(tie_break)
    if name == "foster99":
        return Foster99Forecaster(tie_break)
    if name == "pi-f99":
        return PiF99Forecaster(t0=t0, kk_scale=kk_scale, tie_break=tie_break)
    if name == "uniform":
        return UniformForecaster()
    if name.startswith("constant:"):
        arg = name.split(":", 1)[1]
        try:
            return ConstantForecaster(int(arg))
        except ValueError:
            raise ValueError(f"constant forecaster needs an integer bin index, got {arg!r}") from None
    raise ValueError(f"unknown forecaster {name!r}; valid: {', '.join(FORECASTER_NAMES)}")
