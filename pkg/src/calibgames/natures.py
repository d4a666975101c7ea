"""Adversary (nature) strategies.

A nature sees a view of the game so far plus the current forecast --
the distribution in the distribution game, the interval action in the
action games, never the current round's realized forecast -- and
commits a value v in [0, 1]. How v becomes an outcome depends on the
game: the distribution game samples y ~ Bernoulli(v), the binary action
game realizes y = 1{u < v} from the run's generator (exact 0/1 when no
generator is attached), and the bounded action game uses v directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forecasters import ForecastDistribution, IntervalAction
from .grid import Grid


@dataclass(frozen=True, eq=False)
class NatureView:
    """What a nature is allowed to see when committing its value.

    History arrays cover rounds 1..t-1 only. Exactly one of
    distribution/action is set, matching the game mode ("i", "ii", or
    "ii-bounded"). rng is the run's generator (None for unseeded runs);
    natures that use it consume draws from the same stream as the
    engine.
    """

    grid: Grid
    mode: str
    t: int
    past_realized: np.ndarray
    past_outcomes: np.ndarray
    past_params: np.ndarray
    distribution: ForecastDistribution | None
    action: IntervalAction | None
    rng: np.random.Generator | None


class Nature:
    """Base class: engines call start once, then play/observe per round."""

    name = "nature"
    modes = ("i", "ii", "ii-bounded")

    def start(self, grid: Grid) -> None:
        self.grid = grid

    def play(self, view: NatureView) -> float:
        raise NotImplementedError

    def observe(self, realized_index: int, outcome: float) -> None:
        pass


class PunisherNature(Nature):
    """Answers 1 to low forecasts and 0 to high ones.

    Forces calibration error >= 0.5 against every deterministic point
    forecaster. Defined on point forecasts; a non-degenerate
    distribution is thresholded at its mean forecast.
    """

    name = "punisher"
    modes = ("i",)

    def play(self, view: NatureView) -> float:
        return 1.0 if view.distribution.mean_forecast(view.grid) <= 0.5 else 0.0


class BernoulliNature(Nature):
    """Commits the same success probability every round."""

    modes = ("i", "ii", "ii-bounded")

    def __init__(self, p: float):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"success probability {p} outside [0, 1]")
        self.p = p
        self.name = f"bernoulli:{p}"

    def play(self, view: NatureView) -> float:
        return self.p


class MidpointNature(Nature):
    """Commits v = 1/m, the value every midpoint misses by >= epsilon."""

    name = "midpoint"
    modes = ("i", "ii", "ii-bounded")

    def play(self, view: NatureView) -> float:
        return 1.0 / view.grid.m


class ConstantNature(Nature):
    """Always the same binary outcome."""

    modes = ("i", "ii", "ii-bounded")

    def __init__(self, y: int):
        if y not in (0, 1):
            raise ValueError(f"constant nature outcome must be 0 or 1, got {y}")
        self.y = float(y)
        self.name = f"constant:{y}"

    def play(self, view: NatureView) -> float:
        return self.y


class AlternatingNature(Nature):
    """Outcomes 1, 0, 1, 0, ... from round one."""

    name = "alternating"
    modes = ("i", "ii", "ii-bounded")

    def play(self, view: NatureView) -> float:
        return 1.0 if view.t % 2 == 1 else 0.0


class GreedyNature(Nature):
    """Depth-1 adversary: maximizes the expected next-round eps-CE.

    Tracks the per-bin signed deviation sums itself (updated through
    observe) and evaluates both candidate outcomes y in {0, 1} exactly,
    taking expectations over the forecast distribution in the
    distribution game and over the realized-endpoint rule in the action
    games. Ties break toward y = 1.
    """

    name = "greedy"
    modes = ("i", "ii", "ii-bounded")

    def start(self, grid: Grid) -> None:
        super().start(grid)
        self.sums = np.zeros(grid.m)
        self.total = 0.0  # running sum of |per-bin sums|

    def observe(self, realized_index: int, outcome: float) -> None:
        s = float(self.sums[realized_index])
        s_new = s + (float(self.grid.midpoints[realized_index]) - outcome)
        self.sums[realized_index] = s_new
        self.total += abs(s_new) - abs(s)

    def _eps_ce_after(self, bin_index: int, y: float, t: int) -> float:
        s = self.sums[bin_index]
        dev = self.grid.midpoints[bin_index] - y
        ce = (self.total + abs(s + dev) - abs(s)) / t
        return max(ce - self.grid.epsilon, 0.0)

    def _realized_for(self, action: IntervalAction, v: float, bounded: bool) -> int:
        if bounded:
            return action.lo if v <= self.grid.rights[action.lo] else action.hi
        return action.hi if v == 1.0 else action.lo

    def play(self, view: NatureView) -> float:
        t = view.t
        if view.distribution is not None:
            w = view.distribution.weights
            support = view.distribution.support
            cand = []
            for y in (0.0, 1.0):
                cand.append(sum(w[b] * self._eps_ce_after(int(b), y, t) for b in support))
            return 1.0 if cand[1] >= cand[0] else 0.0
        # action games: each candidate outcome realizes at the endpoint
        # the game's rule selects for it
        bounded = view.mode == "ii-bounded"
        c0 = self._eps_ce_after(self._realized_for(view.action, 0.0, bounded), 0.0, t)
        c1 = self._eps_ce_after(self._realized_for(view.action, 1.0, bounded), 1.0, t)
        return 1.0 if c1 >= c0 else 0.0


class UniformValueNature(Nature):
    """I.i.d. uniform values from the run's generator (bounded game)."""

    name = "uniform-v"
    modes = ("ii-bounded",)

    def play(self, view: NatureView) -> float:
        if view.rng is None:
            raise ValueError("uniform-v nature needs a seeded run")
        return float(view.rng.random())


class BoundaryProbeNature(Nature):
    """Probes the realized-bin threshold of the bounded game.

    Cycles v = r_lo - delta, r_lo exactly, r_lo + delta against the
    current action, clamped to [0, 1].
    """

    modes = ("ii-bounded",)

    def __init__(self, delta: float):
        if not 0.0 <= delta <= 1.0:
            raise ValueError(f"probe offset {delta} outside [0, 1]")
        self.delta = delta
        self.name = f"boundary:{delta}"

    def play(self, view: NatureView) -> float:
        edge = float(view.grid.rights[view.action.lo])
        offset = (-self.delta, 0.0, self.delta)[(view.t - 1) % 3]
        return min(max(edge + offset, 0.0), 1.0)


NATURE_NAMES = (
    "punisher",
    "bernoulli:<p>",
    "midpoint",
    "greedy",
    "constant:<y>",
    "alternating",
    "uniform-v",
    "boundary:<delta>",
)


def make_nature(name: str) -> Nature:
    """Build a nature from its registry name."""
    if name == "punisher":
        return PunisherNature()
    if name == "midpoint":
        return MidpointNature()
    if name == "greedy":
        return GreedyNature()
    if name == "alternating":
        return AlternatingNature()
    if name == "uniform-v":
        return UniformValueNature()
    if name.startswith("bernoulli:"):
        arg = name.split(":", 1)[1]
        try:
            return BernoulliNature(float(arg))
        except ValueError:
            raise ValueError(f"bernoulli nature needs a probability, got {arg!r}") from None
    if name.startswith("constant:"):
        arg = name.split(":", 1)[1]
        try:
            return ConstantNature(int(arg))
        except ValueError:
            raise ValueError(f"constant nature needs outcome 0 or 1, got {arg!r}") from None
    if name.startswith("boundary:"):
        arg = name.split(":", 1)[1]
        try:
            return BoundaryProbeNature(float(arg))
        except ValueError:
            raise ValueError(f"boundary nature needs an offset, got {arg!r}") from None
    raise ValueError(f"unknown nature {name!r}; valid: {', '.join(NATURE_NAMES)}")
