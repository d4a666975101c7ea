"""Game engines: drive one forecaster against one nature for T rounds.

All randomness flows through a single numpy Generator created from the
run's seed, with a fixed draw pattern so identical (forecaster, nature,
T, seed) inputs reproduce bit-identical transcripts:

- distribution game (play_game_i): the nature sees the forecast
  distribution and commits v before anything is sampled; the engine
  then consumes exactly two uniforms per round, the forecast
  realization first, the outcome second (y = 1{u < v}).
- binary action game (play_game_ii): with a seed, exactly one uniform
  per round realizes the outcome from the nature's v; without a seed
  the nature must commit exact 0/1 (deterministic adversaries).
- bounded action game (play_game_ii_bounded): the nature's v is the
  outcome; the realized bin is the action's low endpoint when
  v <= r_lo, else the high endpoint. A seed is only needed by natures
  that draw from the run's generator themselves.
"""

from __future__ import annotations

import numpy as np

from .forecasters import ForecastDistribution, Forecaster
from .grid import Grid
from .metrics import Transcript
from .natures import Nature, NatureView


def _sample_index(dist: ForecastDistribution, u: float) -> int:
    cum = np.cumsum(dist.weights)
    idx = int(np.searchsorted(cum, u, side="right"))
    return min(idx, len(dist.weights) - 1)


def _check_kind(forecaster: Forecaster, kind: str, game: str) -> None:
    if forecaster.kind != kind:
        raise ValueError(
            f"{forecaster.name} emits {forecaster.kind} forecasts; game {game} needs {kind} forecasts"
        )


def _check_mode(nature: Nature, mode: str) -> None:
    if mode not in nature.modes:
        raise ValueError(
            f"nature {nature.name} supports game(s) {', '.join(nature.modes)}, not {mode}"
        )


def _check_rounds(T: int) -> None:
    if T < 1:
        raise ValueError(f"need at least one round, got T={T}")


def play_game_i(
    grid: Grid, forecaster: Forecaster, nature: Nature, T: int, seed: int
) -> Transcript:
    """Distribution game: forecaster commits a distribution over
    midpoints, nature commits a Bernoulli parameter, the engine samples
    both."""
    _check_kind(forecaster, "point", "i")
    _check_mode(nature, "i")
    _check_rounds(T)
    rng = np.random.default_rng(seed)
    forecaster.start(grid)
    nature.start(grid)
    realized = np.empty(T, dtype=np.int64)
    outcomes = np.empty(T)
    params = np.empty(T)
    for t in range(1, T + 1):
        dist = forecaster.next_point(t)
        view = NatureView(
            grid=grid,
            mode="i",
            t=t,
            past_realized=realized[: t - 1],
            past_outcomes=outcomes[: t - 1],
            past_params=params[: t - 1],
            distribution=dist,
            action=None,
            rng=rng,
        )
        v = float(nature.play(view))
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"nature {nature.name} committed {v} outside [0, 1]")
        params[t - 1] = v
        idx = _sample_index(dist, rng.random())
        y = 1.0 if rng.random() < v else 0.0
        realized[t - 1] = idx
        outcomes[t - 1] = y
        forecaster.observe(idx, y, t)
        nature.observe(idx, y)
    return Transcript(
        grid=grid, action_lo=realized.copy(), action_hi=realized.copy(),
        realized=realized, outcomes=outcomes,
    )


def play_game_ii(
    grid: Grid, forecaster: Forecaster, nature: Nature, T: int, seed: int | None = None
) -> Transcript:
    """Binary action game: forecaster commits one bin or an adjacent
    pair, nature answers with a binary outcome (possibly randomized
    through the run's generator), and the outcome selects the realized
    endpoint (1 -> high, 0 -> low)."""
    _check_kind(forecaster, "interval", "ii")
    _check_mode(nature, "ii")
    _check_rounds(T)
    rng = np.random.default_rng(seed) if seed is not None else None
    forecaster.start(grid)
    nature.start(grid)
    action_lo = np.empty(T, dtype=np.int64)
    action_hi = np.empty(T, dtype=np.int64)
    realized = np.empty(T, dtype=np.int64)
    outcomes = np.empty(T)
    params = np.empty(T)
    for t in range(1, T + 1):
        act = forecaster.next_interval(t)
        view = NatureView(
            grid=grid,
            mode="ii",
            t=t,
            past_realized=realized[: t - 1],
            past_outcomes=outcomes[: t - 1],
            past_params=params[: t - 1],
            distribution=None,
            action=act,
            rng=rng,
        )
        v = float(nature.play(view))
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"nature {nature.name} committed {v} outside [0, 1]")
        params[t - 1] = v
        if rng is not None:
            y = 1.0 if rng.random() < v else 0.0
        elif v in (0.0, 1.0):
            y = v
        else:
            raise ValueError(
                f"nature {nature.name} committed fractional {v} in an unseeded binary game"
            )
        idx = act.hi if y == 1.0 else act.lo
        action_lo[t - 1] = act.lo
        action_hi[t - 1] = act.hi
        realized[t - 1] = idx
        outcomes[t - 1] = y
        forecaster.observe(idx, y, t)
        nature.observe(idx, y)
    return Transcript(
        grid=grid, action_lo=action_lo, action_hi=action_hi,
        realized=realized, outcomes=outcomes,
    )


def play_game_ii_bounded(
    grid: Grid, forecaster: Forecaster, nature: Nature, T: int, seed: int | None = None
) -> Transcript:
    """Bounded action game: the nature's committed value is the outcome
    itself; the realized bin is the action's low endpoint exactly when
    the outcome does not exceed its right edge."""
    _check_kind(forecaster, "interval", "ii-bounded")
    _check_mode(nature, "ii-bounded")
    _check_rounds(T)
    rng = np.random.default_rng(seed) if seed is not None else None
    forecaster.start(grid)
    nature.start(grid)
    action_lo = np.empty(T, dtype=np.int64)
    action_hi = np.empty(T, dtype=np.int64)
    realized = np.empty(T, dtype=np.int64)
    outcomes = np.empty(T)
    for t in range(1, T + 1):
        act = forecaster.next_interval(t)
        view = NatureView(
            grid=grid,
            mode="ii-bounded",
            t=t,
            past_realized=realized[: t - 1],
            past_outcomes=outcomes[: t - 1],
            past_params=outcomes[: t - 1],
            distribution=None,
            action=act,
            rng=rng,
        )
        v = float(nature.play(view))
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"nature {nature.name} committed {v} outside [0, 1]")
        idx = act.lo if v <= grid.rights[act.lo] else act.hi
        action_lo[t - 1] = act.lo
        action_hi[t - 1] = act.hi
        realized[t - 1] = idx
        outcomes[t - 1] = v
        forecaster.observe(idx, v, t)
        nature.observe(idx, v)
    return Transcript(
        grid=grid, action_lo=action_lo, action_hi=action_hi,
        realized=realized, outcomes=outcomes,
    )


GAME_NAMES = ("i", "ii", "ii-bounded")


def play(
    game: str, grid: Grid, forecaster: Forecaster, nature: Nature, T: int,
    seed: int | None = None,
) -> Transcript:
    """Dispatch on the game name."""
    if game == "i":
        if seed is None:
            raise ValueError("the distribution game always samples and needs a seed")
        return play_game_i(grid, forecaster, nature, T, seed)
    if game == "ii":
        return play_game_ii(grid, forecaster, nature, T, seed)
    if game == "ii-bounded":
        return play_game_ii_bounded(grid, forecaster, nature, T, seed)
    raise ValueError(f"unknown game {game!r}; valid: {', '.join(GAME_NAMES)}")
