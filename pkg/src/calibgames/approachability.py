"""Direction games behind the calibration guarantee.

Fix a direction vector q over the m bins. One round of play gives the
forecaster (choosing a distribution u over bins) payoff

    f(u, v) = sum_i u_i q_i (M_i - v) - eps * ||q||_inf

against nature's v in [0, 1]. Calibration within the slack eps is
possible precisely when every such game has nonpositive value for the
forecaster moving first:

- val_mixed: min over mixed u of max over v (the inner max sits at
  v in {0, 1} since f is linear in v). Solved exactly by enumerating
  the basic optimal candidates: every optimal vertex has support of
  size at most two, and on a support pair the optimum is either an
  endpoint (point mass) or the equalizer of the two pure responses.
- val_pure: both sides pure (min over bins of max over v in {0, 1}).
- val_star: both sides pure but restricted to the supports/responses
  that are optimal in the mixed game.

A fixed mixture of the last two bins witnesses the gap between the
mixed and restricted-pure values for q = (-1, ..., -1, 1); the
halfspace witness constructs, for any q, a u with f(u, v) <= 0 for all
v by direct case analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .forecasters import ForecastDistribution, point_mass, two_point
from .grid import Grid, bin_of

SOLVE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DirectionGame:
    """A direction vector q paired with its grid."""

    grid: Grid
    q: np.ndarray


def direction_game(grid: Grid, q) -> DirectionGame:
    arr = np.asarray(q, dtype=np.float64)
    if arr.shape != (grid.m,):
        raise ValueError(f"direction vector must have length {grid.m}, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("direction vector must be finite")
    return DirectionGame(grid=grid, q=arr)


def objective(game: DirectionGame, u: np.ndarray, v: float) -> float:
    """f(u, v) for one play of the direction game."""
    q = game.q
    slack = game.grid.epsilon * float(np.abs(q).max(initial=0.0))
    return float(np.dot(u, q * (game.grid.midpoints - v))) - slack


@dataclass(frozen=True, eq=False)
class GameSolution:
    """Value, an optimal forecaster mixture, and nature's best responses.

    best_outcomes lists the endpoint responses attaining the inner max
    at the returned strategy; nature_indifferent means the payoff does
    not depend on v at all, so every v in [0, 1] is a best response.
    """

    value: float
    strategy: np.ndarray
    best_outcomes: tuple[int, ...]
    nature_indifferent: bool


def _candidates(game: DirectionGame):
    """Basic optimal candidates: point masses and equalized sign-change pairs.

    Yields (raw_value, u) with raw_value = max(f0(u), f1(u)) before the
    eps * ||q||_inf slack is subtracted; f_v is the payoff against the
    pure response v.
    """
    grid, q = game.grid, game.q
    m = grid.m
    g0 = q * grid.midpoints
    g1 = q * (grid.midpoints - 1.0)
    for i in range(m):
        u = np.zeros(m)
        u[i] = 1.0
        yield max(g0[i], g1[i]), u
    for i in range(m):
        for j in range(i + 1, m):
            if q[i] * q[j] < 0.0:
                # the unique mixture where the two pure responses tie:
                # wi*q_i + (1-wi)*q_j = 0
                wi = q[j] / (q[j] - q[i])
                u = np.zeros(m)
                u[i] = wi
                u[j] = 1.0 - wi
                yield wi * g0[i] + (1.0 - wi) * g0[j], u


def _responses_at(game: DirectionGame, u: np.ndarray, tol: float):
    """Best pure responses for nature at u, plus the indifference flag."""
    q = game.q
    f0 = float(np.dot(u, q * game.grid.midpoints))
    f1 = f0 - float(np.dot(u, q))
    top = max(f0, f1)
    best = tuple(y for y, f in ((0, f0), (1, f1)) if f >= top - tol)
    return best, abs(f0 - f1) <= tol


def val_mixed(game: DirectionGame, tol: float = SOLVE_TOL) -> GameSolution:
    """Exact value of the mixed game, with an optimal strategy.

    Cross-checked internally against the halfspace witness: the
    enumerated value can never exceed the witness's payoff, and the
    witness certifies the value is nonpositive.
    """
    slack = game.grid.epsilon * float(np.abs(game.q).max(initial=0.0))
    best_raw, best_u = None, None
    for raw, u in _candidates(game):
        if best_raw is None or raw < best_raw:
            best_raw, best_u = raw, u
    value = best_raw - slack
    witness = halfspace_witness(game)
    witness_value = max(objective(game, witness.weights, 0.0), objective(game, witness.weights, 1.0))
    if value > witness_value + tol or witness_value > tol:
        raise RuntimeError(
            f"direction game solver inconsistency: value {value}, witness payoff {witness_value}"
        )
    best, indifferent = _responses_at(game, best_u, tol)
    return GameSolution(
        value=value, strategy=best_u, best_outcomes=best, nature_indifferent=indifferent
    )


def val_pure(game: DirectionGame) -> float:
    """Value when both sides play pure: min over bins, max over {0, 1}."""
    grid, q = game.grid, game.q
    slack = grid.epsilon * float(np.abs(q).max(initial=0.0))
    cells = np.maximum(q * grid.midpoints, q * (grid.midpoints - 1.0))
    return float(cells.min()) - slack


def optimal_supports(game: DirectionGame, tol: float = SOLVE_TOL):
    """Bins and responses active across the optimal basic candidates.

    Returns (x_star, y_star): the union of supports over all optimal
    candidates of the mixed game, and the union of best pure responses
    at those candidates (both endpoints when a candidate leaves nature
    indifferent). Optimal mixtures that are not basic candidates could
    in principle enlarge x_star; the enumeration here covers every
    optimal vertex of the underlying program.
    """
    found = list(_candidates(game))
    best_raw = min(raw for raw, _ in found)
    x_star: set[int] = set()
    y_star: set[int] = set()
    for raw, u in found:
        if raw <= best_raw + tol:
            x_star.update(int(b) for b in np.flatnonzero(u > tol))
            best, _ = _responses_at(game, u, tol)
            y_star.update(best)
    return tuple(sorted(x_star)), tuple(sorted(y_star))


def val_star(game: DirectionGame, x_star=None, y_star=None) -> float:
    """Pure-vs-pure value restricted to the mixed game's optimal supports."""
    if x_star is None or y_star is None:
        x_star, y_star = optimal_supports(game)
    if not x_star or not y_star:
        raise ValueError("restricted game needs nonempty supports")
    grid, q = game.grid, game.q
    slack = grid.epsilon * float(np.abs(q).max(initial=0.0))
    return min(max(q[i] * (grid.midpoints[i] - y) for y in y_star) for i in x_star) - slack


def halfspace_witness(game: DirectionGame) -> ForecastDistribution:
    """A mixture with payoff <= 0 against every v, by case analysis.

    Cases, in order: a zero coordinate takes a point mass; q_0 > 0
    points at bin 0; q_{m-1} < 0 points at the last bin; otherwise some
    adjacent sign change q_j < 0 < q_{j+1} exists and the mixture
    (|q_{j+1}|, |q_j|)/(|q_j| + |q_{j+1}|) cancels the v-dependence.
    """
    q = game.q
    m = game.grid.m
    zero = np.flatnonzero(q == 0.0)
    if len(zero):
        return point_mass(m, int(zero[0]))
    if q[0] > 0.0:
        return point_mass(m, 0)
    if q[m - 1] < 0.0:
        return point_mass(m, m - 1)
    # q_0 < 0 and q_{m-1} > 0 with no zeros: an adjacent sign change exists
    for j in range(m - 1):
        if q[j] < 0.0 < q[j + 1]:
            wj = abs(q[j + 1]) / (abs(q[j]) + abs(q[j + 1]))
            return two_point(m, j, j + 1, wj)
    raise RuntimeError("sign-change case analysis failed")  # unreachable


def response_satisfy(grid: Grid, v: float) -> ForecastDistribution:
    """Point forecast whose expected reward already sits in the slack ball.

    Forecasting the midpoint of v's own bin leaves a one-round expected
    reward of l1 norm |M_i - v| <= eps.
    """
    return point_mass(grid.m, bin_of(grid, v))


def minimal_approachability_check(grid: Grid) -> float:
    """Smallest achievable one-round expected-reward norm against v = 1/m.

    min over mixtures u of sum_i u_i |M_i - 1/m| is attained at a point
    mass, and no midpoint gets closer to 1/m than eps. Distances are
    evaluated in exact rational arithmetic so the returned float equals
    grid.epsilon exactly; a mismatch raises.
    """
    m = grid.m
    best = min(abs(Fraction(2 * i + 1, 2 * m) - Fraction(1, m)) for i in range(m))
    result = float(best)
    if result != grid.epsilon:
        raise ArithmeticError(
            f"minimal distance {result!r} does not equal the grid slack {grid.epsilon!r}"
        )
    return result


@dataclass(frozen=True, eq=False)
class WitnessReport:
    """Solved values for the direction q = (-1, ..., -1, 1)."""

    q: np.ndarray
    solution: GameSolution
    val: float
    val_pure: float
    val_star: float
    x_star: tuple[int, ...]
    y_star: tuple[int, ...]
    expected_val_star: float


def mixed_approachability_witness(grid: Grid) -> WitnessReport:
    """The direction that separates mixed from restricted-pure play.

    For q = (-1, ..., -1, 1) the mixed game has value 0 (mix the last
    two bins evenly), while restricting both sides to the optimal
    supports forces value min(1 - 2*eps, 2*eps) > 0.
    """
    if grid.m < 2:
        raise ValueError(f"witness direction needs at least two bins, got m={grid.m}")
    q = -np.ones(grid.m)
    q[-1] = 1.0
    game = direction_game(grid, q)
    solution = val_mixed(game)
    x_star, y_star = optimal_supports(game)
    return WitnessReport(
        q=q,
        solution=solution,
        val=solution.value,
        val_pure=val_pure(game),
        val_star=val_star(game, x_star, y_star),
        x_star=x_star,
        y_star=y_star,
        expected_val_star=min(1.0 - 2.0 * grid.epsilon, 2.0 * grid.epsilon),
    )
