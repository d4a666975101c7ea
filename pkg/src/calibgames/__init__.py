"""Simulation engine and analysis toolkit for online calibration games.

A forecaster repeatedly announces a probability from a fixed grid of m
bins and an adversarial nature answers with an outcome in [0, 1]. The
toolkit provides the grid and transcript primitives, calibration
metrics, the forecasting strategies and adversaries, seeded game
engines, a direction-game solver for the underlying approachability
analysis, and an experiment harness with a CLI front end.
"""

from .approachability import (
    DirectionGame,
    GameSolution,
    WitnessReport,
    direction_game,
    halfspace_witness,
    minimal_approachability_check,
    mixed_approachability_witness,
    objective,
    optimal_supports,
    response_satisfy,
    val_mixed,
    val_pure,
    val_star,
)
from .engine import GAME_NAMES, play, play_game_i, play_game_ii, play_game_ii_bounded
from .forecasters import (
    FORECASTER_NAMES,
    DoublingSchedule,
    ForecastDistribution,
    Forecaster,
    IntervalAction,
    condition_a_index,
    condition_b_index,
    foster99_next,
    foster99_weights,
    make_forecaster,
    pi_f99_next,
    point_mass,
    potc_cal_next,
    potential,
    two_point,
)
from .grid import CalState, Grid, bin_of, make_grid
from .harness import (
    ExperimentConfig,
    RateEstimate,
    RunResult,
    estimate_rate,
    log_checkpoints,
    read_csv,
    run_experiment,
    run_single,
    write_csv,
    write_summary,
)
from .metrics import (
    Transcript,
    avg_reward,
    calibration_error,
    eps_calibration_error,
    interval_calibration_error,
    l1_dist_to_ball,
    reward,
)
from .natures import NATURE_NAMES, Nature, NatureView, make_nature

__version__ = "0.1.0"

__all__ = [
    "CalState",
    "DirectionGame",
    "DoublingSchedule",
    "ExperimentConfig",
    "FORECASTER_NAMES",
    "ForecastDistribution",
    "Forecaster",
    "GAME_NAMES",
    "GameSolution",
    "Grid",
    "IntervalAction",
    "NATURE_NAMES",
    "Nature",
    "NatureView",
    "RateEstimate",
    "RunResult",
    "Transcript",
    "WitnessReport",
    "avg_reward",
    "bin_of",
    "calibration_error",
    "condition_a_index",
    "condition_b_index",
    "direction_game",
    "eps_calibration_error",
    "estimate_rate",
    "foster99_next",
    "foster99_weights",
    "halfspace_witness",
    "interval_calibration_error",
    "l1_dist_to_ball",
    "log_checkpoints",
    "make_forecaster",
    "make_grid",
    "make_nature",
    "minimal_approachability_check",
    "mixed_approachability_witness",
    "objective",
    "optimal_supports",
    "pi_f99_next",
    "play",
    "play_game_i",
    "play_game_ii",
    "play_game_ii_bounded",
    "point_mass",
    "potc_cal_next",
    "potential",
    "read_csv",
    "response_satisfy",
    "reward",
    "run_experiment",
    "run_single",
    "two_point",
    "val_mixed",
    "val_pure",
    "val_star",
    "write_csv",
    "write_summary",
]
