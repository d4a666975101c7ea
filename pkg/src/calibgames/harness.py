"""Experiment harness: seeded matchups, checkpoint metrics, rate fits.

One experiment = one (game, forecaster, nature, m) matchup played once
per seed to the largest horizon, with metrics recorded at log-spaced
prefix checkpoints of that single long run. Results serialize to a flat
CSV (schema: game,forecaster,nature,m,seed,T,ce,eps_ce) and a JSON
summary carrying per-bin occupancy and fitted decay rates.

Matchups with a JIT kernel (see _fast) run through it by default; the
kernels are engine-equivalent per seed, so use_kernels only trades
speed, never results.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _fast
from .engine import GAME_NAMES, play
from .forecasters import DoublingSchedule, make_forecaster
from .grid import make_grid
from .metrics import calibration_error
from .natures import make_nature

CSV_COLUMNS = ("game", "forecaster", "nature", "m", "seed", "T", "ce", "eps_ce")
OUTDIR_ENV = "CALIBGAMES_OUTDIR"


@dataclass(frozen=True)
class ExperimentConfig:
    game: str
    forecaster: str
    nature: str
    m: int
    horizons: tuple[int, ...]
    seeds: tuple[int, ...]
    t0: int = 1000
    kk_scale: float = 1.0
    use_kernels: bool = True

    def __post_init__(self):
        if self.game not in GAME_NAMES:
            raise ValueError(f"unknown game {self.game!r}; valid: {', '.join(GAME_NAMES)}")
        if self.m < 2:
            raise ValueError(f"grid needs at least two bins, got m={self.m}")
        if not self.horizons:
            raise ValueError("need at least one checkpoint horizon")
        if any(t < 1 for t in self.horizons):
            raise ValueError(f"horizons must be positive, got {self.horizons}")
        if list(self.horizons) != sorted(set(self.horizons)):
            raise ValueError(f"horizons must be strictly increasing, got {self.horizons}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        # validate the matchup eagerly so config errors surface before any run
        _build_players(self)


def _build_players(config: ExperimentConfig):
    forecaster = make_forecaster(
        config.forecaster, t0=config.t0, kk_scale=config.kk_scale
    )
    nature = make_nature(config.nature)
    want = "interval" if config.game in ("ii", "ii-bounded") else "point"
    if forecaster.kind != want:
        raise ValueError(
            f"{config.forecaster} emits {forecaster.kind} forecasts; game {config.game} needs {want} forecasts"
        )
    if config.game not in nature.modes:
        raise ValueError(
            f"nature {config.nature} supports game(s) {', '.join(nature.modes)}, not {config.game}"
        )
    return forecaster, nature


def log_checkpoints(max_t: int, per_decade: int = 4, first: int = 10) -> tuple[int, ...]:
    """Log-spaced integer checkpoints from about `first` up to exactly max_t."""
    if max_t < 1:
        raise ValueError(f"horizon must be positive, got {max_t}")
    if per_decade < 1:
        raise ValueError(f"per_decade must be positive, got {per_decade}")
    if max_t <= first:
        return (max_t,)
    n = int(math.ceil(math.log10(max_t / first) * per_decade)) + 1
    pts = np.unique(np.round(np.logspace(math.log10(first), math.log10(max_t), n)).astype(int))
    pts[-1] = max_t
    return tuple(int(p) for p in np.unique(pts))


@dataclass(frozen=True)
class RateEstimate:
    """Least-squares slope of log(value) against log(T)."""

    slope: float | None
    n_points: int
    n_zero: int
    note: str = ""


def estimate_rate(ts, values) -> RateEstimate:
    """Fit a power-law decay rate, excluding non-positive values.

    Needs at least three positive points; otherwise the slope is
    undefined and reported as None with an explanatory note.
    """
    ts = np.asarray(ts, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ts.shape != values.shape:
        raise ValueError("ts and values must have the same shape")
    pos = values > 0
    n_pos = int(pos.sum())
    n_zero = len(values) - n_pos
    if n_pos < 3:
        return RateEstimate(None, n_pos, n_zero, "fewer than 3 positive points; rate undefined")
    slope = float(np.polyfit(np.log(ts[pos]), np.log(values[pos]), 1)[0])
    return RateEstimate(slope, n_pos, n_zero)


@dataclass(frozen=True, eq=False)
class RunResult:
    """All checkpoint metrics for one matchup across its seeds."""

    config: ExperimentConfig
    ts: np.ndarray
    ce: np.ndarray  # (n_seeds, n_checkpoints)
    eps_ce: np.ndarray
    counts: np.ndarray  # (n_seeds, n_checkpoints, m)
    means: np.ndarray
    mean_ce: np.ndarray
    mean_eps_ce: np.ndarray
    rate_ce: RateEstimate
    rate_eps_ce: RateEstimate


_BINARY_KERNEL_NATURES = ("greedy", "constant:0", "constant:1", "alternating")
_BOUNDED_KERNEL_NATURES = ("uniform-v", "midpoint", "constant:0", "constant:1")


def _kernel_run(config: ExperimentConfig, seed: int):
    """Run through a JIT kernel when one covers the matchup, else None."""
    T = config.horizons[-1]
    cps = config.horizons
    if config.game == "ii" and config.forecaster == "potc-cal":
        if config.nature in _BINARY_KERNEL_NATURES or config.nature.startswith("bernoulli:"):
            return _fast.fast_potc_binary(config.m, T, config.nature, seed, cps)
    if config.game == "ii-bounded" and config.forecaster == "potc-cal":
        if config.nature in _BOUNDED_KERNEL_NATURES or config.nature.startswith(
            ("boundary:", "bernoulli:")
        ):
            return _fast.fast_potc_bounded(config.m, T, config.nature, seed, cps)
    if config.game == "i" and config.forecaster == "foster99" and config.nature == "greedy":
        return _fast.fast_foster99_greedy(config.m, T, seed, cps)
    if config.game == "i" and config.forecaster == "pi-f99" and config.nature.startswith(
        "bernoulli:"
    ):
        schedule = DoublingSchedule(
            make_grid(config.m), t0=config.t0, kk_scale=config.kk_scale
        )
        p = float(config.nature.split(":", 1)[1])
        return _fast.fast_pif99_bernoulli(schedule, T, p, seed, cps)
    return None


def _engine_run(config: ExperimentConfig, seed: int):
    grid = make_grid(config.m)
    forecaster, nature = _build_players(config)
    transcript = play(config.game, grid, forecaster, nature, config.horizons[-1], seed)
    ncp = len(config.horizons)
    ce = np.zeros(ncp)
    counts = np.zeros((ncp, config.m), dtype=np.int64)
    means = np.zeros((ncp, config.m))
    for ci, t in enumerate(config.horizons):
        pre = transcript.prefix(t)
        ce[ci] = calibration_error(pre)
        counts[ci] = np.bincount(pre.realized, minlength=config.m)
        sums = np.bincount(pre.realized, weights=pre.outcomes, minlength=config.m)
        means[ci] = np.where(counts[ci] > 0, sums / np.maximum(counts[ci], 1), grid.midpoints)
    eps_ce = np.maximum(ce - grid.epsilon, 0.0)
    return ce, eps_ce, counts, means


def run_single(config: ExperimentConfig, seed: int):
    """One seed's checkpoint series: (ce, eps_ce, counts, means)."""
    if config.use_kernels:
        fast = _kernel_run(config, seed)
        if fast is not None:
            return fast.ce, fast.eps_ce, fast.counts, fast.means
    return _engine_run(config, seed)


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Play the matchup once per seed and aggregate checkpoint metrics."""
    ncp = len(config.horizons)
    n_seeds = len(config.seeds)
    ce = np.zeros((n_seeds, ncp))
    eps_ce = np.zeros((n_seeds, ncp))
    counts = np.zeros((n_seeds, ncp, config.m), dtype=np.int64)
    means = np.zeros((n_seeds, ncp, config.m))
    for si, seed in enumerate(config.seeds):
        ce[si], eps_ce[si], counts[si], means[si] = run_single(config, seed)
    ts = np.asarray(config.horizons, dtype=np.int64)
    mean_ce = ce.mean(axis=0)
    mean_eps_ce = eps_ce.mean(axis=0)
    return RunResult(
        config=config,
        ts=ts,
        ce=ce,
        eps_ce=eps_ce,
        counts=counts,
        means=means,
        mean_ce=mean_ce,
        mean_eps_ce=mean_eps_ce,
        rate_ce=estimate_rate(ts, mean_ce),
        rate_eps_ce=estimate_rate(ts, mean_eps_ce),
    )


# --- serialization --------------------------------------------------------


def result_rows(result: RunResult):
    """CSV rows in deterministic (seed order, ascending T) order."""
    c = result.config
    for si, seed in enumerate(c.seeds):
        for ci, t in enumerate(c.horizons):
            yield {
                "game": c.game,
                "forecaster": c.forecaster,
                "nature": c.nature,
                "m": c.m,
                "seed": seed,
                "T": t,
                "ce": float(result.ce[si, ci]),
                "eps_ce": float(result.eps_ce[si, ci]),
            }


def write_csv(path, results) -> None:
    """Write one or more RunResults to a single CSV file."""
    if isinstance(results, RunResult):
        results = [results]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for result in results:
            for row in result_rows(result):
                writer.writerow(
                    [
                        row["game"],
                        row["forecaster"],
                        row["nature"],
                        row["m"],
                        row["seed"],
                        row["T"],
                        repr(row["ce"]),
                        repr(row["eps_ce"]),
                    ]
                )


def read_csv(path) -> list[dict]:
    """Read a results CSV back into typed row dicts (exact round-trip)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
            raise ValueError(
                f"unexpected CSV columns {reader.fieldnames}; expected {list(CSV_COLUMNS)}"
            )
        for raw in reader:
            rows.append(
                {
                    "game": raw["game"],
                    "forecaster": raw["forecaster"],
                    "nature": raw["nature"],
                    "m": int(raw["m"]),
                    "seed": int(raw["seed"]),
                    "T": int(raw["T"]),
                    "ce": float(raw["ce"]),
                    "eps_ce": float(raw["eps_ce"]),
                }
            )
    return rows


def _rate_dict(rate: RateEstimate) -> dict:
    return {
        "slope": rate.slope,
        "n_points": rate.n_points,
        "n_zero": rate.n_zero,
        "note": rate.note,
    }


def summary_dict(result: RunResult) -> dict:
    c = result.config
    return {
        "config": {
            "game": c.game,
            "forecaster": c.forecaster,
            "nature": c.nature,
            "m": c.m,
            "horizons": list(c.horizons),
            "seeds": list(c.seeds),
            "t0": c.t0,
            "kk_scale": c.kk_scale,
        },
        "checkpoints": [int(t) for t in result.ts],
        "mean_ce": [float(x) for x in result.mean_ce],
        "mean_eps_ce": [float(x) for x in result.mean_eps_ce],
        "mean_ce_minus_eps": [float(x - 0.5 / c.m) for x in result.mean_ce],
        "rate_ce": _rate_dict(result.rate_ce),
        "rate_eps_ce": _rate_dict(result.rate_eps_ce),
        "per_seed": [
            {
                "seed": int(seed),
                "ce": [float(x) for x in result.ce[si]],
                "eps_ce": [float(x) for x in result.eps_ce[si]],
                "bins_n": result.counts[si].tolist(),
                "bins_mean": result.means[si].tolist(),
            }
            for si, seed in enumerate(c.seeds)
        ],
    }


def write_summary(path, result: RunResult) -> None:
    with open(path, "w") as fh:
        json.dump(summary_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_outdir() -> Path | None:
    env = os.environ.get(OUTDIR_ENV, "").strip()
    return Path(env) if env else None
