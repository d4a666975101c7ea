"""Command line interface.

Subcommands:
  simulate   one matchup, many seeds, checkpoint table + optional CSV/JSON
  sweep      cross-product of matchups from a key=value config file
  approach   direction-game values, witnesses, and bin responses
  rate       fit decay rates from a previously written CSV

Output directory resolution: --out flag, else the CALIBGAMES_OUTDIR
environment variable, else no files are written (simulate/sweep still
print their tables).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .approachability import (
    direction_game,
    minimal_approachability_check,
    mixed_approachability_witness,
    response_satisfy,
    val_mixed,
    val_pure,
)
from .engine import GAME_NAMES
from .forecasters import FORECASTER_NAMES
from .grid import make_grid
from .harness import (
    ExperimentConfig,
    RunResult,
    default_outdir,
    estimate_rate,
    log_checkpoints,
    read_csv,
    run_experiment,
    write_csv,
    write_summary,
)
from .natures import NATURE_NAMES


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Parse '0,5,9' and range shorthand '0..99' (inclusive)."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return tuple(seeds)


def _parse_horizons(args) -> tuple[int, ...]:
    if args.horizons:
        return tuple(int(t) for t in args.horizons.split(","))
    return log_checkpoints(args.max_t, per_decade=args.per_decade)


def _slug(config: ExperimentConfig) -> str:
    raw = f"{config.game}_{config.forecaster}_{config.nature}_m{config.m}"
    return raw.replace(":", "-").replace("/", "-")


def _print_result(result: RunResult) -> None:
    c = result.config
    print(f"{c.game} | {c.forecaster} vs {c.nature} | m={c.m} | seeds={len(c.seeds)}")
    print(f"{'T':>10}  {'mean CE':>12}  {'mean eps-CE':>12}")
    for ci, t in enumerate(result.ts):
        print(f"{int(t):>10}  {result.mean_ce[ci]:>12.6g}  {result.mean_eps_ce[ci]:>12.6g}")
    for label, rate in (("CE", result.rate_ce), ("eps-CE", result.rate_eps_ce)):
        if rate.slope is None:
            print(f"rate[{label}]: undefined ({rate.note})")
        else:
            print(f"rate[{label}]: slope {rate.slope:.3f} over {rate.n_points} points")


def _write_outputs(result: RunResult, outdir: Path | None) -> None:
    if outdir is None:
        return
    outdir.mkdir(parents=True, exist_ok=True)
    slug = _slug(result.config)
    # Append rather than with_suffix: slugs like bernoulli-0.3_m5 contain dots.
    csv_path = outdir / f"{slug}.csv"
    json_path = outdir / f"{slug}.json"
    write_csv(csv_path, result)
    write_summary(json_path, result)
    print(f"wrote {csv_path} and {json_path}")


def _cmd_simulate(args) -> int:
    config = ExperimentConfig(
        game=args.game,
        forecaster=args.forecaster,
        nature=args.nature,
        m=args.m,
        horizons=_parse_horizons(args),
        seeds=_parse_seeds(args.seeds),
        t0=args.t0,
        kk_scale=args.kk_scale,
        use_kernels=not args.no_kernels,
    )
    result = run_experiment(config)
    _print_result(result)
    outdir = Path(args.out) if args.out else default_outdir()
    _write_outputs(result, outdir)
    return 0


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def _sweep_configs(values: dict[str, str]) -> list[ExperimentConfig]:
    for key in ("game", "forecaster", "nature", "m"):
        if key not in values:
            raise ValueError(f"sweep config missing required key {key!r}")
    if "horizons" in values:
        horizons = tuple(int(t) for t in values["horizons"].split(","))
    elif "max_t" in values:
        horizons = log_checkpoints(
            int(values["max_t"]), per_decade=int(values.get("per_decade", "4"))
        )
    else:
        raise ValueError("sweep config needs either horizons or max_t")
    seeds = _parse_seeds(values.get("seeds", "0"))
    t0 = int(values.get("t0", "1000"))
    kk_scale = float(values.get("kk_scale", "1.0"))
    use_kernels = values.get("use_kernels", "true").lower() not in ("false", "0", "no")
    configs = []
    for game in values["game"].split(","):
        for forecaster in values["forecaster"].split(","):
            for nature in values["nature"].split(","):
                for m in values["m"].split(","):
                    configs.append(
                        ExperimentConfig(
                            game=game.strip(),
                            forecaster=forecaster.strip(),
                            nature=nature.strip(),
                            m=int(m),
                            horizons=horizons,
                            seeds=seeds,
                            t0=t0,
                            kk_scale=kk_scale,
                            use_kernels=use_kernels,
                        )
                    )
    return configs


def _cmd_sweep(args) -> int:
    configs = _sweep_configs(_parse_config_file(args.config))
    print(f"sweep: {len(configs)} matchup(s)")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_experiment, configs))
    else:
        results = [run_experiment(config) for config in configs]
    outdir = Path(args.out) if args.out else default_outdir()
    for result in results:
        _print_result(result)
        _write_outputs(result, outdir)
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        combined = outdir / "sweep.csv"
        write_csv(combined, results)
        print(f"wrote {combined}")
    return 0


def _parse_q(text: str, m: int) -> np.ndarray:
    q = np.asarray([float(x) for x in text.split(",")], dtype=np.float64)
    if len(q) != m:
        raise ValueError(f"direction vector has {len(q)} entries, expected m={m}")
    return q


def _cmd_approach(args) -> int:
    grid = make_grid(args.m)
    if args.what == "minimal":
        value = minimal_approachability_check(grid)
        print(f"m={args.m}: min over bins of |midpoint - 1/m| = {value!r} (epsilon = {grid.epsilon!r})")
        return 0
    if args.what == "witness":
        report = mixed_approachability_witness(grid)
        print(f"direction q = {report.q.tolist()}")
        print(f"val   = {float(report.val)!r} (mixed forecasts)")
        print(f"val_p = {float(report.val_pure)!r} (point forecasts)")
        print(
            f"val_s = {float(report.val_star)!r} on supports X*={sorted(report.x_star)}, "
            f"Y*={sorted(report.y_star)} (expected {float(report.expected_val_star)!r})"
        )
        return 0
    if args.what == "respond":
        if args.v is None:
            raise ValueError("respond needs --v")
        dist = response_satisfy(grid, args.v)
        i = int(dist.support[0])
        gap = abs(float(grid.midpoints[i]) - args.v)
        print(f"v={args.v!r} -> bin {i} (midpoint {float(grid.midpoints[i])!r}), |gap| = {gap!r} <= eps = {grid.epsilon!r}")
        return 0
    if args.q is None:
        raise ValueError(f"{args.what} needs --q")
    game = direction_game(grid, _parse_q(args.q, args.m))
    if args.what == "pure":
        print(f"val_pure = {float(val_pure(game))!r}")
        return 0
    solution = val_mixed(game)
    print(f"value = {float(solution.value)!r}")
    print(f"strategy = {solution.strategy.tolist()}")
    print(f"best outcomes = {sorted(solution.best_outcomes)}")
    return 0


def _cmd_rate(args) -> int:
    rows = read_csv(args.csv)
    if not rows:
        raise ValueError(f"no data rows in {args.csv}")
    groups: dict[tuple, dict[int, list[float]]] = {}
    for row in rows:
        key = (row["game"], row["forecaster"], row["nature"], row["m"])
        groups.setdefault(key, {}).setdefault(row["T"], []).append(row[args.metric])
    for key in sorted(groups, key=str):
        by_t = groups[key]
        ts = sorted(by_t)
        means = [float(np.mean(by_t[t])) for t in ts]
        rate = estimate_rate(ts, means)
        label = f"{key[0]} | {key[1]} vs {key[2]} | m={key[3]} | {args.metric}"
        if rate.slope is None:
            print(f"{label}: undefined ({rate.note})")
        else:
            print(f"{label}: slope {rate.slope:.3f} over {rate.n_points} points")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calibgames",
        description="Simulate online calibration games and analyze the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one matchup across seeds")
    sim.add_argument("--game", required=True, choices=GAME_NAMES)
    sim.add_argument("--forecaster", required=True, metavar=f"{{{','.join(FORECASTER_NAMES)}}}")
    sim.add_argument("--nature", required=True, metavar=f"{{{','.join(NATURE_NAMES)}}}")
    sim.add_argument("--m", type=int, required=True, help="number of grid bins")
    sim.add_argument("--max-t", type=int, default=10_000, help="largest horizon")
    sim.add_argument("--per-decade", type=int, default=4, help="checkpoints per decade")
    sim.add_argument("--horizons", default=None, help="explicit comma list, overrides --max-t")
    sim.add_argument("--seeds", default="0", help="comma list and/or a..b ranges")
    sim.add_argument("--t0", type=int, default=1000, help="first-epoch length for pi-f99")
    sim.add_argument("--kk-scale", type=float, default=1.0, help="multiplier on pi-f99 grid refinement")
    sim.add_argument("--out", default=None, help="output directory (else $CALIBGAMES_OUTDIR)")
    sim.add_argument("--no-kernels", action="store_true", help="force the pure-python engine")
    sim.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a cross-product of matchups from a config file")
    sweep.add_argument("config", help="key = value file; comma lists cross-multiply")
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sweep.set_defaults(func=_cmd_sweep)

    app = sub.add_parser("approach", help="direction-game analysis")
    app.add_argument("what", choices=("val", "pure", "witness", "minimal", "respond"))
    app.add_argument("--m", type=int, required=True)
    app.add_argument(
        "--q",
        default=None,
        help="comma list of direction weights, length m (write --q=-1,0,1 when the first is negative)",
    )
    app.add_argument("--v", type=float, default=None, help="outcome for respond")
    app.set_defaults(func=_cmd_approach)

    rate = sub.add_parser("rate", help="fit decay rates from a results CSV")
    rate.add_argument("csv")
    rate.add_argument("--metric", choices=("ce", "eps_ce"), default="eps_ce")
    rate.set_defaults(func=_cmd_rate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
