"""Command line interface, end to end through main()."""

import numpy as np
import pytest

from calibgames import estimate_rate, read_csv
from calibgames.cli import _parse_seeds, build_parser, main


def test_parse_seeds():
    assert _parse_seeds("0,5,9") == (0, 5, 9)
    assert _parse_seeds("0..3,7") == (0, 1, 2, 3, 7)
    assert _parse_seeds(" 4 ") == (4,)
    with pytest.raises(ValueError):
        _parse_seeds(",")
    with pytest.raises(ValueError):
        _parse_seeds("a..b")


def test_parser_rejects_unknown_game():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["simulate", "--game", "iv", "--forecaster", "x", "--nature", "y", "--m", "2"])


def simulate_args(tmp_path, **over):
    base = {
        "--game": "ii",
        "--forecaster": "potc-cal",
        "--nature": "greedy",
        "--m": "5",
        "--max-t": "200",
        "--seeds": "0..2",
        "--out": str(tmp_path),
    }
    base.update(over)
    argv = ["simulate"]
    for k, v in base.items():
        argv.extend([k, v])
    return argv


def test_simulate_end_to_end(tmp_path, capsys):
    assert main(simulate_args(tmp_path)) == 0
    out = capsys.readouterr().out
    assert "potc-cal vs greedy" in out
    assert "mean eps-CE" in out
    csv_path = tmp_path / "ii_potc-cal_greedy_m5.csv"
    json_path = tmp_path / "ii_potc-cal_greedy_m5.json"
    assert csv_path.exists() and json_path.exists()
    rows = read_csv(csv_path)
    assert {r["seed"] for r in rows} == {0, 1, 2}
    assert max(r["T"] for r in rows) == 200
    # the worst-case bound holds on every written row
    assert all(r["T"] * r["eps_ce"] <= 5 + 1e-9 for r in rows)


def test_simulate_explicit_horizons_and_no_kernels(tmp_path):
    argv = simulate_args(
        tmp_path, **{"--horizons": "10,50", "--seeds": "0", "--nature": "alternating", "--no-kernels": ""}
    )
    argv = [a for a in argv if a != ""]
    assert main(argv) == 0
    rows = read_csv(tmp_path / "ii_potc-cal_alternating_m5.csv")
    assert [r["T"] for r in rows] == [10, 50]


def test_simulate_dotted_nature_keeps_full_filename(tmp_path):
    # Parameterized names carry dots; the extension must be appended, not
    # substituted for the tail, or bernoulli:0.3 and bernoulli:0.7 would
    # collide on the same output file.
    argv = simulate_args(
        tmp_path, **{"--game": "i", "--forecaster": "foster99", "--nature": "bernoulli:0.3", "--seeds": "0"}
    )
    assert main(argv) == 0
    assert (tmp_path / "i_foster99_bernoulli-0.3_m5.csv").exists()
    assert (tmp_path / "i_foster99_bernoulli-0.3_m5.json").exists()
    assert not (tmp_path / "i_foster99_bernoulli-0.csv").exists()


def test_simulate_honors_outdir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CALIBGAMES_OUTDIR", str(tmp_path / "envout"))
    argv = simulate_args(tmp_path, **{"--seeds": "0", "--max-t": "50"})
    argv = [a for a in argv if a not in ("--out", str(tmp_path))]
    assert main(argv) == 0
    assert (tmp_path / "envout" / "ii_potc-cal_greedy_m5.csv").exists()


def test_bad_names_exit_with_error(tmp_path, capsys):
    argv = simulate_args(tmp_path, **{"--forecaster": "psychid"})
    assert main(argv) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "potc-cal" in err  # the message lists the valid registry names


def test_approach_witness_and_minimal(capsys):
    assert main(["approach", "witness", "--m", "5"]) == 0
    out = capsys.readouterr().out
    assert "val   = 2.7755575615628914e-17" in out or "val   = 0.0" in out
    assert "X*=[3, 4]" in out
    assert main(["approach", "minimal", "--m", "7"]) == 0
    out = capsys.readouterr().out
    assert repr(1 / 14) in out


def test_approach_val_pure_and_respond(capsys):
    assert main(["approach", "val", "--m", "3", "--q=-1,0,1"]) == 0
    out = capsys.readouterr().out
    assert "value = " in out and "strategy = " in out
    assert main(["approach", "pure", "--m", "2", "--q", "1,0"]) == 0
    assert "val_pure = -0.25" in capsys.readouterr().out
    assert main(["approach", "respond", "--m", "5", "--v", "0.42"]) == 0
    assert "bin 2" in capsys.readouterr().out
    assert main(["approach", "respond", "--m", "5"]) == 2  # --v is required
    assert main(["approach", "val", "--m", "3", "--q", "1,2"]) == 2  # wrong length


def test_rate_command(tmp_path, capsys):
    assert main(simulate_args(tmp_path, **{"--max-t": "1000", "--seeds": "0..4"})) == 0
    capsys.readouterr()
    csv_path = tmp_path / "ii_potc-cal_greedy_m5.csv"
    assert main(["rate", str(csv_path), "--metric", "eps_ce"]) == 0
    out = capsys.readouterr().out
    assert "ii | potc-cal vs greedy | m=5 | eps_ce" in out
    # recompute the printed slope from the CSV
    rows = read_csv(csv_path)
    by_t = {}
    for r in rows:
        by_t.setdefault(r["T"], []).append(r["eps_ce"])
    ts = sorted(by_t)
    fit = estimate_rate(ts, [float(np.mean(by_t[t])) for t in ts])
    assert f"slope {fit.slope:.3f}" in out


def test_rate_rejects_missing_file(capsys):
    assert main(["rate", "/nonexistent/x.csv"]) == 2
    assert capsys.readouterr().err.startswith("error:")


SWEEP_CONFIG = """
# cross product of natures and grid sizes
game = ii
forecaster = potc-cal
nature = greedy, alternating
m = 2, 5
max-t = 100
per-decade = 2
seeds = 0..1
"""


def test_sweep_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(SWEEP_CONFIG)
    outdir = tmp_path / "runs"
    assert main(["sweep", str(cfg), "--out", str(outdir)]) == 0
    out = capsys.readouterr().out
    assert "sweep: 4 matchup(s)" in out
    files = sorted(p.name for p in outdir.glob("*.csv"))
    assert files == [
        "ii_potc-cal_alternating_m2.csv",
        "ii_potc-cal_alternating_m5.csv",
        "ii_potc-cal_greedy_m2.csv",
        "ii_potc-cal_greedy_m5.csv",
        "sweep.csv",
    ]
    combined = read_csv(outdir / "sweep.csv")
    per_run = read_csv(outdir / "ii_potc-cal_greedy_m2.csv")
    assert len(combined) == 4 * len(per_run)


def test_sweep_parallel_jobs_match_serial(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("game = ii\nforecaster = potc-cal\nnature = greedy\nm = 2, 3\nhorizons = 10, 80\nseeds = 0\n")
    a, b = tmp_path / "serial", tmp_path / "parallel"
    assert main(["sweep", str(cfg), "--out", str(a)]) == 0
    assert main(["sweep", str(cfg), "--out", str(b), "--jobs", "2"]) == 0
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_sweep_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("forecaster = potc-cal\n")
    assert main(["sweep", str(cfg)]) == 2
    assert "missing required key" in capsys.readouterr().err
    cfg.write_text("game = ii\nforecaster = potc-cal\nnature = greedy\nm = 5\n")
    assert main(["sweep", str(cfg)]) == 2
    assert "horizons or max_t" in capsys.readouterr().err
    cfg.write_text("this is not a config\n")
    assert main(["sweep", str(cfg)]) == 2
    assert "key = value" in capsys.readouterr().err
