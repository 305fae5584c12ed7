import json

import numpy as np
import pytest

from srlab.cli import main
from srlab.grid import read_pgm
from srlab.scenario import load_config


CONFIG = {
    "star": {"cycles": 64, "outer_radius": 40.0, "inner_radius": 4.0,
             "dark_level": 0.0, "bright_level": 600.0, "center": [64.0, 64.0],
             "supersample": 2},
    "grid": {"height": 128, "width": 128},
    "system": {"optics_mtf_at_hr_nyq": 0.30, "n_phi": 1, "jitter_sigma": 0.1,
               "snr_at_300": 60.0, "subarray_shift_ax": 0.5},
    "solver": {"lambda": 0.25, "alpha": 0.7, "P": 2, "beta0": 1.0,
               "max_iters": 3, "rel_tol": 1e-9},
    "montecarlo": {"n_trials": 4, "master_seed": 11, "bin_width_m": 0.05},
    "n_rings": 20,
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "scenario.json"
    cfg = dict(CONFIG)
    cfg["output_dir"] = str(tmp_path / "out")
    path.write_text(json.dumps(cfg))
    return path


def test_config_strict_unknown_keys(tmp_path):
    bad = dict(CONFIG)
    bad["solvr"] = {}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(ValueError, match="unknown top-level"):
        load_config(path)

    bad2 = dict(CONFIG)
    bad2["system"] = {"snr": 60.0}
    path.write_text(json.dumps(bad2))
    with pytest.raises(ValueError, match="unknown key"):
        load_config(path)


def test_config_lambda_alias(config_path):
    cfg = load_config(config_path)
    assert cfg.scenario.solver.lam == 0.25
    assert cfg.scenario.solver.p_radius == 2
    assert cfg.scenario.grid_size == (128, 128)


def test_config_malformed_json(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="malformed"):
        load_config(path)


def test_target_subcommand(config_path, tmp_path):
    rc = main(["target", "--config", str(config_path)])
    assert rc == 0
    star = read_pgm(tmp_path / "out" / "star.pgm")
    assert star.shape == (128, 128)
    assert star.data[0, 0] == 300.0


def test_mtf_curves_subcommand(config_path, tmp_path):
    rc = main(["mtf-curves", "--config", str(config_path)])
    assert rc == 0
    lines = (tmp_path / "out" / "mtf_curves.csv").read_text().splitlines()
    assert lines[0] == "f_cyc_per_hr_sample,optics,footprint,sampling,smear,jitter,system"
    assert len(lines) == 513
    assert lines[-1].endswith("")
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert all(float(v) == 1.0 for v in first[1:])


def test_pipeline_roundtrip(config_path, tmp_path):
    sim_dir = tmp_path / "sim"
    assert main(["simulate", "--config", str(config_path), "--seed", "42",
                 "--out-dir", str(sim_dir)]) == 0
    for name in ("obs1.pgm", "obs2.pgm", "truth.pgm", "meta.json"):
        assert (sim_dir / name).exists()
    meta = json.loads((sim_dir / "meta.json").read_text())
    assert meta["seed"] == 42
    assert meta["decimation"] == [1, 2]
    assert meta["noise_sigma"] == pytest.approx(5.0)
    assert meta["observations"][1]["shift_hr"] == [20.0, 1.0]

    sr_dir = tmp_path / "sr"
    assert main(["superresolve", "--config", str(config_path),
                 "--meta", str(sim_dir / "meta.json"),
                 "--out-dir", str(sr_dir)]) == 0
    assert (sr_dir / "sr.pgm").exists()
    trace = (sr_dir / "cost_trace.csv").read_text().splitlines()
    assert trace[0] == "iteration,cost"
    costs = [float(line.split(",")[1]) for line in trace[1:]]
    assert all(b <= a for a, b in zip(costs, costs[1:]))

    meas_dir = tmp_path / "meas"
    assert main(["measure", "--config", str(config_path),
                 "--image", str(sr_dir / "sr.pgm"),
                 "--meta", str(sim_dir / "meta.json"),
                 "--out-dir", str(meas_dir)]) == 0
    report = json.loads((meas_dir / "report.json").read_text())
    assert report["nem"] == pytest.approx(0.0667, abs=1e-4)
    assert report["resolution_m"] is None or report["resolution_m"] > 0
    curve = (meas_dir / "curve.csv").read_text().splitlines()
    assert curve[0] == "f_cyc_per_hr_px,modulation,nem"


def test_simulate_requires_seed(config_path, tmp_path):
    cfg = json.loads(config_path.read_text())
    del cfg["montecarlo"]["master_seed"]
    path = tmp_path / "noseed.json"
    cfg["output_dir"] = str(tmp_path / "out2")
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path)]) == 1


def test_seed_flag_overrides_config(config_path, tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(config_path),
                 "--seed", "5", "--out-dir", str(d1)]) == 0
    assert main(["simulate", "--config", str(config_path),
                 "--out-dir", str(d2)]) == 0  # falls back to config seed 11
    m1 = json.loads((d1 / "meta.json").read_text())
    m2 = json.loads((d2 / "meta.json").read_text())
    assert m1["seed"] == 5
    assert m2["seed"] == 11


def test_montecarlo_csv_determinism(config_path, tmp_path):
    d1, d2 = tmp_path / "mc1", tmp_path / "mc2"
    for d in (d1, d2):
        assert main(["montecarlo", "--config", str(config_path),
                     "--trials", "4", "--seed", "7",
                     "--out-dir", str(d)]) == 0
    assert (d1 / "trials.csv").read_bytes() == (d2 / "trials.csv").read_bytes()
    assert (d1 / "histogram.csv").read_bytes() == (d2 / "histogram.csv").read_bytes()
    header = (d1 / "trials.csv").read_text().splitlines()[0]
    assert header.startswith("trial,seed,optics_mtf_at_hr_nyq")


def test_sweep_subcommand(config_path, tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(config_path), "--param", "snr",
                 "--values", "30,100", "--seeds-per-value", "1",
                 "--seed", "3", "--out-dir", str(out)]) == 0
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["parameter"] == "snr"
    assert summary["values"] == [30.0, 100.0]
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3


def test_missing_input_exits_2(config_path):
    assert main(["measure", "--config", str(config_path),
                 "--image", "/nonexistent/sr.pgm",
                 "--meta", "/nonexistent/meta.json"]) == 2


def test_unknown_subcommand_exits_1():
    assert main(["frobnicate"]) == 1


def test_missing_config_exits_2(tmp_path):
    assert main(["target", "--config", str(tmp_path / "nope.json")]) == 2
