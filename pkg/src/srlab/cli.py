"""Command-line interface: one executable, one subcommand per stage.

Subcommands: target, mtf-curves, simulate, superresolve, measure,
montecarlo, sweep.  All share one JSON config schema (each reads only
its section), write machine-readable outputs to files only, and log to
stderr.  Exit codes: 0 success, 1 usage error, 2 runtime failure.

Determinism is a contract: campaign seeds come from --seed or the
config; there is no wall-clock fallback.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .grid import read_pgm, write_pgm
from .metrology import measure_resolution
from .montecarlo import ParameterSpec, run_campaign, sweep
from .mtf import mtf_curve_table
from .scenario import ScenarioConfig, load_config
from .simulator import Observation, simulate_observations
from .solver import super_resolve
from .target import generate_spoke_target

logger = logging.getLogger("srlab")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _out_dir(args, config: ScenarioConfig) -> Path:
    out = Path(args.out_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_seed(args, config: ScenarioConfig) -> int:
    if args.seed is not None:
        return args.seed
    if config.montecarlo.master_seed is not None:
        return config.montecarlo.master_seed
    raise _UsageError("no seed given: pass --seed or set montecarlo.master_seed "
                      "in the config (wall-clock seeding is not supported)")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_target(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    star = config.scenario.star
    grid = generate_spoke_target(star, config.scenario.grid_size)
    write_pgm(out / "star.pgm", grid)
    logger.info("wrote %s", out / "star.pgm")
    return 0


def cmd_mtf_curves(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    header, rows = mtf_curve_table(config.system.mtf_chain(), n_points=args.points)
    _write_csv(out / "mtf_curves.csv", header,
               [[repr(float(v)) for v in row] for row in rows])
    logger.info("wrote %s", out / "mtf_curves.csv")
    return 0


def _observation_meta(obs: Observation, name: str) -> dict:
    return {
        "file": name,
        "shift_hr": list(obs.shift_hr),
        "noise_sigma": obs.noise_sigma,
    }


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    seed = _resolve_seed(args, config)
    scenario, system = config.scenario, config.system
    target = generate_spoke_target(scenario.star, scenario.grid_size)
    obs1, obs2 = simulate_observations(target, system, seed)
    write_pgm(out / "truth.pgm", target)
    write_pgm(out / "obs1.pgm", obs1.image)
    write_pgm(out / "obs2.pgm", obs2.image)
    meta = {
        "seed": seed,
        "snr_at_300": system.snr_at_300,
        "noise_sigma": obs1.noise_sigma,
        "decimation": list(obs1.decimation),
        "assumed_psf_sigma": system.assumed_psf_sigma,
        "hr_size": list(scenario.grid_size),
        "nem_signal": scenario.nem_signal,
        "star": {
            "center": list(scenario.star.center),
            "cycles": scenario.star.cycles,
            "outer_radius": scenario.star.outer_radius,
        },
        "observations": [_observation_meta(obs1, "obs1.pgm"),
                         _observation_meta(obs2, "obs2.pgm")],
    }
    with open(out / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("wrote obs1.pgm, obs2.pgm, truth.pgm, meta.json to %s", out)
    return 0


def _load_observation(meta: dict, entry: dict, meta_dir: Path) -> Observation:
    from .fourier import gaussian_kernel
    dec = tuple(meta["decimation"])
    image = read_pgm(meta_dir / entry["file"], pitch=(float(dec[0]), float(dec[1])))
    return Observation(
        image=image,
        shift_hr=tuple(entry["shift_hr"]),
        decimation=dec,
        assumed_psf=gaussian_kernel(meta["assumed_psf_sigma"]),
        noise_sigma=meta["noise_sigma"],
    )


def cmd_superresolve(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    meta_path = Path(args.meta)
    with open(meta_path, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    observations = [_load_observation(meta, entry, meta_path.parent)
                    for entry in meta["observations"]]
    result = super_resolve(observations, cfg=config.scenario.solver)
    write_pgm(out / "sr.pgm", result.image)
    _write_csv(out / "cost_trace.csv", ["iteration", "cost"],
               [[i, repr(c)] for i, c in enumerate(result.cost_trace)])
    logger.info("solver ran %d iterations (converged=%s)",
                result.iterations_run, result.converged)
    return 0


def cmd_measure(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    with open(args.meta, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    image = read_pgm(args.image)
    star = meta["star"]
    report = measure_resolution(
        image, tuple(star["center"]), star["cycles"], meta["nem_signal"],
        meta["noise_sigma"], star["outer_radius"], sector=args.sector)
    _write_csv(out / "curve.csv", ["f_cyc_per_hr_px", "modulation", "nem"],
               [[repr(f), repr(m), repr(report.nem)] for f, m in report.curve])
    summary = {
        "nem": report.nem,
        "f_cross": report.f_cross,
        "resolution_m": report.resolution_m,
        "sector": report.sector,
        "rings_dropped": report.rings_dropped,
        "ladder_limited": report.ladder_limited,
        "degenerate_crossing": report.degenerate_crossing,
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("resolution: %s m", report.resolution_m)
    return 0


_TRIAL_COLUMNS = ["trial", "seed", "optics_mtf_at_hr_nyq", "n_phi", "jitter_sigma",
                  "snr_at_300", "subarray_shift_ax", "assumed_psf_sigma",
                  "resolution_m", "solver_converged", "error"]


def _trial_row(index: int, trial) -> list[str]:
    p = trial.params
    return [str(index), str(trial.seed), repr(p.optics_mtf_at_hr_nyq), str(p.n_phi),
            repr(p.jitter_sigma), repr(p.snr_at_300), repr(p.subarray_shift_ax),
            repr(p.assumed_psf_sigma), _fmt(trial.resolution_m),
            str(trial.solver_converged), trial.error or ""]


def cmd_montecarlo(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    seed = _resolve_seed(args, config)
    n_trials = args.trials or config.montecarlo.n_trials
    progress = None
    if args.progress:
        def progress(done, total):
            print(f"\r{done}/{total} trials", end="", file=sys.stderr, flush=True)
    campaign = run_campaign(ParameterSpec(), config.scenario, n_trials, seed,
                            bin_width_m=config.montecarlo.bin_width_m,
                            threads=args.threads, progress=progress)
    if args.progress:
        print(file=sys.stderr)
    _write_csv(out / "trials.csv", _TRIAL_COLUMNS,
               [_trial_row(i, t) for i, t in enumerate(campaign.trials)])
    _write_csv(out / "histogram.csv", ["bin_left_m", "bin_right_m", "count"],
               [[repr(float(le)), repr(float(le + campaign.bin_width_m)), str(int(c))]
                for le, c in zip(campaign.bin_edges[:-1], campaign.counts)])
    summary = {
        "n_trials": len(campaign.trials),
        "n_resolved": campaign.n_resolved,
        "n_failed": campaign.n_failed,
        "master_seed": campaign.master_seed,
        "mode_m": campaign.mode_m,
        "mean_m": campaign.mean_m,
        "p10_m": campaign.p10_m,
        "p90_m": campaign.p90_m,
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("campaign: mode %.3f m over %d resolved trials",
                campaign.mode_m, campaign.n_resolved)
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    seed = _resolve_seed(args, config)
    values = [float(v) for v in args.values.split(",")]
    result = sweep(args.param, values, config.scenario,
                   seeds_per_value=args.seeds_per_value, base=config.system,
                   master_seed=seed, threads=args.threads)
    rows = []
    for value, group in zip(result.values, result.trials):
        for trial in group:
            rows.append([repr(value), str(trial.seed), _fmt(trial.resolution_m),
                         str(trial.solver_converged), trial.error or ""])
    _write_csv(out / "sweep.csv",
               [args.param, "seed", "resolution_m", "solver_converged", "error"],
               rows)
    summary = {
        "parameter": result.parameter,
        "values": result.values,
        "mean_resolution_m": result.mean_resolution_m,
        "seeds_per_value": args.seeds_per_value,
        "master_seed": seed,
    }
    with open(out / "sweep_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("sweep %s: %s", result.parameter, result.mean_resolution_m)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="srlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=False, threaded=False):
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--out-dir", default=None,
                       help="output directory (default: config output_dir)")
        if seeded:
            p.add_argument("--seed", type=int, default=None,
                           help="master seed (overrides config)")
        if threaded:
            p.add_argument("--threads", type=int, default=1,
                           help="worker processes (results are identical for any count)")

    p = sub.add_parser("target", help="render the star target to star.pgm")
    common(p)
    p.set_defaults(func=cmd_target)

    p = sub.add_parser("mtf-curves", help="tabulate component MTFs to CSV")
    common(p)
    p.add_argument("--points", type=int, default=512)
    p.set_defaults(func=cmd_mtf_curves)

    p = sub.add_parser("simulate", help="simulate the two subarray observations")
    common(p, seeded=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("superresolve", help="reconstruct an HR image from observations")
    common(p)
    p.add_argument("--meta", required=True, help="metadata sidecar from simulate")
    p.set_defaults(func=cmd_superresolve)

    p = sub.add_parser("measure", help="measure resolution of a star image")
    common(p)
    p.add_argument("--image", required=True, help="PGM image to measure")
    p.add_argument("--meta", required=True, help="metadata sidecar from simulate")
    p.add_argument("--sector", type=int, default=None,
                   help="restrict to one of 8 angular sectors")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("montecarlo", help="run a sensitivity campaign")
    common(p, seeded=True, threaded=True)
    p.add_argument("--trials", type=int, default=None,
                   help="trial count (default: config n_trials)")
    p.add_argument("--progress", action="store_true",
                   help="report completed trials on stderr")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("sweep", help="vary one parameter, others nominal")
    common(p, seeded=True, threaded=True)
    p.add_argument("--param", required=True,
                   help="optics_mtf | clock_phase | jitter | snr | subarray_shift | psf_sigma")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seeds-per-value", type=int, default=5)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    if args.verbose:
        logging.getLogger().setLevel(logging.INFO)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
