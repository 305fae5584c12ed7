#!/usr/bin/env python3
"""Run one nominal-parameter trial and print the resolution report.

Renders the desk-scale star, simulates the two subarray observations at
the nominal system parameters, reconstructs, and measures.  Writes the
modulation curve CSV next to the chosen output directory.
"""

import argparse
import csv
from pathlib import Path

from srlab import (SystemParams, generate_spoke_target, measure_resolution,
                   simulate_observations, super_resolve)
from srlab.scenario import default_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out-dir", default="out_nominal")
    args = parser.parse_args()

    scenario = default_scenario()
    params = SystemParams()
    target = generate_spoke_target(scenario.star, scenario.grid_size)
    obs1, obs2 = simulate_observations(target, params, args.seed)
    result = super_resolve([obs1, obs2], cfg=scenario.solver)
    report = measure_resolution(result.image, scenario.star.center,
                                scenario.star.cycles, scenario.nem_signal,
                                params.noise_sigma, scenario.star.outer_radius,
                                n_rings=scenario.n_rings)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "curve.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["f_cyc_per_hr_px", "modulation", "nem"])
        for f, m in report.curve:
            writer.writerow([repr(f), repr(m), repr(report.nem)])

    print(f"seed:             {args.seed}")
    print(f"solver iterations {result.iterations_run}")
    print(f"NEM:              {report.nem:.4f}")
    print(f"crossing:         {report.f_cross:.4f} cycles/HR px"
          if report.f_cross else "crossing:         none")
    print(f"resolution:       {report.resolution_m:.3f} m"
          if report.resolution_m else "resolution:       not resolved")
    print(f"curve written to  {out / 'curve.csv'}")


if __name__ == "__main__":
    main()
