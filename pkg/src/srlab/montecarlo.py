"""Monte Carlo campaigns and one-at-a-time parameter sweeps.

Each trial samples system parameters from their distributions, runs the
full simulate -> super-resolve -> measure pipeline, and records the
achieved resolution.  Trials derive their random streams from (master
seed, trial index), so campaigns are bit-reproducible regardless of
worker count or execution order.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .metrology import measure_resolution
from .scenario import Scenario
from .seeding import child_seed
from .simulator import SIGMA_PER_FWHM, SystemParams, simulate_observations
from .solver import super_resolve
from .target import generate_spoke_target

logger = logging.getLogger(__name__)

__all__ = [
    "ParameterDistribution",
    "ParameterSpec",
    "TrialResult",
    "CampaignResult",
    "SweepResult",
    "sample_parameters",
    "run_trial",
    "run_campaign",
    "sweep",
    "sweep_grid",
    "PARAMETER_FIELDS",
]

# sampled parameter name -> SystemParams field
PARAMETER_FIELDS = {
    "optics_mtf": "optics_mtf_at_hr_nyq",
    "clock_phase": "n_phi",
    "jitter": "jitter_sigma",
    "snr": "snr_at_300",
    "subarray_shift": "subarray_shift_ax",
    "psf_sigma": "assumed_psf_sigma",
}

# smallest assumed-PSF sigma a perturbed draw may produce, HR pixels
PSF_SIGMA_FLOOR = 0.25


@dataclass(frozen=True)
class ParameterDistribution:
    """One sampled parameter: nominal value, range, and distribution kind.

    kind "gaussian" draws with mean = nominal and sigma = (high-low)/6,
    rejection-resampled into [low, high]; "uniform" draws uniformly on
    [low, high]; "choice" draws uniformly from the discrete choices.
    """

    name: str
    kind: str
    nominal: float
    low: float = 0.0
    high: float = 0.0
    choices: tuple = ()

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "choice"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "choice":
            if not self.choices:
                raise ValueError(f"{self.name}: choice distribution needs choices")
        elif self.low > self.high:
            raise ValueError(f"{self.name}: empty range [{self.low}, {self.high}]")

    def draw(self, rng: np.random.Generator) -> float:
        if self.kind == "choice":
            return float(rng.choice(np.asarray(self.choices, dtype=np.float64)))
        if self.kind == "uniform":
            if self.low == self.high:
                return self.nominal
            return float(rng.uniform(self.low, self.high))
        sigma = (self.high - self.low) / 6.0
        if sigma == 0.0:
            return self.nominal
        while True:
            v = float(rng.normal(self.nominal, sigma))
            if self.low <= v <= self.high:
                return v


@dataclass(frozen=True)
class ParameterSpec:
    """The campaign's sampled-parameter table.

    Defaults mirror the mission variation study: optics MTF 30% in
    10..50% (gaussian), clock phase uniform over {1, 2, 4}, jitter 0.1 in
    0.1..0.2 px (gaussian), SNR 60 in 30..100 (gaussian), subarray shift
    uniform on 0.1..0.5 LR px.

    The assumed-PSF estimate is rebuilt per trial: the solver's Gaussian
    support FWHM is drawn uniformly from {2, 3} HR px and converted to
    sigma.  That half-to-one-pixel support uncertainty is the default
    model of PSF-estimation error; an additional additive Gaussian error
    on the support width (psf_error_sigma, in pixels, floored at
    PSF_SIGMA_FLOOR after conversion) is available for wider studies but
    defaults to zero.
    """

    optics_mtf: ParameterDistribution = ParameterDistribution(
        "optics_mtf", "gaussian", 0.30, 0.10, 0.50)
    clock_phase: ParameterDistribution = ParameterDistribution(
        "clock_phase", "choice", 1, choices=(1, 2, 4))
    jitter: ParameterDistribution = ParameterDistribution(
        "jitter", "gaussian", 0.1, 0.1, 0.2)
    snr: ParameterDistribution = ParameterDistribution(
        "snr", "gaussian", 60.0, 30.0, 100.0)
    subarray_shift: ParameterDistribution = ParameterDistribution(
        "subarray_shift", "uniform", 0.5, 0.1, 0.5)
    psf_width: ParameterDistribution = ParameterDistribution(
        "psf_width", "choice", 2, choices=(2, 3))
    psf_error_sigma: ParameterDistribution = ParameterDistribution(
        "psf_error_sigma", "uniform", 0.0, 0.0, 0.0)

    def rows(self) -> tuple[ParameterDistribution, ...]:
        """Draw order: fixed so a single stream stays reproducible."""
        return (self.optics_mtf, self.clock_phase, self.jitter, self.snr,
                self.subarray_shift, self.psf_width, self.psf_error_sigma)


@dataclass
class TrialResult:
    """Outcome of one pipeline run."""

    params: SystemParams
    resolution_m: float | None
    solver_converged: bool
    seed: int
    wall_time: float
    error: str | None = None


@dataclass
class CampaignResult:
    """Aggregated campaign: trials, resolution histogram, summary stats."""

    trials: list[TrialResult]
    bin_width_m: float
    bin_edges: np.ndarray
    counts: np.ndarray
    mode_m: float
    mean_m: float
    p10_m: float
    p90_m: float
    n_resolved: int
    n_failed: int
    master_seed: int


@dataclass
class SweepResult:
    """One-at-a-time sweep: per-value trials and mean resolutions."""

    parameter: str
    values: list[float]
    trials: list[list[TrialResult]]
    mean_resolution_m: list[float | None]


def sample_parameters(spec: ParameterSpec, rng_seed: int,
                      base: SystemParams | None = None) -> SystemParams:
    """Draw one SystemParams record from the spec, deterministically per seed.

    The assumed-PSF sigma combines the drawn support width (FWHM to
    sigma) with an additive Gaussian estimation error.
    """
    base = base or SystemParams()
    rng = np.random.default_rng(rng_seed)
    draws = {row.name: row.draw(rng) for row in spec.rows()}
    # estimation error perturbs the support width (the row is in pixels
    # of support), then FWHM -> sigma
    width = draws["psf_width"] + float(rng.normal(0.0, draws["psf_error_sigma"]))
    psf_sigma = max(width * SIGMA_PER_FWHM, PSF_SIGMA_FLOOR)
    return replace(
        base,
        optics_mtf_at_hr_nyq=draws["optics_mtf"],
        n_phi=int(draws["clock_phase"]),
        jitter_sigma=draws["jitter"],
        snr_at_300=draws["snr"],
        subarray_shift_ax=draws["subarray_shift"],
        assumed_psf_sigma=psf_sigma,
    )


def run_trial(params: SystemParams, scenario: Scenario, seed: int,
              target=None) -> TrialResult:
    """Run target -> simulate -> super-resolve -> measure for one trial.

    The NEM noise input is the per-trial sigma = 300/SNR.  Non-finite
    pipeline values abort the trial with a recorded failure instead of
    raising, so campaigns continue.
    """
    t0 = time.perf_counter()
    try:
        if target is None:
            target = generate_spoke_target(scenario.star, scenario.grid_size)
        obs1, obs2 = simulate_observations(target, params, seed)
        sr = super_resolve([obs1, obs2], cfg=scenario.solver)
        report = measure_resolution(
            sr.image, scenario.star.center, scenario.star.cycles,
            scenario.nem_signal, params.noise_sigma, scenario.star.outer_radius,
            n_rings=scenario.n_rings)
        return TrialResult(params, report.resolution_m, sr.converged, seed,
                           time.perf_counter() - t0)
    except (ValueError, FloatingPointError) as exc:
        logger.warning("trial seed=%d failed: %s", seed, exc)
        return TrialResult(params, None, False, seed,
                           time.perf_counter() - t0, error=str(exc))


def _campaign_task(args):
    index, spec, scenario, master_seed, target = args
    params = sample_parameters(spec, child_seed(master_seed, index, 0))
    result = run_trial(params, scenario, child_seed(master_seed, index, 1),
                       target=target)
    return index, result


def _run_indexed(runner, tasks, threads: int, progress=None):
    """Run (index, ...) task tuples; results land by index, so the output
    is identical for any worker count or completion order."""
    results = [None] * len(tasks)
    if threads <= 1:
        for i, task in enumerate(tasks):
            idx, res = runner(task)
            results[idx] = res
            if progress:
                progress(i + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            done = 0
            for idx, res in pool.map(runner, tasks):
                results[idx] = res
                done += 1
                if progress:
                    progress(done, len(tasks))
    return results


def run_campaign(spec: ParameterSpec, scenario: Scenario, n_trials: int,
                 master_seed: int, bin_width_m: float = 0.05,
                 threads: int = 1, progress=None) -> CampaignResult:
    """Run n_trials sampled trials and aggregate the resolution histogram.

    Trial i draws parameters with child seed (master, i, 0) and noise
    with (master, i, 1); results are independent of thread count.
    Histogram bins are anchored at multiples of bin_width_m; the mode is
    the center of the most populated bin (ties: smallest).  Trials that
    fail or report no resolution are tallied but excluded from the
    histogram.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    if bin_width_m <= 0:
        raise ValueError("bin width must be > 0")
    target = generate_spoke_target(scenario.star, scenario.grid_size)
    tasks = [(i, spec, scenario, master_seed, target) for i in range(n_trials)]
    trials = _run_indexed(_campaign_task, tasks, threads, progress)

    resolved = [t.resolution_m for t in trials if t.resolution_m is not None]
    n_failed = sum(1 for t in trials if t.error is not None)
    if not resolved:
        errors = [t.error for t in trials if t.error][:5]
        raise RuntimeError(f"campaign produced no resolved trials; "
                           f"first failures: {errors}")

    lo = int(np.floor(min(resolved) / bin_width_m))
    hi = int(np.floor(max(resolved) / bin_width_m))
    edges = np.arange(lo, hi + 2) * bin_width_m
    counts, _ = np.histogram(resolved, bins=edges)
    mode_m = float(edges[int(np.argmax(counts))] + bin_width_m / 2.0)

    return CampaignResult(
        trials=trials, bin_width_m=bin_width_m, bin_edges=edges, counts=counts,
        mode_m=mode_m, mean_m=float(np.mean(resolved)),
        p10_m=float(np.percentile(resolved, 10)),
        p90_m=float(np.percentile(resolved, 90)),
        n_resolved=len(resolved), n_failed=n_failed, master_seed=master_seed,
    )


def _resolve_field(parameter: str) -> str:
    if parameter in PARAMETER_FIELDS:
        return PARAMETER_FIELDS[parameter]
    if parameter in PARAMETER_FIELDS.values():
        return parameter
    raise ValueError(f"unknown parameter {parameter!r}; "
                     f"expected one of {sorted(PARAMETER_FIELDS)}")


def _sweep_task(args):
    index, params, scenario, seed, target = args
    return index, run_trial(params, scenario, seed, target=target)


def sweep(parameter: str, values, scenario: Scenario, seeds_per_value: int = 5,
          base: SystemParams | None = None, master_seed: int = 0,
          threads: int = 1, progress=None) -> SweepResult:
    """Vary one parameter, holding the others at their nominal values.

    Seed j is shared across all swept values (paired noise realizations),
    which stabilizes the monotonicity comparisons.  Mean resolution per
    value covers resolved trials only (None if none resolved).
    """
    values = [v for v in values]
    if len(values) < 2:
        raise ValueError("sweep needs at least 2 values")
    if seeds_per_value < 1:
        raise ValueError("seeds_per_value must be >= 1")
    fname = _resolve_field(parameter)
    base = base or SystemParams()
    target = generate_spoke_target(scenario.star, scenario.grid_size)

    flat_params = []
    for v in values:
        value = int(v) if fname == "n_phi" else float(v)
        flat_params.append(replace(base, **{fname: value}))

    tasks = []
    for vi, params in enumerate(flat_params):
        for j in range(seeds_per_value):
            tasks.append((vi * seeds_per_value + j, params, scenario,
                          child_seed(master_seed, j), target))
    trials_flat = _run_indexed(_sweep_task, tasks, threads, progress)

    trials = [trials_flat[vi * seeds_per_value:(vi + 1) * seeds_per_value]
              for vi in range(len(values))]
    means: list[float | None] = []
    for group in trials:
        resolved = [t.resolution_m for t in group if t.resolution_m is not None]
        means.append(float(np.mean(resolved)) if resolved else None)
    return SweepResult(parameter=parameter, values=[float(v) for v in values],
                       trials=trials, mean_resolution_m=means)


def sweep_grid(param_a: str, values_a, param_b: str, values_b,
               scenario: Scenario, seeds_per_value: int = 5,
               base: SystemParams | None = None, master_seed: int = 0,
               threads: int = 1) -> np.ndarray:
    """Two-parameter grid of mean resolutions (rows: values_a, cols: values_b).

    Entries are NaN where no trial resolved.
    """
    fa, fb = _resolve_field(param_a), _resolve_field(param_b)
    base = base or SystemParams()
    target = generate_spoke_target(scenario.star, scenario.grid_size)
    values_a, values_b = list(values_a), list(values_b)

    tasks = []
    for ai, va in enumerate(values_a):
        for bi, vb in enumerate(values_b):
            kw = {fa: int(va) if fa == "n_phi" else float(va),
                  fb: int(vb) if fb == "n_phi" else float(vb)}
            params = replace(base, **kw)
            for j in range(seeds_per_value):
                idx = (ai * len(values_b) + bi) * seeds_per_value + j
                tasks.append((idx, params, scenario, child_seed(master_seed, j), target))
    flat = _run_indexed(_sweep_task, tasks, threads)

    grid = np.full((len(values_a), len(values_b)), np.nan)
    for ai in range(len(values_a)):
        for bi in range(len(values_b)):
            start = (ai * len(values_b) + bi) * seeds_per_value
            group = flat[start:start + seeds_per_value]
            resolved = [t.resolution_m for t in group if t.resolution_m is not None]
            if resolved:
                grid[ai, bi] = float(np.mean(resolved))
    return grid
