"""MAP super-resolution: L2 fidelity + bilateral-TV prior, steepest descent.

The forward operator per observation is blur (circular convolution with
the observation's assumed PSF), sub-pixel shift, then decimation.  Its
exact adjoint is zero-fill upsampling, inverse shift, correlation.  The
descent direction is the calculus-correct gradient of the cost; an
adaptive step keeps the cost trace non-increasing (halve on failure,
recover by 1.2x up to the initial step).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .fourier import kernel_transfer, shift_multiplier_2d
from .grid import ImageGrid
from .simulator import Observation

__all__ = [
    "SolverConfig",
    "SrResult",
    "forward_model",
    "adjoint_model",
    "btv_penalty",
    "btv_gradient",
    "cost",
    "super_resolve",
    "bicubic_upsample",
]


@dataclass(frozen=True)
class SolverConfig:
    """Reconstruction knobs.

    lam weights the BTV prior against the L2 fidelity term; alpha is the
    BTV spatial decay and p_radius its window radius.  beta0 is the
    initial (and maximum) step size.  sr_factor, when given, must match
    the observations' decimation.
    """

    lam: float = 0.01
    alpha: float = 0.7
    p_radius: int = 2
    beta0: float = 1.0
    max_iters: int = 200
    rel_tol: float = 1e-5
    sr_factor: tuple[int, int] | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.p_radius < 1:
            raise ValueError("BTV window radius must be >= 1")
        if self.beta0 <= 0:
            raise ValueError("initial step size must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SrResult:
    """Reconstruction output: HR estimate, per-iteration cost, stop reason."""

    image: ImageGrid
    cost_trace: list[float]
    iterations_run: int
    converged: bool


def _hr_shape(obs: Observation) -> tuple[int, int]:
    s_al, s_ax = obs.decimation
    return (obs.image.height * s_al, obs.image.width * s_ax)


def _observation_transfer(obs: Observation, hr_shape: tuple[int, int]) -> np.ndarray:
    """Frequency multiplier of blur + shift on the HR grid (Hermitian)."""
    k = kernel_transfer(obs.assumed_psf, hr_shape)
    ramp = shift_multiplier_2d(hr_shape, obs.shift_hr)
    return k * ramp


def _forward(x: np.ndarray, transfer: np.ndarray, decimation: tuple[int, int]) -> np.ndarray:
    full = np.fft.ifft2(np.fft.fft2(x) * transfer).real
    return full[::decimation[0], ::decimation[1]]


def _adjoint(r: np.ndarray, transfer: np.ndarray, decimation: tuple[int, int],
             hr_shape: tuple[int, int]) -> np.ndarray:
    up = np.zeros(hr_shape)
    up[::decimation[0], ::decimation[1]] = r
    return np.fft.ifft2(np.fft.fft2(up) * np.conj(transfer)).real


def forward_model(x: ImageGrid, obs: Observation) -> ImageGrid:
    """Apply the observation operator: blur, shift, decimate."""
    hr_shape = _hr_shape(obs)
    if x.shape != hr_shape:
        raise ValueError(f"estimate shape {x.shape} does not match observation "
                         f"geometry {hr_shape}")
    transfer = _observation_transfer(obs, hr_shape)
    lr = _forward(x.data, transfer, obs.decimation)
    return ImageGrid(lr, pitch=(float(obs.decimation[0]), float(obs.decimation[1])),
                     origin=(x.origin[0] + obs.shift_hr[0], x.origin[1] + obs.shift_hr[1]))


def adjoint_model(r: ImageGrid, obs: Observation) -> ImageGrid:
    """Exact adjoint of forward_model: zero-fill, inverse shift, correlate."""
    if r.shape != obs.image.shape:
        raise ValueError(f"residual shape {r.shape} does not match observation "
                         f"{obs.image.shape}")
    hr_shape = _hr_shape(obs)
    transfer = _observation_transfer(obs, hr_shape)
    hr = _adjoint(r.data, transfer, obs.decimation, hr_shape)
    return ImageGrid(hr, pitch=1.0)


def _btv_pairs(p_radius: int):
    """Shift pairs (l, m) with m in [0, P], l in [-P, P], l + m > 0."""
    return [(l, m)
            for m in range(0, p_radius + 1)
            for l in range(-p_radius, p_radius + 1)
            if l + m > 0]


def btv_penalty(x: np.ndarray | ImageGrid, alpha: float, p_radius: int) -> float:
    """Bilateral total variation: decayed L1 norms of multi-shift differences.

    Sum over (l, m) with m in [0, P], l in [-P, P], l + m > 0 of
    alpha^(|l|+|m|) * ||x - shift(x, l, m)||_1 with circular shifts
    (l columns, m rows).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    if p_radius < 1:
        raise ValueError("BTV window radius must be >= 1")
    data = x.data if isinstance(x, ImageGrid) else np.asarray(x)
    total = 0.0
    for l, m in _btv_pairs(p_radius):
        w = alpha ** (abs(l) + abs(m))
        total += w * float(np.abs(data - np.roll(data, (m, l), axis=(0, 1))).sum())
    return total


def btv_gradient(x: np.ndarray | ImageGrid, alpha: float, p_radius: int) -> np.ndarray:
    """Subgradient of btv_penalty, with sign(0) = 0."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    if p_radius < 1:
        raise ValueError("BTV window radius must be >= 1")
    data = x.data if isinstance(x, ImageGrid) else np.asarray(x)
    grad = np.zeros_like(data)
    for l, m in _btv_pairs(p_radius):
        w = alpha ** (abs(l) + abs(m))
        s = np.sign(data - np.roll(data, (m, l), axis=(0, 1)))
        grad += w * (s - np.roll(s, (-m, -l), axis=(0, 1)))
    return grad


def cost(x: ImageGrid, observations, cfg: SolverConfig) -> float:
    """Full MAP cost: sum of squared residuals plus lam * BTV."""
    total = 0.0
    for obs in observations:
        residual = obs.image.data - forward_model(x, obs).data
        total += float((residual * residual).sum())
    if cfg.lam > 0:
        total += cfg.lam * btv_penalty(x.data, cfg.alpha, cfg.p_radius)
    return total


def bicubic_upsample(lr: np.ndarray | ImageGrid, decimation: tuple[int, int]) -> np.ndarray:
    """Cubic-spline upsample aligned so output[i*s] == input[i], periodic."""
    data = lr.data if isinstance(lr, ImageGrid) else np.asarray(lr, dtype=np.float64)
    s_al, s_ax = decimation
    rows = np.arange(data.shape[0] * s_al, dtype=np.float64) / s_al
    cols = np.arange(data.shape[1] * s_ax, dtype=np.float64) / s_ax
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return ndimage.map_coordinates(data, [rr, cc], order=3, mode="grid-wrap")


def _alias_guard_lowpass(x: np.ndarray, decimation: tuple[int, int]) -> np.ndarray:
    """Zero frequencies above the LR Nyquist of each decimated axis.

    Interpolated upsamples keep a residual alias ghost above the LR
    Nyquist; left in the warm start it reads as spurious modulation that
    the data cannot correct when the subarray phase diversity is poor.
    Starting alias-free leaves everything above the LR band to be
    restored by the observations alone.
    """
    spectrum = np.fft.fft2(x)
    for axis, s in enumerate(decimation):
        if s > 1:
            f = np.fft.fftfreq(x.shape[axis])
            keep = np.abs(f) < 0.5 / s
            shape = [1, 1]
            shape[axis] = x.shape[axis]
            spectrum *= keep.reshape(shape)
    return np.fft.ifft2(spectrum).real


MAX_HALVINGS = 30


def super_resolve(observations, init="auto", cfg: SolverConfig | None = None) -> SrResult:
    """Minimize the MAP cost by adaptive-step steepest descent.

    The descent direction is -2 * sum_k adjoint(y_k - forward(x)) plus
    lam * btv_gradient(x).  A step that fails to strictly decrease the
    cost halves the step size (up to 30 times, then the iteration stops
    as stationary); each accepted step grows it by 1.2x capped at beta0.
    Stops when the relative cost decrease falls below rel_tol or at
    max_iters (reported via the converged flag, not an error).
    """
    observations = list(observations)
    if not observations:
        raise ValueError("need at least one observation")
    cfg = cfg or SolverConfig()
    decimation = observations[0].decimation
    if any(o.decimation != decimation for o in observations):
        raise ValueError("all observations must share decimation factors")
    if cfg.sr_factor is not None and tuple(cfg.sr_factor) != tuple(decimation):
        raise ValueError(f"sr_factor {cfg.sr_factor} does not match observation "
                         f"decimation {decimation}")
    hr_shape = _hr_shape(observations[0])
    if any(_hr_shape(o) != hr_shape for o in observations):
        raise ValueError("observations imply inconsistent HR geometry")

    transfers = [_observation_transfer(o, hr_shape) for o in observations]
    ys = [o.image.data for o in observations]

    if isinstance(init, str) and init == "auto":
        x = _alias_guard_lowpass(bicubic_upsample(ys[0], decimation), decimation)
    else:
        x = np.array(init.data if isinstance(init, ImageGrid) else init,
                     dtype=np.float64)
        if x.shape != hr_shape:
            raise ValueError(f"init shape {x.shape} does not match HR geometry {hr_shape}")

    def total_cost(xc: np.ndarray) -> float:
        c = 0.0
        for y, t in zip(ys, transfers):
            resid = y - _forward(xc, t, decimation)
            c += float((resid * resid).sum())
        if cfg.lam > 0:
            c += cfg.lam * btv_penalty(xc, cfg.alpha, cfg.p_radius)
        return c

    def gradient(xc: np.ndarray) -> np.ndarray:
        g = np.zeros(hr_shape)
        for y, t in zip(ys, transfers):
            resid = y - _forward(xc, t, decimation)
            g -= 2.0 * _adjoint(resid, t, decimation, hr_shape)
        if cfg.lam > 0:
            g += cfg.lam * btv_gradient(xc, cfg.alpha, cfg.p_radius)
        return g

    current = total_cost(x)
    if not np.isfinite(current):
        raise FloatingPointError("non-finite cost at initialization")
    trace = [current]
    beta = cfg.beta0
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        g = gradient(x)
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            candidate = x - beta * g
            c_new = total_cost(candidate)
            if not np.isfinite(c_new):
                raise FloatingPointError("non-finite cost during iteration")
            if c_new < current:
                accepted = True
                break
            beta *= 0.5
        if not accepted:
            # step size collapsed: stationary within numerical resolution
            converged = True
            iterations -= 1
            break
        x = candidate
        previous, current = current, c_new
        trace.append(current)
        beta = min(beta * 1.2, cfg.beta0)
        if (previous - current) <= cfg.rel_tol * max(previous, np.finfo(float).tiny):
            converged = True
            break

    return SrResult(
        image=ImageGrid(x, pitch=1.0),
        cost_trace=trace,
        iterations_run=iterations,
        converged=converged,
    )
