"""Star-image resolution metrology.

Modulation is extracted ring by ring: pixels in a one-pixel-wide annulus
are fit by least squares to the single angular harmonic at the known
cycle count, giving mean level a, amplitude beta and modulation
M = beta/a.  The modulation curve is intersected with the
noise-equivalent modulation 4*sigma/signal; the crossing frequency maps
to meters through the HR ground sample (0.5 cycles/px = 1.25 m).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .grid import ImageGrid
from .mtf import GEOMETRY, GeometryConstants
from .target import sector_mask

logger = logging.getLogger(__name__)

__all__ = [
    "RingFit",
    "ResolutionReport",
    "RingError",
    "AliasedRingError",
    "EmptyRingError",
    "InsufficientCurveError",
    "pixel_angle",
    "ring_modulation",
    "mtf_curve",
    "nem",
    "crossing_frequency",
    "frequency_to_resolution",
    "measure_resolution",
]

# rings below this many samples per cycle are refused as aliased
MIN_SAMPLES_PER_CYCLE = 2.0
# default number of rings in the radius ladder
DEFAULT_N_RINGS = 40


class RingError(ValueError):
    """A single ring could not be fit."""


class AliasedRingError(RingError):
    """Ring sampled too sparsely for its cycle count."""


class EmptyRingError(RingError):
    """Ring annulus leaves the image or holds too few samples."""


class InsufficientCurveError(ValueError):
    """Fewer than three rings survived fitting."""


@dataclass(frozen=True)
class RingFit:
    """Single-ring harmonic fit.

    g is the cycle length in pixels (2*pi*r/cycles); f = 1/g is in cycles
    per grid sample of the measured image.  flagged marks modulations
    above 1, which only pathological (for instance unblurred binary)
    inputs produce.
    """

    radius: float
    g: float
    f: float
    a: float
    beta_amp: float
    alpha0: float
    modulation: float
    n_samples: int
    flagged: bool


@dataclass
class ResolutionReport:
    """Measured modulation curve and the resolution it implies.

    curve holds (f, M) pairs sorted by ascending f, with f in cycles per
    HR pixel.  resolution_m is present exactly when f_cross is.
    ladder_limited marks the zero-NEM policy (crossing pinned to the
    finest measured frequency); degenerate_crossing marks a curve that
    starts at or below the NEM.
    """

    curve: list[tuple[float, float]]
    nem: float
    f_cross: float | None
    resolution_m: float | None
    sector: int | None = None
    rings_dropped: int = 0
    ladder_limited: bool = False
    degenerate_crossing: bool = False


def pixel_angle(x: float, y: float) -> float:
    """Angle atan2(x, y) of a pixel offset from the star center, in [0, 2*pi)."""
    if x == 0 and y == 0:
        raise ValueError("angle undefined at the center pixel")
    a = math.atan2(x, y)
    if a < 0:
        a += 2.0 * math.pi
    # a tiny negative angle can round up to exactly 2*pi
    return 0.0 if a >= 2.0 * math.pi else a


def ring_modulation(image: ImageGrid, center: tuple[float, float], radius: float,
                    cycles: int, mask: np.ndarray | ImageGrid | None = None) -> RingFit:
    """Fit the angular harmonic at the known cycle count on one annulus.

    Gathers pixels with center distance in [radius-0.5, radius+0.5),
    optionally restricted by a binary mask, and projects intensity onto
    cos/sin(cycles * alpha).  Raises AliasedRingError below 2 samples per
    cycle and EmptyRingError when the annulus leaves the image.
    """
    if radius < 2:
        raise ValueError("radius must be >= 2 pixels")
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    h, w = image.shape
    r0, c0 = center
    margin = min(r0, h - 1 - r0, c0, w - 1 - c0)
    if radius + 0.5 > margin + 1e-9:
        raise EmptyRingError(f"empty ring: radius {radius} leaves the image")

    # restrict work to the annulus bounding box
    lo_r = max(0, int(np.floor(r0 - radius - 1)))
    hi_r = min(h, int(np.ceil(r0 + radius + 2)))
    lo_c = max(0, int(np.floor(c0 - radius - 1)))
    hi_c = min(w, int(np.ceil(c0 + radius + 2)))
    y = (np.arange(lo_r, hi_r, dtype=np.float64) - r0)[:, None]
    x = (np.arange(lo_c, hi_c, dtype=np.float64) - c0)[None, :]
    rr = np.hypot(x, y)
    in_ring = (rr >= radius - 0.5) & (rr < radius + 0.5)
    n_full = int(in_ring.sum())
    if mask is not None:
        mdata = mask.data if isinstance(mask, ImageGrid) else np.asarray(mask)
        in_ring = in_ring & (mdata[lo_r:hi_r, lo_c:hi_c] > 0.5)
    n = int(in_ring.sum())
    if n_full == 0 or n < 8:
        raise EmptyRingError(f"empty ring: {n} samples at radius {radius}")

    coverage = n / n_full
    samples_per_cycle = n / (cycles * coverage)
    if samples_per_cycle < MIN_SAMPLES_PER_CYCLE:
        raise AliasedRingError(
            f"aliased ring: {samples_per_cycle:.2f} samples/cycle at radius {radius}")

    vals = image.data[lo_r:hi_r, lo_c:hi_c][in_ring]
    ring_alpha = np.arctan2(x, y)[in_ring]
    # exact least squares of mean + single harmonic: a raw projection
    # would pick up the pixel grid's angular-density harmonics (a
    # constant image must fit to zero modulation)
    design = np.column_stack([np.ones(n), np.cos(cycles * ring_alpha),
                              np.sin(cycles * ring_alpha)])
    (a, c, s), *_ = np.linalg.lstsq(design, vals, rcond=None)
    beta = math.hypot(c, s)
    alpha0 = math.atan2(s, c) / cycles
    modulation = beta / a if a > 0 else math.inf
    g = 2.0 * math.pi * radius / cycles
    return RingFit(
        radius=float(radius), g=g, f=1.0 / g, a=float(a), beta_amp=float(beta),
        alpha0=float(alpha0), modulation=float(modulation), n_samples=n,
        flagged=bool(modulation > 1.0),
    )


def mtf_curve(image: ImageGrid, center: tuple[float, float], cycles: int,
              radii, mask=None) -> tuple[list[RingFit], int]:
    """Fit one ring per radius; returns (fits sorted by ascending f, dropped).

    radii must be strictly decreasing (outer to inner, so frequency
    ascends).  Rings refused as aliased or empty are dropped and counted.
    Raises InsufficientCurveError if fewer than three rings survive.
    """
    radii = list(radii)
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    fits: list[RingFit] = []
    dropped = 0
    for r in radii:
        try:
            fits.append(ring_modulation(image, center, r, cycles, mask=mask))
        except RingError:
            dropped += 1
    if dropped:
        logger.warning("dropped %d of %d rings (aliased or empty)", dropped, len(radii))
    if len(fits) < 3:
        raise InsufficientCurveError(
            f"insufficient curve: only {len(fits)} of {len(radii)} rings usable")
    fits.sort(key=lambda rf: rf.f)
    return fits, dropped


def nem(signal: float, noise_sigma: float) -> float:
    """Noise-equivalent modulation 4*sigma/signal."""
    if signal <= 0:
        raise ValueError("signal must be > 0")
    if noise_sigma < 0:
        raise ValueError("noise sigma must be >= 0")
    return 4.0 * noise_sigma / signal


def crossing_frequency(curve, nem_value: float) -> float | None:
    """First frequency where the modulation curve falls to the NEM.

    curve is a sequence of (f, M) sorted by ascending f with at least
    three points.  Scans from the lowest frequency for the first bracket
    where M transitions from above to at-or-below the NEM and linearly
    interpolates inside it.  A curve that never falls below returns
    None; a curve already at or below the NEM at its first point returns
    that first frequency (degenerate bracket).
    """
    pts = [(float(f), float(m)) for f, m in curve]
    if len(pts) < 3:
        raise ValueError("curve needs at least 3 points")
    fs = [f for f, _ in pts]
    if any(b <= a for a, b in zip(fs, fs[1:])):
        raise ValueError("curve must be sorted by strictly ascending frequency")
    if pts[0][1] <= nem_value:
        logger.warning("curve starts at or below NEM; degenerate crossing at f=%g",
                       pts[0][0])
        return pts[0][0]
    for (f0, m0), (f1, m1) in zip(pts, pts[1:]):
        if m0 > nem_value >= m1:
            return f0 + (f1 - f0) * (m0 - nem_value) / (m0 - m1)
    return None


def frequency_to_resolution(f: float, geometry: GeometryConstants = GEOMETRY) -> float:
    """Map cycles per HR pixel to meters via the HR Nyquist anchor.

    0.5 cycles/px corresponds to 1.25 m, so resolution = 1.25 * 0.5 / f.
    """
    if f <= 0:
        raise ValueError("frequency must be > 0")
    return geometry.hr_gsd_m * (geometry.f_nyq_hr / f)


def _smooth(values: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average with reflected ends."""
    if width <= 1:
        return values
    pad = width // 2
    padded = np.concatenate([values[pad:0:-1], values, values[-2:-pad - 2:-1]])
    kernel = np.ones(width) / width
    return np.convolve(padded, kernel, mode="valid")


def measure_resolution(image: ImageGrid, center: tuple[float, float], cycles: int,
                       signal: float, noise_sigma: float, outer_radius: float,
                       sector: int | None = None, sector_count: int = 8,
                       n_rings: int = DEFAULT_N_RINGS, analysis_oversample: int = 4,
                       crossing_smooth: int = 5,
                       geometry: GeometryConstants = GEOMETRY) -> ResolutionReport:
    """Full resolution measurement on a star image.

    Rings are evaluated on a sinc-upsampled copy of the image
    (analysis_oversample per axis) so the harmonic fit stays well
    sampled out to the HR Nyquist; the information content is unchanged
    and frequencies are still reported in cycles per HR pixel.  The
    radius ladder is geometric from just inside the star's outer radius
    down to the aliasing / HR-band limit.  The NEM comes from the
    scenario signal and noise values (system constants, not re-estimated
    from the image).

    center and outer_radius are in HR pixels (star geometry metadata).
    The report's curve holds the raw per-ring fits; the NEM intersection
    runs on a crossing_smooth-point moving average of it, which averages
    out the per-ring pixel-geometry jitter.

    With zero noise the NEM is 0 and can never be crossed; the report
    then pins the crossing to the finest measured frequency and sets
    ladder_limited.
    """
    if analysis_oversample < 1:
        raise ValueError("analysis_oversample must be >= 1")
    hr_pitch = image.pitch_scalar
    if analysis_oversample > 1:
        from .fourier import sinc_upsample
        image = ImageGrid(sinc_upsample(image.data, analysis_oversample),
                          pitch=hr_pitch / analysis_oversample)
    pitch = image.pitch_scalar

    # ladder bounds in grid samples: stay inside the star, above the
    # sampling limit, and inside the HR information band f_hr <= 0.5
    r_top = (outer_radius - 3.0) / pitch
    r_alias = cycles * MIN_SAMPLES_PER_CYCLE / (2.0 * math.pi)
    r_band = cycles / (2.0 * math.pi * geometry.f_nyq_hr * pitch)
    r_bottom = max(r_alias, r_band, 2.0)
    if r_top <= r_bottom:
        raise ValueError(f"outer radius {outer_radius} leaves no measurable rings "
                         f"above the aliasing radius {r_bottom * pitch:.1f}")
    radii = np.geomspace(r_top, r_bottom, n_rings)

    center_grid = (center[0] / pitch, center[1] / pitch)
    mask = None
    if sector is not None:
        mask = sector_mask(image.shape, center_grid, sector, sector_count).data

    fits, dropped = mtf_curve(image, center_grid, cycles, radii, mask=mask)
    curve = [(rf.f / pitch, rf.modulation) for rf in fits]
    smoothed = list(zip([f for f, _ in curve],
                        _smooth(np.array([m for _, m in curve]),
                                crossing_smooth)))
    nem_value = nem(signal, noise_sigma)

    ladder_limited = False
    degenerate = False
    if nem_value <= 0:
        f_cross = curve[-1][0]
        ladder_limited = True
    else:
        degenerate = bool(smoothed[0][1] <= nem_value)
        f_cross = crossing_frequency(smoothed, nem_value)

    resolution_m = frequency_to_resolution(f_cross, geometry) if f_cross else None
    return ResolutionReport(
        curve=[(float(f), float(m)) for f, m in curve], nem=float(nem_value),
        f_cross=None if f_cross is None else float(f_cross),
        resolution_m=None if resolution_m is None else float(resolution_m),
        sector=sector, rings_dropped=dropped, ladder_limited=ladder_limited,
        degenerate_crossing=degenerate,
    )
