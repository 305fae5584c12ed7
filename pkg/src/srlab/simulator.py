"""Raw-image simulator: blur, dual-subarray sampling, and noise.

Chain: an HR target is filtered by the composed system OTF in the
frequency domain, two subarray observations are extracted by sub-pixel
shift + decimation, and white Gaussian noise is added at the configured
SNR.  Boundaries are periodic throughout; scenario targets keep a
uniform border so wraparound never touches the star.

No quantization happens inside the pipeline; values stay float end to
end (PGM export quantizes on write only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import gaussian_kernel, subpixel_shift
from .grid import ImageGrid
from .mtf import GeometryConstants, MtfChainParams, system_otf
from .seeding import child_seed

__all__ = [
    "SystemParams",
    "Observation",
    "SIGMA_PER_FWHM",
    "render_blurred_scene",
    "sample_subarray",
    "add_noise",
    "simulate_observations",
    "REFERENCE_SIGNAL",
]

# Gaussian sigma for a given full-width-at-half-maximum
SIGMA_PER_FWHM = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

# 15% albedo reference signal in counts; SNR and NEM are quoted at it
REFERENCE_SIGNAL = 300.0


@dataclass(frozen=True)
class SystemParams:
    """Full per-trial system parameter record.

    Nominal values follow the mission expectation: 30% optics MTF at HR
    Nyquist, one clock phase, 0.1 px jitter, SNR 60 at the 300-count
    reference signal, 0.5 LR px subarray stagger, 10 LR lines of
    along-track subarray separation.  assumed_psf_sigma is the solver's
    Gaussian estimate of the blur (default: 2 HR px FWHM), deliberately
    distinct from the true OTF chain.
    """

    optics_mtf_at_hr_nyq: float = 0.30
    n_phi: int = 1
    jitter_sigma: float = 0.1
    snr_at_300: float = 60.0
    subarray_shift_ax: float = 0.5
    subarray_shift_al_lines: int = 10
    assumed_psf_sigma: float = 2.0 * SIGMA_PER_FWHM
    geometry: GeometryConstants = field(default_factory=GeometryConstants)

    def __post_init__(self):
        if self.snr_at_300 <= 0:
            raise ValueError("SNR must be > 0")
        if not 0.0 <= self.subarray_shift_ax < 1.0:
            raise ValueError("subarray shift must be in [0, 1) LR pixels")
        if self.assumed_psf_sigma <= 0:
            raise ValueError("assumed PSF sigma must be > 0")
        if self.subarray_shift_al_lines < 0:
            raise ValueError("along-track separation must be >= 0 lines")

    def mtf_chain(self) -> MtfChainParams:
        return MtfChainParams(
            optics_mtf_at_hr_nyq=self.optics_mtf_at_hr_nyq,
            n_phi=self.n_phi,
            jitter_sigma=self.jitter_sigma,
        )

    @property
    def noise_sigma(self) -> float:
        """White-noise standard deviation in counts at the reference signal."""
        return REFERENCE_SIGNAL / self.snr_at_300


@dataclass
class Observation:
    """One low-resolution subarray image plus its forward-model metadata.

    shift_hr is the true (along, across) shift in HR pixels relative to
    observation 1; registration is assumed known, so the solver receives
    these exact values.  assumed_psf is the solver-side blur kernel, not
    the true OTF.
    """

    image: ImageGrid
    shift_hr: tuple[float, float]
    decimation: tuple[int, int]
    assumed_psf: np.ndarray
    noise_sigma: float

    def __post_init__(self):
        if self.decimation[0] < 1 or self.decimation[1] < 1:
            raise ValueError("decimation factors must be >= 1")
        if not all(math.isfinite(s) for s in self.shift_hr):
            raise ValueError("shift components must be finite")
        if abs(float(self.assumed_psf.sum()) - 1.0) > 1e-9:
            raise ValueError("assumed PSF must sum to 1")


def _spectral_downsample(spectrum: np.ndarray, out_shape: tuple[int, int]) -> np.ndarray:
    """Crop a centered FFT spectrum to a coarser grid (sinc interpolation)."""
    h, w = spectrum.shape
    h2, w2 = out_shape
    shifted = np.fft.fftshift(spectrum)
    r0, c0 = h // 2 - h2 // 2, w // 2 - w2 // 2
    cropped = shifted[r0:r0 + h2, c0:c0 + w2]
    return np.fft.ifftshift(cropped) * (h2 * w2) / (h * w)


def render_blurred_scene(target: ImageGrid, params) -> ImageGrid:
    """Filter an HR target by the system OTF; resample to HR pitch 1.

    params is a SystemParams (the usual case) or a bare MtfChainParams.
    The OTF is evaluated on the target's own frequency grid in cycles per
    HR sample (grid frequency divided by pitch).  Supersampled targets
    (pitch < 1) are band-limited to the HR band and decimated spectrally,
    which is exact periodic sinc interpolation.  DC gain is 1, so the
    mean is preserved.
    """
    pitch = target.pitch_scalar
    if pitch > 1.0:
        raise ValueError("target must be at or above HR sampling density (pitch <= 1)")
    h, w = target.shape
    if h % 2 or w % 2:
        raise ValueError(f"target dimensions must be even, got {h}x{w}")
    target.validate()

    chain = params.mtf_chain() if isinstance(params, SystemParams) else params
    fy = np.fft.fftfreq(h) / pitch
    fx = np.fft.fftfreq(w) / pitch
    otf = system_otf(chain, fx[None, :], fy[:, None])
    spectrum = np.fft.fft2(target.data) * otf

    if pitch != 1.0:
        h2 = h * pitch
        w2 = w * pitch
        if abs(h2 - round(h2)) > 1e-9 or abs(w2 - round(w2)) > 1e-9:
            raise ValueError("supersampled extent must map to an integer HR grid")
        h2, w2 = int(round(h2)), int(round(w2))
        if h2 % 2 or w2 % 2:
            raise ValueError("HR output dimensions must be even")
        spectrum = _spectral_downsample(spectrum, (h2, w2))

    out = np.fft.ifft2(spectrum).real
    return ImageGrid(out, pitch=1.0, origin=target.origin)


def sample_subarray(blurred: ImageGrid, shift_hr: tuple[float, float],
                    decimation: tuple[int, int]) -> ImageGrid:
    """Shift by a sub-pixel amount, then decimate.

    Output cell (i, j) samples the input at (i*s_al + d_al, j*s_ax +
    d_ax) with periodic boundaries.  Integer shifts are exact circular
    rolls; fractional shifts use the frequency-domain phase ramp.
    """
    if blurred.pitch != (1.0, 1.0):
        raise ValueError("subarray sampling expects an HR grid at pitch 1")
    s_al, s_ax = int(decimation[0]), int(decimation[1])
    h, w = blurred.shape
    if s_al < 1 or s_ax < 1:
        raise ValueError("decimation factors must be >= 1")
    if s_al > h or s_ax > w:
        raise ValueError(f"decimation {decimation} exceeds image size {h}x{w}")

    shifted = subpixel_shift(blurred.data, shift_hr)
    n_al, n_ax = h // s_al, w // s_ax
    sampled = shifted[:n_al * s_al:s_al, :n_ax * s_ax:s_ax]
    origin = (blurred.origin[0] + float(shift_hr[0]),
              blurred.origin[1] + float(shift_hr[1]))
    return ImageGrid(sampled.copy(), pitch=(float(s_al), float(s_ax)), origin=origin)


def add_noise(image: ImageGrid, snr_at_300: float, rng_seed: int
              ) -> tuple[ImageGrid, float]:
    """Add i.i.d. zero-mean Gaussian noise at sigma = 300/SNR counts.

    The noise is signal-independent (white); returns the sigma used.
    Deterministic for a given seed.
    """
    if snr_at_300 <= 0:
        raise ValueError("SNR must be > 0")
    sigma = REFERENCE_SIGNAL / snr_at_300
    rng = np.random.default_rng(rng_seed)
    noisy = image.data + rng.normal(0.0, sigma, size=image.shape)
    return ImageGrid(noisy, pitch=image.pitch, origin=image.origin), sigma


def simulate_observations(target: ImageGrid, params: SystemParams, rng_seed: int
                          ) -> tuple[Observation, Observation]:
    """Produce the two staggered subarray observations of a target.

    One blur pass feeds both subarrays.  Observation 1 samples the HR
    grid at shift (0, 0); observation 2 at the along-track line
    separation plus the across-track stagger, both expressed in HR
    pixels (1 LR pixel = 2 HR samples).  Noise streams are derived as
    child seeds (seed, observation index), so the pair is independent
    of evaluation order.
    """
    blurred = render_blurred_scene(target, params)
    decimation = (1, 2)
    lr_per_hr = params.geometry.lr_pixel_pitch_um / params.geometry.hr_sample_pitch_um
    shifts = [
        (0.0, 0.0),
        (params.subarray_shift_al_lines * lr_per_hr,
         params.subarray_shift_ax * lr_per_hr),
    ]
    psf = gaussian_kernel(params.assumed_psf_sigma)
    observations = []
    for k, shift in enumerate(shifts):
        sampled = sample_subarray(blurred, shift, decimation)
        noisy, sigma = add_noise(sampled, params.snr_at_300, child_seed(rng_seed, k))
        observations.append(Observation(
            image=noisy,
            shift_hr=shift,
            decimation=decimation,
            assumed_psf=psf,
            noise_sigma=sigma,
        ))
    return observations[0], observations[1]
