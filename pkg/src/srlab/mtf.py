"""Component MTFs of the imaging chain and their 2-D composition.

All frequencies are in cycles per HR sample (the 4 um focal-plane pitch)
unless noted.  HR Nyquist is 0.5 cycles/sample = 125 lp/mm; the detector
pixel is two HR samples wide, so its Nyquist is 0.25 cycles/sample.

The composed system OTF is zero-phase (pure magnitude): shifts are
handled by the motion operator in the simulator, never by OTF phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeometryConstants",
    "MtfChainParams",
    "lpmm_to_cycles_per_hr_sample",
    "diffraction_mtf",
    "diffraction_cutoff_lpmm",
    "optics_mtf",
    "footprint_mtf",
    "sampling_mtf",
    "smear_mtf",
    "jitter_mtf",
    "system_otf",
    "mtf_curve_table",
]


@dataclass(frozen=True)
class GeometryConstants:
    """Fixed focal-plane and ground-sampling geometry.

    The detector pixel is exactly twice the HR sample in both focal-plane
    pitch and ground footprint, so the LR Nyquist is half the HR Nyquist.
    """

    hr_sample_pitch_um: float = 4.0
    lr_pixel_pitch_um: float = 8.0
    hr_gsd_m: float = 1.25
    lr_igfov_m: float = 2.5
    f_nyq_hr: float = 0.5
    f_nyq_lr: float = 0.25

    def __post_init__(self):
        if self.lr_pixel_pitch_um != 2.0 * self.hr_sample_pitch_um:
            raise ValueError("LR pixel pitch must be 2x the HR sample pitch")
        if self.lr_igfov_m != 2.0 * self.hr_gsd_m:
            raise ValueError("LR footprint must be 2x the HR ground sample")
        if self.f_nyq_lr != self.f_nyq_hr / 2.0:
            raise ValueError("LR Nyquist must be half the HR Nyquist")


@dataclass(frozen=True)
class MtfChainParams:
    """Knobs of the blur chain applied by the simulator.

    detector_width_w is the square detector aperture in HR pixels (2.0
    for the 8 um pixel on the 4 um grid).  smear_f_N is the smear model's
    reference frequency, calibrated so one clock phase reproduces the
    expected 90% / 64% anchors at half and full HR Nyquist.
    wavelength_um / f_number are optional analysis inputs for the
    diffraction model only; they play no role in the composed OTF.
    """

    optics_mtf_at_hr_nyq: float = 0.30
    n_phi: int = 1
    jitter_sigma: float = 0.1
    detector_width_w: float = 2.0
    smear_f_N: float = 0.5
    wavelength_um: float | None = None
    f_number: float | None = None

    def __post_init__(self):
        if not 0.0 < self.optics_mtf_at_hr_nyq <= 1.0:
            raise ValueError("optics MTF at HR Nyquist must be in (0, 1]")
        if self.n_phi < 1:
            raise ValueError("clock phase count must be >= 1")
        if self.jitter_sigma < 0:
            raise ValueError("jitter sigma must be >= 0")
        if self.detector_width_w <= 0:
            raise ValueError("detector width must be > 0")
        if self.smear_f_N <= 0:
            raise ValueError("smear reference frequency must be > 0")


GEOMETRY = GeometryConstants()


def lpmm_to_cycles_per_hr_sample(f_lpmm, geometry: GeometryConstants = GEOMETRY):
    """Convert a focal-plane frequency in line pairs/mm to cycles per HR sample."""
    f_lpmm = np.asarray(f_lpmm, dtype=np.float64)
    if np.any(f_lpmm < 0):
        raise ValueError("frequency must be >= 0")
    return f_lpmm * geometry.hr_sample_pitch_um / 1000.0


def diffraction_mtf(sigma_norm):
    """Diffraction-limited MTF of a circular aperture.

    Takes the frequency normalized by the aperture cutoff.  Returns
    (2/pi)(acos(s) - s*sqrt(1-s^2)) below cutoff, 0 at and beyond it.
    Analysis/validation only: the composed system OTF uses the parametric
    realizable-optics model instead.
    """
    s = np.asarray(sigma_norm, dtype=np.float64)
    if np.any(s < 0):
        raise ValueError("normalized frequency must be >= 0")
    sc = np.clip(s, 0.0, 1.0)
    val = (2.0 / np.pi) * (np.arccos(sc) - sc * np.sqrt(1.0 - sc * sc))
    return np.where(s >= 1.0, 0.0, val)


def diffraction_cutoff_lpmm(wavelength_um: float, f_number: float) -> float:
    """Aperture cutoff frequency 1/(lambda F#) in lp/mm."""
    if wavelength_um <= 0 or f_number <= 0:
        raise ValueError("wavelength and F-number must be > 0")
    return 1000.0 / (wavelength_um * f_number)


def optics_mtf(f, m_nyq, geometry: GeometryConstants = GEOMETRY):
    """Realizable-optics MTF: exponential family pinned to m_nyq at HR Nyquist.

    Single-parameter stand-in for the aberrated-optics curve: value 1 at
    DC, m_nyq at 0.5 cycles/sample, m_nyq**(f/0.5) elsewhere.
    """
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    m_nyq = float(m_nyq)
    if not 0.0 < m_nyq <= 1.0:
        raise ValueError("m_nyq must be in (0, 1]")
    return np.power(m_nyq, f / geometry.f_nyq_hr)


def footprint_mtf(f, w):
    """Detector footprint MTF |sinc(f*w)| for a square aperture of width w HR pixels."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    if w <= 0:
        raise ValueError("detector width must be > 0")
    return np.abs(np.sinc(f * w))


def sampling_mtf(f, samp_pitch):
    """Sampling-aperture MTF |sinc(f*pitch)|.

    Reporting only: the simulator realizes sampling explicitly by
    decimation, so this factor is never applied as blur (that would
    double-count the sampling).
    """
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    if samp_pitch <= 0:
        raise ValueError("sampling pitch must be > 0")
    return np.abs(np.sinc(f * samp_pitch))


def smear_mtf(f, f_N=0.5, n_phi=1):
    """Discrete charge-transfer smear MTF sinc((pi/2)(f/f_N)/n_phi).

    sinc here is the unnormalized sin(x)/x.  More moves per stage means
    smoother charge motion; n_phi -> inf approaches 1 everywhere.
    Applies along-track only.
    """
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    if f_N <= 0:
        raise ValueError("reference frequency must be > 0")
    if n_phi < 1:
        raise ValueError("n_phi must be >= 1")
    x = (np.pi / 2.0) * (f / f_N) / n_phi
    # np.sinc is sin(pi t)/(pi t); feed t = x/pi to get sin(x)/x
    return np.sinc(x / np.pi)


def jitter_mtf(f, sigma):
    """Line-of-sight jitter MTF exp(-2 pi^2 sigma^2 f^2) for Gaussian motion."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    if sigma < 0:
        raise ValueError("jitter sigma must be >= 0")
    return np.exp(-2.0 * np.pi**2 * sigma**2 * f * f)


def system_otf(params: MtfChainParams, fx, fy):
    """Composite zero-phase system OTF on a 2-D frequency grid.

    Parameters
    ----------
    params : MtfChainParams
    fx : across-track frequency, cycles/HR sample (may be an array).
    fy : along-track frequency, cycles/HR sample.

    Radial factors (optics, jitter) are evaluated at sqrt(fx^2+fy^2); the
    detector footprint applies separably per axis; smear applies to the
    along-track component only.  The smear factor enters by magnitude so
    the composed OTF is non-negative beyond the first smear null.
    """
    fx = np.abs(np.asarray(fx, dtype=np.float64))
    fy = np.abs(np.asarray(fy, dtype=np.float64))
    fr = np.hypot(fx, fy)
    otf = optics_mtf(fr, params.optics_mtf_at_hr_nyq)
    otf = otf * footprint_mtf(fx, params.detector_width_w)
    otf = otf * footprint_mtf(fy, params.detector_width_w)
    otf = otf * jitter_mtf(fr, params.jitter_sigma)
    otf = otf * np.abs(smear_mtf(fy, params.smear_f_N, params.n_phi))
    return otf


def mtf_curve_table(params: MtfChainParams, n_points: int = 512,
                    geometry: GeometryConstants = GEOMETRY):
    """Tabulate every component MTF over [0, HR Nyquist].

    Returns (header, rows) where rows is an (n_points, 7) array with
    columns f, optics, footprint, sampling, smear, jitter, system.  The
    system column is the along-track composite system_otf(0, f), the axis
    where all factors act.
    """
    f = np.linspace(0.0, geometry.f_nyq_hr, n_points)
    cols = [
        f,
        optics_mtf(f, params.optics_mtf_at_hr_nyq, geometry),
        footprint_mtf(f, params.detector_width_w),
        sampling_mtf(f, params.detector_width_w),
        smear_mtf(f, params.smear_f_N, params.n_phi),
        jitter_mtf(f, params.jitter_sigma),
        system_otf(params, 0.0, f),
    ]
    header = ["f_cyc_per_hr_sample", "optics", "footprint", "sampling",
              "smear", "jitter", "system"]
    return header, np.column_stack(cols)
