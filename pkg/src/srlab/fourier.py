"""FFT helpers shared by the simulator and the solver.

All operators here assume periodic (circular) boundaries, which makes
forward/adjoint pairs exact transposes.  Shift multipliers are forced
Hermitian by replacing the Nyquist-bin phase with its real part, so
applying them to a real image returns a real image and the conjugate
multiplier is the exact adjoint.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "shift_multiplier_1d",
    "shift_multiplier_2d",
    "apply_transfer",
    "subpixel_shift",
    "gaussian_kernel",
    "sinc_upsample",
    "kernel_transfer",
]


def shift_multiplier_1d(n: int, delta: float) -> np.ndarray:
    """Frequency-domain multiplier sampling a signal at x + delta.

    exp(+2i pi f delta) on the fftfreq grid; the Nyquist bin (even n) is
    replaced by cos(pi delta) to keep the multiplier Hermitian.
    """
    f = np.fft.fftfreq(n)
    m = np.exp(2j * np.pi * f * delta)
    if n % 2 == 0:
        m[n // 2] = np.cos(np.pi * delta)
    return m


def shift_multiplier_2d(shape: tuple[int, int], shift: tuple[float, float]) -> np.ndarray:
    """Separable 2-D shift multiplier for sampling at (row+d0, col+d1)."""
    m0 = shift_multiplier_1d(shape[0], shift[0])
    m1 = shift_multiplier_1d(shape[1], shift[1])
    return m0[:, None] * m1[None, :]


def apply_transfer(x: np.ndarray, transfer: np.ndarray) -> np.ndarray:
    """Filter a real image by a (Hermitian) frequency-domain multiplier."""
    return np.fft.ifft2(np.fft.fft2(x) * transfer).real


def subpixel_shift(x: np.ndarray, shift: tuple[float, float]) -> np.ndarray:
    """Sample x at (row + d0, col + d1) with periodic boundaries.

    Integer shifts take an exact np.roll path; fractional shifts go
    through the frequency-domain phase ramp.
    """
    d0, d1 = float(shift[0]), float(shift[1])
    if d0 == int(d0) and d1 == int(d1):
        return np.roll(x, (-int(d0), -int(d1)), axis=(0, 1))
    return apply_transfer(x, shift_multiplier_2d(x.shape, (d0, d1)))


def gaussian_kernel(sigma: float, radius: int | None = None) -> np.ndarray:
    """Unit-sum 2-D Gaussian kernel, truncated at ~4 sigma.

    Used as the solver-side blur estimate; sigma is in HR pixels.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if radius is None:
        radius = max(1, int(np.ceil(4.0 * sigma)))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-0.5 * (t / sigma) ** 2)
    k = g[:, None] * g[None, :]
    return k / k.sum()


def sinc_upsample(data: np.ndarray, factor: int) -> np.ndarray:
    """Exact periodic sinc interpolation onto a factor-times-finer grid.

    Zero-pads the centered spectrum; Nyquist bins of even-sized axes are
    split between +/- so the result stays real and symmetric.  Output
    sample k lies at input coordinate k/factor.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return np.asarray(data, dtype=np.float64).copy()
    h, w = data.shape
    big_h, big_w = h * factor, w * factor
    spectrum = np.fft.fftshift(np.fft.fft2(data))
    padded = np.zeros((big_h, big_w), dtype=complex)
    r0, c0 = big_h // 2 - h // 2, big_w // 2 - w // 2
    padded[r0:r0 + h, c0:c0 + w] = spectrum
    if h % 2 == 0:
        padded[r0 + h, c0:c0 + w] = 0.5 * padded[r0, c0:c0 + w]
        padded[r0, c0:c0 + w] *= 0.5
    if w % 2 == 0:
        padded[r0:r0 + h + (h % 2 == 0), c0 + w] = \
            0.5 * padded[r0:r0 + h + (h % 2 == 0), c0]
        padded[r0:r0 + h + (h % 2 == 0), c0] *= 0.5
    return np.fft.ifft2(np.fft.ifftshift(padded)).real * factor * factor


def kernel_transfer(kernel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Transfer function of a small centered kernel on a periodic grid.

    The kernel center lands on sample (0, 0) so convolution by the
    returned multiplier introduces no shift.
    """
    kh, kw = kernel.shape
    if kh > shape[0] or kw > shape[1]:
        raise ValueError(f"kernel {kernel.shape} larger than grid {shape}")
    padded = np.zeros(shape)
    padded[:kh, :kw] = kernel
    padded = np.roll(padded, (-(kh // 2), -(kw // 2)), axis=(0, 1))
    return np.fft.fft2(padded)
