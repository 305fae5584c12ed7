import numpy as np
import pytest

from srlab.fourier import (gaussian_kernel, kernel_transfer,
                           shift_multiplier_2d, sinc_upsample, subpixel_shift)


def test_integer_shift_is_exact_roll(rng):
    x = rng.normal(size=(16, 16))
    assert np.array_equal(subpixel_shift(x, (3.0, -2.0)),
                          np.roll(x, (-3, 2), axis=(0, 1)))


def test_fractional_shift_matches_cosine_phase(rng):
    n = 64
    j = np.arange(n)
    img = np.cos(2 * np.pi * 0.125 * j)[None, :].repeat(8, axis=0)
    shifted = subpixel_shift(img, (0.0, 0.5))
    expected = np.cos(2 * np.pi * 0.125 * (j + 0.5))[None, :].repeat(8, axis=0)
    assert np.allclose(shifted, expected, atol=1e-12)


def test_shift_multiplier_is_hermitian():
    m = shift_multiplier_2d((8, 8), (0.3, -0.7))
    full = np.fft.ifft2(np.fft.fft2(np.eye(8)) * m)
    assert np.abs(full.imag).max() < 1e-12


def test_shift_roundtrip_bandlimited(rng):
    # the Hermitian Nyquist treatment attenuates Nyquist content for
    # fractional shifts, so the roundtrip identity holds below Nyquist
    spectrum = np.fft.fft2(rng.normal(size=(32, 32)))
    f = np.fft.fftfreq(32)
    keep = (np.abs(f)[:, None] < 0.45) & (np.abs(f)[None, :] < 0.45)
    x = np.fft.ifft2(spectrum * keep).real
    back = subpixel_shift(subpixel_shift(x, (0.37, -1.21)), (-0.37, 1.21))
    assert np.allclose(back, x, atol=1e-10)


def test_fractional_shift_attenuates_nyquist():
    n = 16
    x = np.cos(np.pi * np.arange(n))[None, :].repeat(4, axis=0)  # pure Nyquist
    out = subpixel_shift(x, (0.0, 0.5))
    # cos(pi * 0.5) = 0: the half-pixel shift nulls the Nyquist cosine
    assert np.allclose(out, 0.0, atol=1e-12)


def test_gaussian_kernel_unit_sum():
    for sigma in (0.3, 0.85, 2.5):
        k = gaussian_kernel(sigma)
        assert k.sum() == pytest.approx(1.0, abs=1e-12)
        assert k.shape[0] == k.shape[1]
        assert k.shape[0] % 2 == 1
    with pytest.raises(ValueError):
        gaussian_kernel(0.0)


def test_kernel_transfer_dc_gain():
    k = gaussian_kernel(1.0)
    t = kernel_transfer(k, (32, 32))
    assert t[0, 0].real == pytest.approx(1.0)
    assert abs(t[0, 0].imag) < 1e-12


def test_kernel_transfer_rejects_oversized():
    with pytest.raises(ValueError):
        kernel_transfer(np.ones((9, 9)) / 81, (8, 8))


def test_sinc_upsample_interpolates_at_nodes(rng):
    x = rng.normal(size=(12, 10))
    up = sinc_upsample(x, 2)
    assert up.shape == (24, 20)
    assert np.allclose(up[::2, ::2], x, atol=1e-10)
    # mean preserved
    assert up.mean() == pytest.approx(x.mean())


def test_sinc_upsample_exact_for_bandlimited():
    n = 16
    j = np.arange(n)
    img = np.cos(2 * np.pi * 3 / n * j)[None, :] * \
        np.cos(2 * np.pi * 2 / n * j)[:, None]
    up = sinc_upsample(img, 4)
    jj = np.arange(4 * n) / 4.0
    expected = np.cos(2 * np.pi * 3 / n * jj)[None, :] * \
        np.cos(2 * np.pi * 2 / n * jj)[:, None]
    assert np.allclose(up, expected, atol=1e-10)


def test_sinc_upsample_factor_one_copies(rng):
    x = rng.normal(size=(6, 6))
    up = sinc_upsample(x, 1)
    assert np.array_equal(up, x)
    up[0, 0] = 99.0
    assert x[0, 0] != 99.0
