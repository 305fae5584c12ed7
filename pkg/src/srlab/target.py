"""Siemens-star (spoke) test targets and angular sector masks.

The spoke pattern is binary: bright where cos(cycles * alpha) >= 0, dark
otherwise, with alpha = atan2(x, y) measured from the star center (x =
across-track/column offset, y = along-track/row offset; alpha = 0 on the
+y axis).  Outside the spoke annulus the image sits at the mean level so
the background equals the star's mean signal.

Rasterization is by area-average supersampling: each HR cell averages
the binary pattern over supersample^2 sub-points.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import math

import numpy as np

from .grid import ImageGrid

__all__ = ["StarSpec", "generate_spoke_target", "sector_mask", "pattern_angle"]


@dataclass(frozen=True)
class StarSpec:
    """Spoke target geometry and radiometry.

    cycles is the number of bright/dark periods around the full circle
    (144 by default).  Radii and center are in HR pixels.  supersample is
    the number of anti-aliasing sub-points per HR pixel per axis.
    """

    cycles: int = 144
    outer_radius: float = 104.0
    inner_radius: float = 8.0
    dark_level: float = 0.0
    bright_level: float = 600.0
    center: tuple[float, float] = (128.0, 128.0)
    supersample: int = 4

    def __post_init__(self):
        for name in ("outer_radius", "inner_radius", "dark_level", "bright_level"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not all(math.isfinite(c) for c in self.center):
            raise ValueError("center must be finite")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.inner_radius < 0 or self.inner_radius >= self.outer_radius:
            raise ValueError("need 0 <= inner_radius < outer_radius")
        if self.dark_level >= self.bright_level:
            raise ValueError("dark_level must be < bright_level")
        if self.supersample < 1:
            raise ValueError("supersample must be >= 1")

    @property
    def mean_level(self) -> float:
        return 0.5 * (self.dark_level + self.bright_level)


def pattern_angle(x, y):
    """Spoke angle atan2(x, y) normalized to [0, 2*pi)."""
    a = np.arctan2(x, y)
    a = np.where(a < 0, a + 2.0 * np.pi, a)
    # a tiny negative input can wrap to exactly 2*pi
    return np.where(a >= 2.0 * np.pi, 0.0, a)


def generate_spoke_target(spec: StarSpec, size: tuple[int, int]) -> ImageGrid:
    """Rasterize a spoke target onto an HR grid of the given (height, width).

    Each cell is the mean of the continuous pattern over supersample^2
    sub-points covering the cell.  Deterministic: identical spec gives
    bit-identical output.

    Raises if the star would be clipped by the grid.
    """
    height, width = int(size[0]), int(size[1])
    r0, c0 = spec.center
    rad = spec.outer_radius
    if r0 - rad < 0 or r0 + rad > height - 1 or c0 - rad < 0 or c0 + rad > width - 1:
        raise ValueError(
            f"star of radius {rad} at {spec.center} clipped by grid {height}x{width}")

    s = spec.supersample
    offsets = (np.arange(s) + 0.5) / s - 0.5
    rows = np.arange(height, dtype=np.float64)
    cols = np.arange(width, dtype=np.float64)

    acc = np.zeros((height, width))
    for dy, dx in product(offsets, offsets):
        y = (rows + dy - r0)[:, None]
        x = (cols + dx - c0)[None, :]
        rr = np.hypot(x, y)
        alpha = np.arctan2(x, y)
        spoke = np.where(np.cos(spec.cycles * alpha) >= 0.0,
                         spec.bright_level, spec.dark_level)
        inside = (rr >= spec.inner_radius) & (rr <= spec.outer_radius)
        acc += np.where(inside, spoke, spec.mean_level)
    acc /= s * s
    return ImageGrid(acc, pitch=1.0)


def sector_mask(size: tuple[int, int], center: tuple[float, float],
                sector_index: int, sector_count: int = 8) -> ImageGrid:
    """Binary mask selecting one angular sector of the circle.

    Sector k covers alpha in [k, k+1) * (2*pi/sector_count).  The cell
    exactly at the center (angle undefined) is always 0, so the sector
    masks partition every other cell exactly once.
    """
    if sector_count < 1:
        raise ValueError("sector_count must be >= 1")
    if not 0 <= sector_index < sector_count:
        raise ValueError(f"sector_index {sector_index} outside [0, {sector_count})")
    height, width = int(size[0]), int(size[1])
    r0, c0 = center
    y = (np.arange(height, dtype=np.float64) - r0)[:, None]
    x = (np.arange(width, dtype=np.float64) - c0)[None, :]
    alpha = pattern_angle(x, y)
    span = 2.0 * np.pi / sector_count
    mask = (alpha >= sector_index * span) & (alpha < (sector_index + 1) * span)
    mask &= ~((x == 0.0) & (y == 0.0))
    return ImageGrid(mask.astype(np.float64), pitch=1.0)
