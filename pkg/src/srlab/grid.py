"""2-D raster container with sample-pitch metadata, plus 16-bit PGM I/O.

Every image in the pipeline (targets, blurred scenes, low-resolution
observations, reconstructions) is an ``ImageGrid``: a row-major float64
array in detector counts, tagged with the size of one grid sample in
high-resolution pixels.  Axis 0 is along-track, axis 1 is across-track.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ImageGrid", "write_pgm", "read_pgm"]

PGM_MAXVAL = 65535


def _as_pitch(pitch) -> tuple[float, float]:
    """Normalize a scalar or (row, col) pitch to a 2-tuple of floats."""
    if np.isscalar(pitch):
        p = float(pitch)
        return (p, p)
    pr, pc = pitch
    return (float(pr), float(pc))


@dataclass
class ImageGrid:
    """Real-valued raster with geometry metadata.

    Parameters
    ----------
    data : ndarray
        2-D float array, row-major, values in detector counts.
    pitch : float or (float, float)
        HR pixels per grid sample, per axis (row, col).  1.0 means one HR
        sample per cell; 0.25 means 4x supersampled.  A scalar applies to
        both axes.  Decimated observations carry anisotropic pitch.
    origin : (float, float)
        HR-pixel coordinates of grid cell (0, 0).
    """

    data: np.ndarray
    pitch: tuple[float, float] = (1.0, 1.0)
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        self.pitch = _as_pitch(self.pitch)
        self.origin = (float(self.origin[0]), float(self.origin[1]))
        self.validate()

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def pitch_scalar(self) -> float:
        """Isotropic pitch; raises if the two axes differ."""
        pr, pc = self.pitch
        if pr != pc:
            raise ValueError(f"grid has anisotropic pitch {self.pitch}")
        return pr

    def validate(self) -> "ImageGrid":
        """Check the container invariants; returns self for chaining."""
        if self.data.ndim != 2:
            raise ValueError(f"expected 2-D data, got shape {self.data.shape}")
        if self.height < 2 or self.width < 2:
            raise ValueError(f"grid too small: {self.data.shape}")
        if self.pitch[0] <= 0 or self.pitch[1] <= 0:
            raise ValueError(f"pitch must be positive, got {self.pitch}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("grid contains non-finite values")
        return self

    def copy(self) -> "ImageGrid":
        return ImageGrid(self.data.copy(), self.pitch, self.origin)

    def mean(self) -> float:
        return float(self.data.mean())


def write_pgm(path, grid: ImageGrid) -> None:
    """Write a 16-bit binary PGM (P5, maxval 65535, big-endian).

    Values are rounded half-to-even and clamped to [0, 65535] at write
    time only; the in-memory pipeline never quantizes.
    """
    q = np.clip(np.rint(grid.data), 0, PGM_MAXVAL).astype(">u2")
    header = f"P5\n{grid.width} {grid.height}\n{PGM_MAXVAL}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(q.tobytes())


def _read_header_tokens(fh, count: int) -> list[bytes]:
    """Read whitespace-separated header tokens, skipping # comments."""
    tokens: list[bytes] = []
    token = b""
    while len(tokens) < count:
        ch = fh.read(1)
        if not ch:
            raise ValueError("truncated PGM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = fh.read(1)
            continue
        if ch.isspace():
            if token:
                tokens.append(token)
                token = b""
            continue
        token += ch
    return tokens


def read_pgm(path, pitch=1.0, origin=(0.0, 0.0)) -> ImageGrid:
    """Read a binary PGM written by :func:`write_pgm`.

    PGM carries no geometry, so pitch/origin come from the caller
    (normally a sidecar metadata file).
    """
    with open(path, "rb") as fh:
        magic = fh.read(2)
        if magic != b"P5":
            raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
        width_b, height_b, maxval_b = _read_header_tokens(fh, 3)
        width, height, maxval = int(width_b), int(height_b), int(maxval_b)
        if maxval != PGM_MAXVAL:
            raise ValueError(f"{path}: expected maxval {PGM_MAXVAL}, got {maxval}")
        raw = fh.read(width * height * 2)
    if len(raw) != width * height * 2:
        raise ValueError(f"{path}: truncated pixel data")
    data = np.frombuffer(raw, dtype=">u2").reshape(height, width).astype(np.float64)
    return ImageGrid(data, pitch=pitch, origin=origin)
