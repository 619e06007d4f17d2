"""
Physical intensity images at the output ports.

The two transverse basis modes are first-order Hermite-Gaussian profiles,

    HG01(x, y) ~ y * exp(-(x^2 + y^2) / w^2)
    HG10(x, y) ~ x * exp(-(x^2 + y^2) / w^2)

normalized numerically on the pixel grid so that the discrete inner
products are exactly orthonormal; integrated image intensities then agree
with the squared amplitudes up to floating-point error, not just up to
quadrature error. Polarization maps |0>_P to the x field component and
|1>_P to y. All lengths are in units of the beam waist w.

Non-separable port states of the form (|0_P 0_M> + |1_P 1_M>)/sqrt(2)
produce rotationally symmetric doughnuts peaking at radius w/sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .state import TriState

DEFAULT_GRID = 256
DEFAULT_EXTENT = 3.0
MIN_GRID = 32

_MODE_CACHE: dict[tuple[int, float, float], tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}


def mode_functions(n: int = DEFAULT_GRID, extent: float = DEFAULT_EXTENT,
                   waist: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pixel-center coordinate grids X, Y and grid-orthonormal HG01, HG10.

    The image covers [-extent, extent] in both axes with n pixels per side;
    pixel centers avoid the exact origin so symmetry makes the two modes
    numerically orthogonal.
    """
    if n < MIN_GRID:
        raise ValueError(f"grid too coarse; need at least {MIN_GRID} pixels per side")
    if extent < 2.0 * waist:
        raise ValueError("extent must cover at least two beam waists")
    key = (n, float(extent), float(waist))
    cached = _MODE_CACHE.get(key)
    if cached is not None:
        return cached

    pitch = 2.0 * extent / n
    coords = (np.arange(n) + 0.5) * pitch - extent
    x, y = np.meshgrid(coords, coords)
    envelope = np.exp(-(x**2 + y**2) / waist**2)
    hg01 = y * envelope
    hg10 = x * envelope
    hg01 = hg01 / np.sqrt(np.sum(hg01**2) * pitch**2)
    hg10 = hg10 / np.sqrt(np.sum(hg10**2) * pitch**2)
    for a in (x, y, hg01, hg10):
        a.setflags(write=False)
    _MODE_CACHE[key] = (x, y, hg01, hg10)
    return _MODE_CACHE[key]


@dataclass(frozen=True)
class IntensityImage:
    """Non-negative intensity grid for one output port."""

    pixels: np.ndarray
    pitch: float
    extent: float
    port: int
    label: str = ""

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise ValueError("pixels must form a square 2D grid")
        if not np.isfinite(px).all():
            raise ValueError("image contains non-finite intensities")
        if px.min() < 0.0:
            raise ValueError("image intensities must be non-negative")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def n(self) -> int:
        return self.pixels.shape[0]

    def peak(self) -> float:
        return float(self.pixels.max())


def field_intensity(port_amps: np.ndarray, n: int = DEFAULT_GRID,
                    extent: float = DEFAULT_EXTENT, waist: float = 1.0) -> np.ndarray:
    """|E|^2 for four raw (P, M) amplitudes indexed 2*P + M (no normalization)."""
    a = np.asarray(port_amps, dtype=complex).reshape(4)
    _, _, hg01, hg10 = mode_functions(n, extent, waist)
    e_x = a[0] * hg01 + a[1] * hg10
    e_y = a[2] * hg01 + a[3] * hg10
    return np.abs(e_x) ** 2 + np.abs(e_y) ** 2


def render_port(s: TriState, port: int, n: int = DEFAULT_GRID,
                extent: float = DEFAULT_EXTENT, waist: float = 1.0,
                label: str = "") -> IntensityImage:
    """Intensity image of one output port of a beam state."""
    pixels = field_intensity(s.port_amplitudes(port), n, extent, waist)
    return IntensityImage(pixels, pitch=2.0 * extent / n, extent=extent,
                          port=port, label=label)


def integrate(img: IntensityImage) -> float:
    """Total power: Riemann sum of the pixels times the pixel area."""
    return float(img.pixels.sum() * img.pitch**2)


def subtract_background(img: IntensityImage, level: float) -> IntensityImage:
    """Subtract a uniform dark-noise level, clipping at zero."""
    if level < 0.0:
        raise ValueError("background level must be non-negative")
    return IntensityImage(np.maximum(img.pixels - level, 0.0), img.pitch,
                          img.extent, img.port, img.label)


def sample_circle(img: IntensityImage, radius: float, n_angles: int = 360) -> np.ndarray:
    """Bilinear samples of the image on a circle around the beam axis."""
    angles = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    xs = radius * np.cos(angles)
    ys = radius * np.sin(angles)
    # pixel-center coordinates: col = (x + extent)/pitch - 0.5
    cols = (xs + img.extent) / img.pitch - 0.5
    rows = (ys + img.extent) / img.pitch - 0.5
    c0 = np.clip(np.floor(cols).astype(int), 0, img.n - 2)
    r0 = np.clip(np.floor(rows).astype(int), 0, img.n - 2)
    fc = cols - c0
    fr = rows - r0
    p = img.pixels
    return ((1 - fr) * (1 - fc) * p[r0, c0]
            + (1 - fr) * fc * p[r0, c0 + 1]
            + fr * (1 - fc) * p[r0 + 1, c0]
            + fr * fc * p[r0 + 1, c0 + 1])


def write_pgm(img: IntensityImage, path: str | Path, bits: int = 8,
              scale_to: float | None = None) -> Path:
    """Write a binary PGM (P5), scaled so `scale_to` (default: the image
    peak) maps to full white. 16-bit data is big-endian per the format."""
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    maxval = 255 if bits == 8 else 65535
    peak = img.peak() if scale_to is None else float(scale_to)
    if peak <= 0.0:
        data = np.zeros_like(img.pixels)
    else:
        data = np.clip(img.pixels / peak, 0.0, 1.0) * maxval
    quantized = np.rint(np.flipud(data)).astype(">u2" if bits == 16 else "u1")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.n} {img.n}\n{maxval}\n".encode("ascii"))
        fh.write(quantized.tobytes())
    return path


def write_composite_pgm(img0: IntensityImage, img1: IntensityImage,
                        path: str | Path, bits: int = 8, gap: int = 8) -> Path:
    """Two ports side by side on a shared intensity scale."""
    if img0.n != img1.n:
        raise ValueError("composite requires equally sized images")
    maxval = 255 if bits == 8 else 65535
    peak = max(img0.peak(), img1.peak())
    merged = np.hstack([img0.pixels, np.zeros((img0.n, gap)), img1.pixels])
    if peak > 0.0:
        merged = np.clip(merged / peak, 0.0, 1.0) * maxval
    quantized = np.rint(np.flipud(merged)).astype(">u2" if bits == 16 else "u1")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{merged.shape[1]} {merged.shape[0]}\n{maxval}\n".encode("ascii"))
        fh.write(quantized.tobytes())
    return path
