"""Sampled complex scalar fields on uniform, centred grids.

All lengths are in micrometres. Sample ``(i, j)`` of an ``nx`` by ``ny`` grid
sits at ``((i - nx/2) * pitch_x, (j - ny/2) * pitch_y)``, so the origin is the
sample at index ``(nx/2, ny/2)``. Arrays are stored image-style with shape
``(ny, nx)``: axis 0 runs along y, axis 1 along x.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class Plane(str, enum.Enum):
    APERTURE = "aperture"
    LENS = "lens"
    FOCAL = "focal"


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    pitch_x: float
    pitch_y: float
    plane: Plane = Plane.APERTURE

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or not _is_pow2(int(n)):
                raise ValueError(f"{name} must be a power of two >= 8, got {n!r}")
        for name in ("pitch_x", "pitch_y"):
            p = getattr(self, name)
            if not (math.isfinite(p) and p > 0):
                raise ValueError(f"{name} must be positive and finite, got {p!r}")
        object.__setattr__(self, "plane", Plane(self.plane))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def extent(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) of the sample centres."""
        return (
            -(self.nx // 2) * self.pitch_x,
            (self.nx // 2 - 1) * self.pitch_x,
            -(self.ny // 2) * self.pitch_y,
            (self.ny // 2 - 1) * self.pitch_y,
        )

    def x(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx // 2) * self.pitch_x

    def y(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.pitch_y

    def coordinate(self, i: int, j: int) -> tuple[float, float]:
        return ((i - self.nx // 2) * self.pitch_x, (j - self.ny // 2) * self.pitch_y)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` coordinate arrays of shape ``(ny, nx)``."""
        return np.meshgrid(self.x(), self.y(), indexing="xy")

    def radius(self, x0: float = 0.0, y0: float = 0.0) -> np.ndarray:
        X, Y = self.mesh()
        return np.hypot(X - x0, Y - y0)

    def with_plane(self, plane: Plane, pitch_x: float, pitch_y: float) -> "GridSpec":
        return GridSpec(self.nx, self.ny, pitch_x, pitch_y, Plane(plane))


def make_grid(nx: int, ny: int, pitch: float, plane: Plane | str = Plane.APERTURE) -> GridSpec:
    """Build a square-pitch grid; raises ``ValueError`` on invalid sizes or pitch."""
    return GridSpec(int(nx), int(ny), float(pitch), float(pitch), Plane(plane))


@dataclass(frozen=True)
class ComplexField2D:
    """A complex field sampled on ``grid``; ``samples`` is read-only, shape ``(ny, nx)``."""

    grid: GridSpec
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.complex128, copy=True)
        if a.shape != self.grid.shape:
            raise ValueError(f"samples shape {a.shape} does not match grid {self.grid.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "samples", a)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def replace(self, samples: np.ndarray, grid: GridSpec | None = None) -> "ComplexField2D":
        return ComplexField2D(self.grid if grid is None else grid, samples)


def total_power(field: ComplexField2D) -> float:
    """Sum of ``|U|^2`` times the sample area (field units squared times um^2)."""
    g = field.grid
    return float(np.sum(np.abs(field.samples) ** 2) * g.pitch_x * g.pitch_y)


@dataclass(frozen=True)
class OpticalConfig:
    """Wavelength, aperture-to-lens distance ``z`` and lens focal length ``f`` (um)."""

    wavelength: float = 0.795
    z: float = 300_000.0
    f: float = 200_000.0

    def __post_init__(self):
        for name in ("wavelength", "z", "f"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v!r}")

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength


def zero_pad(field: ComplexField2D, factor: int) -> ComplexField2D:
    """Embed ``field`` in a grid ``factor`` times larger with the origin kept at the centre."""
    if factor == 1:
        return field
    g = field.grid
    big = GridSpec(g.nx * factor, g.ny * factor, g.pitch_x, g.pitch_y, g.plane)
    py, px = (big.ny - g.ny) // 2, (big.nx - g.nx) // 2
    a = np.zeros(big.shape, dtype=np.complex128)
    a[py:py + g.ny, px:px + g.nx] = field.samples
    return ComplexField2D(big, a)


def crop_center(field: ComplexField2D, nx: int, ny: int) -> ComplexField2D:
    """Central ``ny`` by ``nx`` window of ``field``, origin kept at the centre."""
    g = field.grid
    if nx > g.nx or ny > g.ny:
        raise ValueError("crop window larger than the field")
    y0, x0 = g.ny // 2 - ny // 2, g.nx // 2 - nx // 2
    small = GridSpec(nx, ny, g.pitch_x, g.pitch_y, g.plane)
    return ComplexField2D(small, field.samples[y0:y0 + ny, x0:x0 + nx])
