"""Source fields and binary transmission functions.

Hard apertures are sampled point-wise with no edge anti-aliasing, and every
boundary is inclusive (``circ(1) == 1``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .grid import ComplexField2D, GridSpec


class Orientation(str, enum.Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class AnnulusSpec:
    a0: float
    a1: float

    def __post_init__(self):
        if not (0.0 <= self.a0 < self.a1) or not math.isfinite(self.a1):
            raise ValueError(f"annulus needs 0 <= a0 < a1, got a0={self.a0}, a1={self.a1}")

    @property
    def eps_ratio(self) -> float:
        return self.a0 / self.a1


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian amplitude ``exp(-(r/w)^2)``; ``w`` is the 1/e amplitude radius."""

    w: float
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.w) and self.w > 0):
            raise ValueError(f"waist must be positive, got {self.w!r}")

    @classmethod
    def from_fwhm(cls, fwhm: float, x0: float = 0.0, y0: float = 0.0) -> "GaussianSpec":
        return cls(waist_from_fwhm(fwhm), x0, y0)

    @property
    def intensity_fwhm(self) -> float:
        return self.w * math.sqrt(2.0 * math.log(2.0))


def waist_from_fwhm(fwhm: float) -> float:
    """1/e amplitude radius of a Gaussian whose intensity FWHM is ``fwhm``."""
    return fwhm / math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class SlitSpec:
    """Centred slit of full ``width``.

    A vertical slit is a vertical opening, so it limits the horizontal (x)
    extent; a horizontal slit limits y.
    """

    width: float
    orientation: Orientation = Orientation.VERTICAL

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"slit width must be positive, got {self.width!r}")
        object.__setattr__(self, "orientation", Orientation(self.orientation))


def circ(t):
    """1 where ``t <= 1``, else 0. Negative arguments are rejected."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("circ argument must be non-negative")
    out = (t <= 1.0).astype(float)
    return out if out.ndim else float(out)


def annulus_transmission(rho, spec: AnnulusSpec):
    """``circ(rho/a1) - circ(rho/a0)``; equals 1 for ``a0 < rho <= a1``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("radius must be non-negative")
    outer = circ(rho / spec.a1)
    if spec.a0 == 0.0:
        # circ(rho/0) is 1 only at rho == 0
        inner = (rho == 0.0).astype(float)
    else:
        inner = circ(rho / spec.a0)
    out = np.asarray(outer - inner, dtype=float)
    return out if out.ndim else float(out)


def slit_transmission(coordinate, spec: SlitSpec):
    c = np.asarray(coordinate, dtype=float)
    out = (np.abs(c) <= spec.width / 2.0).astype(float)
    return out if out.ndim else float(out)


def gaussian_field(grid: GridSpec, spec: GaussianSpec) -> ComplexField2D:
    r = grid.radius(spec.x0, spec.y0)
    return ComplexField2D(grid, np.exp(-((r / spec.w) ** 2)))


def annulus_mask(grid: GridSpec, spec: AnnulusSpec) -> np.ndarray:
    return annulus_transmission(grid.radius(), spec)


def slit_mask(grid: GridSpec, spec: SlitSpec) -> np.ndarray:
    X, Y = grid.mesh()
    axis = X if spec.orientation is Orientation.VERTICAL else Y
    return slit_transmission(axis, spec)


def apply_mask(field: ComplexField2D, mask) -> ComplexField2D:
    """Point-wise product of ``field`` with a transmission array on the same grid."""
    mask = np.asarray(mask)
    if mask.shape != field.grid.shape:
        raise ValueError(f"mask shape {mask.shape} does not match grid {field.grid.shape}")
    return field.replace(field.samples * mask)
