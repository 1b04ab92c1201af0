"""Slices through intensity images and fits of the obscured-aperture Airy law."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, special

from .apertures import Orientation
from .propagation import jinc_amplitude

MIN_FIT_SAMPLES = 20
EPS_MAX = 0.99


class DegenerateProfileError(ValueError):
    """The profile carries no usable shape (too short, all zero or flat)."""


class FitConvergenceError(RuntimeError):
    """Raised when the optimiser stops on its evaluation cap; ``best`` holds the last iterate."""

    def __init__(self, message: str, best: "AiryFit"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class RadialProfile:
    positions: np.ndarray = field(repr=False)
    intensities: np.ndarray = field(repr=False)
    unit: str = "um"
    normalization: float = 1.0

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        y = np.array(self.intensities, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("positions and intensities must be 1-D arrays of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("positions must be strictly increasing")
        if np.any(y < 0) or not np.all(np.isfinite(y)):
            raise ValueError("intensities must be finite and non-negative")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "intensities", y)

    def __len__(self):
        return self.positions.size

    def peak_normalized(self) -> "RadialProfile":
        peak = float(self.intensities.max()) if len(self) else 0.0
        if peak <= 0:
            raise DegenerateProfileError("cannot peak-normalise an all-zero profile")
        return replace(self, intensities=self.intensities / peak, normalization=peak)


@dataclass(frozen=True)
class AiryFit:
    eps_ratio: float = 0.5
    i0: float = 1.0
    scale: float = 1.0
    center: float = 0.0
    residual: float = float("nan")
    iterations: int = 0
    offset: float = 0.0

    def model(self, positions) -> np.ndarray:
        v = (np.asarray(positions, dtype=float) - self.center) / self.scale
        return annular_airy_intensity(v, self.eps_ratio, self.i0) + self.offset


def annular_airy_intensity(v, eps_ratio: float, i0: float = 1.0):
    """Far-field intensity of a uniformly lit annulus with obscuration ``eps_ratio``.

    ``I0 / (1 - e^2)^2 * [2 J1(v)/v - e^2 * 2 J1(e v)/(e v)]^2``, equal to ``I0``
    at ``v = 0``. Both Bessel terms use the same argument ``v``.
    """
    if not (0.0 <= eps_ratio < 1.0):
        raise ValueError(f"eps_ratio must lie in [0, 1), got {eps_ratio!r}")
    v = np.asarray(v, dtype=float)
    e2 = eps_ratio * eps_ratio
    amp = (jinc_amplitude(v) - e2 * jinc_amplitude(eps_ratio * v)) / (1.0 - e2)
    out = i0 * amp * amp
    return out if np.ndim(out) else float(out)


def _jinc_derivative(x):
    # d/dx [2 J1(x)/x] = -2 J2(x)/x = 2 (J0(x) - 2 J1(x)/x) / x
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    return np.where(small, -x / 4.0 + x**3 / 48.0,
                    2.0 * (special.j0(xs) - jinc_amplitude(xs)) / xs)


def first_zero(eps_ratio: float) -> float:
    """Smallest ``v > 0`` where :func:`annular_airy_intensity` vanishes."""
    e2 = eps_ratio * eps_ratio

    def bracket(v):
        return jinc_amplitude(v) - e2 * jinc_amplitude(eps_ratio * v)

    v = np.arange(0.5, 20.0, 0.05)
    s = np.sign(bracket(v))
    i = int(np.argmax(s != s[0]))
    return optimize.brentq(bracket, v[i - 1], v[i], xtol=1e-14)


def extract_slice(image, orientation: Orientation | str, center: tuple[int, int],
                  width: int = 10, pitch: float = 1.0, unit: str = "um") -> RadialProfile:
    """Average ``width`` adjacent rows (horizontal slice) or columns (vertical slice).

    ``center`` is the ``(row, column)`` index the band is centred on; the band
    covers indices ``c - width//2`` to ``c - width//2 + width - 1``. Positions are
    ``(index - center) * pitch`` along the slice.
    """
    image = np.asarray(image, dtype=float)
    if width < 1:
        raise ValueError("slice width must be at least one pixel")
    row, col = center
    if Orientation(orientation) is Orientation.VERTICAL:
        image = image.T
        row, col = col, row
    lo = row - width // 2
    if lo < 0 or lo + width > image.shape[0]:
        raise IndexError(f"slice band [{lo}, {lo + width}) lies outside the image "
                         f"(size {image.shape[0]})")
    positions = (np.arange(image.shape[1]) - col) * pitch
    return RadialProfile(positions, image[lo:lo + width].mean(axis=0), unit=unit)


def half_max_radius(eps_ratio: float) -> float:
    """``v`` at which :func:`annular_airy_intensity` first falls to half its peak."""
    return optimize.brentq(lambda v: annular_airy_intensity(v, eps_ratio) - 0.5,
                           1e-6, first_zero(eps_ratio), xtol=1e-14)


def heuristic_guess(profile: RadialProfile, eps0: float = 0.5) -> AiryFit:
    """Start point: centre at the maximum, scale from the half-maximum half-width.

    The half-width is read off the first crossings of half the peak on either
    side of the maximum, which is insensitive to small additive noise.
    """
    x, y = profile.positions, profile.intensities
    k = int(np.argmax(y))
    below = y < 0.5 * y[k]
    widths = []
    right = np.flatnonzero(below[k:])
    if right.size:
        widths.append(x[k + right[0]] - x[k])
    left = np.flatnonzero(below[:k + 1][::-1])
    if left.size:
        widths.append(x[k] - x[k - left[0]])
    half_width = float(np.mean(widths)) if widths else float(x[-1] - x[0]) / 8
    return AiryFit(eps_ratio=eps0, i0=float(y[k]), scale=half_width / half_max_radius(eps0),
                   center=float(x[k]))


def fit_airy(profile: RadialProfile, initial: AiryFit | None = None, offset: bool = False,
             max_nfev: int = 2000) -> AiryFit:
    """Least-squares fit of ``i0``, ``eps_ratio``, ``scale`` and ``center`` (and an optional offset).

    Without ``initial`` a heuristic start with ``eps_ratio = 0.5`` is used.
    Raises :class:`DegenerateProfileError` for unfittable input and
    :class:`FitConvergenceError` when ``max_nfev`` is exhausted.
    """
    x, y = profile.positions, profile.intensities
    if len(profile) < MIN_FIT_SAMPLES:
        raise DegenerateProfileError(f"need at least {MIN_FIT_SAMPLES} samples, got {len(profile)}")
    if not np.any(y > 0) or np.ptp(y) <= 1e-12 * np.max(np.abs(y)):
        raise DegenerateProfileError("profile is zero or constant")
    if initial is None:
        initial = heuristic_guess(profile)

    def unpack(p):
        return AiryFit(eps_ratio=float(p[0]), i0=float(p[1]), scale=float(p[2]),
                       center=float(p[3]), offset=float(p[4]) if offset else 0.0)

    def resid(p):
        return unpack(p).model(x) - y

    def jac(p):
        e, i0, scale, c = p[:4]
        e2 = e * e
        v = (x - c) / scale
        ja, jea = jinc_amplitude(v), jinc_amplitude(e * v)
        amp = (ja - e2 * jea) / (1.0 - e2)
        damp_dv = (_jinc_derivative(v) - e2 * e * _jinc_derivative(e * v)) / (1.0 - e2)
        damp_de = (-2.0 * e * jea - e2 * v * _jinc_derivative(e * v)) / (1.0 - e2) \
            + amp * 2.0 * e / (1.0 - e2)
        J = np.empty((x.size, len(p)))
        J[:, 0] = 2.0 * i0 * amp * damp_de
        J[:, 1] = amp * amp
        J[:, 2] = 2.0 * i0 * amp * damp_dv * (-v / scale)
        J[:, 3] = 2.0 * i0 * amp * damp_dv * (-1.0 / scale)
        if offset:
            J[:, 4] = 1.0
        return J

    span = float(x[-1] - x[0])
    p0 = [min(max(initial.eps_ratio, 0.0), EPS_MAX), initial.i0, initial.scale, initial.center]
    lo = [0.0, 0.0, 1e-9 * span, x[0]]
    hi = [EPS_MAX, np.inf, np.inf, x[-1]]
    if offset:
        p0.append(initial.offset)
        lo.append(-np.inf)
        hi.append(np.inf)
    p0 = np.clip(p0, lo, hi)
    sol = optimize.least_squares(resid, p0, jac=jac, bounds=(lo, hi), method="trf", x_scale="jac",
                                 ftol=1e-10, xtol=1e-10, gtol=1e-10, max_nfev=max_nfev)
    best = replace(unpack(sol.x), residual=float(np.sum(sol.fun**2)), iterations=int(sol.nfev))
    if sol.status == 0:
        raise FitConvergenceError(f"fit did not converge in {max_nfev} evaluations", best)
    return best


@dataclass(frozen=True)
class ProfileComparison:
    nrmse: float
    peak_offset: float
    unit: str
    warnings: tuple[str, ...] = ()


def compare_profiles(a: RadialProfile, b: RadialProfile) -> ProfileComparison:
    """Peak-normalise both profiles, interpolate ``b`` onto ``a``'s samples in the overlap.

    ``nrmse`` is the RMS difference of the normalised profiles (their peak is
    1, so no further scaling); ``peak_offset`` is ``argmax(b) - argmax(a)`` in
    position units.
    """
    warnings = []
    if a.unit != b.unit:
        warnings.append(f"unit mismatch: {a.unit!r} vs {b.unit!r}; positions compared as given")
    lo = max(a.positions[0], b.positions[0])
    hi = min(a.positions[-1], b.positions[-1])
    if not lo < hi:
        raise ValueError("profiles have disjoint position ranges")
    an, bn = a.peak_normalized(), b.peak_normalized()
    sel = (an.positions >= lo) & (an.positions <= hi)
    xa = an.positions[sel]
    diff = an.intensities[sel] - np.interp(xa, bn.positions, bn.intensities)
    nrmse = float(math.sqrt(np.mean(diff**2)))
    offset = float(bn.positions[np.argmax(bn.intensities)] - an.positions[np.argmax(an.intensities)])
    return ProfileComparison(nrmse, offset, a.unit, tuple(warnings))
