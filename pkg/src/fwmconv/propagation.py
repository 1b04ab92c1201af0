"""Fraunhofer propagation, closed-form annulus/Gaussian transforms and the lens FT.

Two normalisations are offered for the numerical transforms:

``"physical"``
    ``pitch_x * pitch_y / (i lambda d) * DFT``, the discretised diffraction
    integral including its ``1/(i lambda d)`` factor.
``"unitary"``
    the orthonormal DFT rescaled by ``sqrt(area_in / area_out)`` so that
    :func:`~fwmconv.grid.total_power` is conserved exactly.

The two differ only by the constant phase ``-i``; they are separate code paths
so that each can be checked against the other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .apertures import AnnulusSpec, GaussianSpec, annulus_mask, apply_mask, gaussian_field
from .grid import ComplexField2D, GridSpec, OpticalConfig, Plane

NORMALIZATIONS = ("physical", "unitary")


@dataclass(frozen=True)
class PropagationResult:
    field: ComplexField2D
    phase_prefactor_included: bool

    @property
    def grid(self) -> GridSpec:
        return self.field.grid


def centered_fft2(a: np.ndarray, norm: str = "backward") -> np.ndarray:
    """DFT with the zero frequency and the zero coordinate both at index ``n//2``."""
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(a), norm=norm))


def output_pitch(grid: GridSpec, wavelength: float, distance: float) -> tuple[float, float]:
    """Far-field sample pitch ``lambda d / (N pitch_in)`` per axis."""
    return (
        wavelength * distance / (grid.nx * grid.pitch_x),
        wavelength * distance / (grid.ny * grid.pitch_y),
    )


def _transform(field: ComplexField2D, wavelength: float, distance: float,
               normalization: str, plane: Plane) -> ComplexField2D:
    if not distance > 0:
        raise ValueError(f"propagation distance must be positive, got {distance!r}")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    g = field.grid
    px, py = output_pitch(g, wavelength, distance)
    out_grid = g.with_plane(plane, px, py)
    if normalization == "physical":
        F = centered_fft2(field.samples) * (g.pitch_x * g.pitch_y / (1j * wavelength * distance))
    else:
        F = centered_fft2(field.samples, norm="ortho")
        F *= math.sqrt((g.pitch_x * g.pitch_y) / (px * py))
    return ComplexField2D(out_grid, F)


def _quadratic_phase(grid: GridSpec, k: float, distance: float) -> np.ndarray:
    X, Y = grid.mesh()
    return np.exp(1j * k * (X**2 + Y**2) / (2.0 * distance))


def _warn_if_undersampled(grid: GridSpec, k: float, distance: float, what: str) -> None:
    # largest phase step between neighbouring samples of exp(i k r^2 / 2d)
    xmax = grid.nx // 2 * grid.pitch_x
    ymax = grid.ny // 2 * grid.pitch_y
    step = k / distance * max(xmax * grid.pitch_x, ymax * grid.pitch_y)
    if step > math.pi:
        warnings.warn(f"{what} quadratic phase is aliased on this grid "
                      f"(max phase step {step:.3g} rad per sample)", RuntimeWarning, stacklevel=3)


def fraunhofer_numeric(field: ComplexField2D, cfg: OpticalConfig, include_prefactor: bool = False,
                       normalization: str = "physical") -> PropagationResult:
    """Far field at distance ``cfg.z`` as a centred 2D DFT of ``field``.

    Parameters
    ----------
    field : ComplexField2D
        Aperture-plane field. Sampling adequacy is the caller's concern.
    cfg : OpticalConfig
        Supplies ``wavelength`` and ``z``.
    include_prefactor : bool
        Multiply by ``exp(ikz) exp(ik (x^2 + y^2) / 2z)``. Off by default since
        intensities do not depend on it.
    normalization : {"physical", "unitary"}

    Returns
    -------
    PropagationResult
        Field on a lens-plane grid of pitch ``lambda z / (N pitch_in)``.
    """
    out = _transform(field, cfg.wavelength, cfg.z, normalization, Plane.LENS)
    if include_prefactor:
        _warn_if_undersampled(out.grid, cfg.k, cfg.z, "far-field")
        ph = np.exp(1j * cfg.k * cfg.z) * _quadratic_phase(out.grid, cfg.k, cfg.z)
        out = out.replace(out.samples * ph)
    return PropagationResult(out, include_prefactor)


def lens_ft(field: ComplexField2D, cfg: OpticalConfig, include_prefactor: bool = False,
            normalization: str = "unitary") -> ComplexField2D:
    """Map a lens-plane field to the back focal plane of a lens of focal length ``cfg.f``.

    With ``include_prefactor`` the input is first multiplied by
    ``exp(ik rho^2 / 2f)`` and the output by ``exp(-ikf) exp(ik rho_f^2 / 2f)``.
    The output pitch is ``lambda f / (N pitch_in)``.
    """
    g = field.grid
    if include_prefactor:
        _warn_if_undersampled(g, cfg.k, cfg.f, "lens")
        field = field.replace(field.samples * _quadratic_phase(g, cfg.k, cfg.f))
    out = _transform(field, cfg.wavelength, cfg.f, normalization, Plane.FOCAL)
    if include_prefactor:
        ph = np.exp(-1j * cfg.k * cfg.f) * _quadratic_phase(out.grid, cfg.k, cfg.f)
        out = out.replace(out.samples * ph)
    return out


def jinc_amplitude(x):
    """``2 J1(x) / x`` with the limit value 1 at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x**2 / 8.0, 2.0 * special.j1(xs) / xs)
    return out if out.ndim else float(out)


def annular_ring_ft(rho, spec: AnnulusSpec, cfg: OpticalConfig):
    """Closed-form far-field amplitude of a uniformly lit annulus.

    ``[a1 J1(k a1 rho/z) - a0 J1(k a0 rho/z)] / (rho/z)``, which tends to
    ``k (a1^2 - a0^2) / 2`` as ``rho -> 0``. This is the aperture integral
    ``iint t(xi, eta) exp(-ik (x xi + y eta)/z)`` divided by ``lambda``.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    k, z = cfg.k, cfg.z
    # a J1(k a rho / z) / (rho / z) == (k a^2 / 2) * jinc(k a rho / z)
    out = 0.5 * k * (spec.a1**2 * jinc_amplitude(k * spec.a1 * rho / z)
                     - spec.a0**2 * jinc_amplitude(k * spec.a0 * rho / z))
    return out if np.ndim(out) else float(out)


def gaussian_ft(rho, spec: GaussianSpec, cfg: OpticalConfig):
    """Continuum 2D transform of ``exp(-(r/w)^2)`` evaluated at ``nu = rho / (lambda z)``.

    ``pi w^2 exp(-(rho / W)^2)`` with far-field radius ``W = 2z / (k w)``.
    """
    rho = np.asarray(rho, dtype=float)
    W = 2.0 * cfg.z / (cfg.k * spec.w)
    return np.pi * spec.w**2 * np.exp(-((rho / W) ** 2))


def gaussian_farfield(grid: GridSpec, spec: GaussianSpec, cfg: OpticalConfig) -> ComplexField2D:
    """Physical-normalisation far field of a centred Gaussian, sampled on a lens-plane grid."""
    return ComplexField2D(grid, gaussian_ft(grid.radius(), spec, cfg) / (1j * cfg.wavelength * cfg.z))


def gaussian_annulus_farfield(grid: GridSpec, gspec: GaussianSpec, aspec: AnnulusSpec,
                              cfg: OpticalConfig, include_prefactor: bool = False,
                              normalization: str = "physical") -> ComplexField2D:
    """Far field of a Gaussian beam clipped by an annulus, via the direct product and one FFT."""
    apertured = apply_mask(gaussian_field(grid, gspec), annulus_mask(grid, aspec))
    return fraunhofer_numeric(apertured, cfg, include_prefactor, normalization).field


def _convolved_radial(nu, gspec: GaussianSpec, aspec: AnnulusSpec, n_radial: int, n_angle: int):
    # (G * T)(nu) with G the Gaussian transform and T the annulus transform, both
    # in spatial-frequency units; G is narrow, so integrate it in polar coordinates
    # about the origin and evaluate T on the shifted points.
    w = gspec.w
    smax = 8.0 / (np.pi * w)
    s, ws = np.polynomial.legendre.leggauss(n_radial)
    s = 0.5 * smax * (s + 1.0)
    ws = 0.5 * smax * ws
    phi = (np.arange(n_angle) + 0.5) * (np.pi / n_angle)  # even in phi: integrate [0, pi], double
    wphi = 2.0 * np.pi / n_angle
    G = np.pi * w**2 * np.exp(-((np.pi * w * s) ** 2))
    weights = (G * s * ws)[:, None] * wphi  # (n_radial, 1)

    def T(q):
        # annulus transform: a J1(2 pi a q) / q, summed over the two edges
        return np.pi * (aspec.a1**2 * jinc_amplitude(2 * np.pi * aspec.a1 * q)
                        - aspec.a0**2 * jinc_amplitude(2 * np.pi * aspec.a0 * q))

    cs, sn = np.cos(phi), np.sin(phi)
    out = np.empty(nu.shape)
    for i, n0 in enumerate(nu):
        q = np.sqrt((n0 - s[:, None] * cs) ** 2 + (s[:, None] * sn) ** 2)
        out[i] = np.sum(weights * T(q))
    return out


def gaussian_annulus_farfield_convolution(grid: GridSpec, gspec: GaussianSpec, aspec: AnnulusSpec,
                                          cfg: OpticalConfig, oversample: int = 8,
                                          n_radial: int = 48, n_angle: int = 64) -> ComplexField2D:
    """Far field of the clipped Gaussian as the convolution of the two closed-form transforms.

    Independent of any FFT: the radially symmetric convolution is evaluated by
    quadrature on a radial frequency grid ``oversample`` times finer than the
    FFT output grid, then interpolated with a cubic spline onto the output
    samples. Physical normalisation, no quadratic phase prefactor. The
    Gaussian must be centred.
    """
    if gspec.x0 or gspec.y0:
        raise ValueError("convolution path requires a centred Gaussian")
    px, py = output_pitch(grid, cfg.wavelength, cfg.z)
    out_grid = grid.with_plane(Plane.LENS, px, py)
    rho = out_grid.radius()
    dnu = min(px, py) / (cfg.wavelength * cfg.z)
    nu_max = rho.max() / (cfg.wavelength * cfg.z)
    nu = np.arange(0.0, nu_max + 4 * dnu, dnu / oversample)
    radial = _convolved_radial(nu, gspec, aspec, n_radial, n_angle)
    spline = CubicSpline(np.concatenate([-nu[:0:-1], nu]), np.concatenate([radial[:0:-1], radial]))
    values = spline(rho / (cfg.wavelength * cfg.z))
    return ComplexField2D(out_grid, values / (1j * cfg.wavelength * cfg.z))
