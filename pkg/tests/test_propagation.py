import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from fwmconv import (AnnulusSpec, ComplexField2D, GaussianSpec, OpticalConfig, Plane,
                     annular_ring_ft, annulus_mask, apply_mask, centered_fft2,
                     fraunhofer_numeric, gaussian_annulus_farfield,
                     gaussian_annulus_farfield_convolution, gaussian_farfield, gaussian_field,
                     jinc_amplitude, lens_ft, make_grid, output_pitch, total_power, zero_pad)

CFG = OpticalConfig()
RING = AnnulusSpec(200.0, 400.0)


def bisect(f, lo, hi, tol=1e-13):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_output_pitch_and_plane():
    g = make_grid(256, 128, 3.0)
    out = fraunhofer_numeric(ComplexField2D(g, np.ones(g.shape)), CFG)
    assert out.grid.plane is Plane.LENS
    assert out.grid.shape == g.shape
    assert math.isclose(out.grid.pitch_x, 0.795 * 3e5 / (256 * 3.0))
    assert math.isclose(out.grid.pitch_y, 0.795 * 3e5 / (128 * 3.0))
    assert output_pitch(g, 0.795, 3e5) == (out.grid.pitch_x, out.grid.pitch_y)
    assert not out.phase_prefactor_included


def test_delta_gives_constant():
    g = make_grid(32, 32, 2.0)
    a = np.zeros(g.shape)
    a[16, 16] = 1.0
    out = fraunhofer_numeric(ComplexField2D(g, a), CFG).field.samples
    np.testing.assert_allclose(out, 4.0 / (1j * CFG.wavelength * CFG.z), rtol=1e-14)


def test_matches_direct_dft_sum():
    rng = np.random.default_rng(3)
    g = make_grid(8, 16, 1.7)
    a = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    out = fraunhofer_numeric(ComplexField2D(g, a), CFG).field
    X, Y = g.mesh()
    U, V = out.grid.mesh()
    lz = CFG.wavelength * CFG.z
    phase = np.exp(-2j * np.pi * (np.multiply.outer(U, X) + np.multiply.outer(V, Y)) / lz)
    ref = np.einsum("abij,ij->ab", phase, a) * g.pitch_x * g.pitch_y / (1j * lz)
    np.testing.assert_allclose(out.samples, ref, rtol=1e-11, atol=1e-11 * np.abs(ref).max())


@settings(max_examples=30, deadline=None)
@given(n=st.sampled_from([8, 16, 32]), seed=st.integers(0, 2**32 - 1))
def test_real_input_is_hermitian(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    F = centered_fft2(a)
    idx = (n - np.arange(n)) % n  # index of -x about the centre sample
    np.testing.assert_allclose(F[np.ix_(idx, idx)], np.conj(F), atol=1e-10 * np.abs(F).max())


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), pitch=st.floats(0.5, 10))
def test_unitary_and_physical_differ_by_minus_i(seed, pitch):
    rng = np.random.default_rng(seed)
    g = make_grid(16, 16, pitch)
    u = ComplexField2D(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    phys = fraunhofer_numeric(u, CFG, normalization="physical").field
    uni = fraunhofer_numeric(u, CFG, normalization="unitary").field
    np.testing.assert_allclose(phys.samples, -1j * uni.samples, rtol=1e-12, atol=1e-14)
    assert math.isclose(total_power(uni), total_power(u), rel_tol=1e-12)


def test_rejects_unknown_normalization():
    g = make_grid(8, 8, 1.0)
    with pytest.raises(ValueError):
        fraunhofer_numeric(ComplexField2D(g, np.ones(g.shape)), CFG, normalization="ortho")


def test_disc_first_null():
    # first J1 root from sign changes of scipy's j1, refined by bisection
    x = np.linspace(1, 5, 401)
    i = np.flatnonzero(np.diff(np.sign(special.j1(x))))[0]
    j11 = bisect(special.j1, x[i], x[i + 1])
    assert math.isclose(j11, 3.831705970207513, rel_tol=1e-12)

    g = make_grid(1024, 1024, 3.0)
    u = apply_mask(ComplexField2D(g, np.ones(g.shape)), annulus_mask(g, AnnulusSpec(0.0, 400.0)))
    far = fraunhofer_numeric(zero_pad(u, 4), CFG).field
    row = far.intensity[far.grid.ny // 2]
    c = far.grid.nx // 2
    first_min = c + int(np.flatnonzero(np.diff(row[c:]) > 0)[0])
    null = j11 * CFG.z / (CFG.k * 400.0)
    assert abs(far.grid.x()[first_min] - null) <= far.grid.pitch_x


@pytest.mark.parametrize("rho", [5.0, 120.0, 400.0, 900.0])
def test_ring_ft_matches_aperture_quadrature(rho):
    k, z, lam = CFG.k, CFG.z, CFG.wavelength

    def integrand(phi, r):
        return r * np.cos(k * rho * r * np.cos(phi) / z)

    val, err = integrate.dblquad(integrand, 200.0, 400.0, 0.0, 2 * np.pi, epsabs=1e-9, epsrel=1e-12)
    assert math.isclose(annular_ring_ft(rho, RING, CFG), val / lam, rel_tol=1e-6)


def test_ring_ft_small_rho_limit():
    limit = CFG.k * (400.0**2 - 200.0**2) / 2
    assert annular_ring_ft(0.0, RING, CFG) == limit
    # series oracle: J1(x) = x/2 - x^3/16 + ..., so U ~ limit - (k^3 rho^2 / 16 z^2)(a1^4 - a0^4)
    rho = 1e-2
    series = limit - CFG.k**3 * rho**2 / (16 * CFG.z**2) * (400.0**4 - 200.0**4)
    assert math.isclose(annular_ring_ft(rho, RING, CFG), series, rel_tol=1e-12)
    with pytest.raises(ValueError):
        annular_ring_ft(-1.0, RING, CFG)


def test_jinc_amplitude():
    assert jinc_amplitude(0.0) == 1.0
    x = np.array([1e-9, 0.1, 2.0, 10.0])
    np.testing.assert_allclose(jinc_amplitude(x), 2 * special.j1(x) / x, rtol=1e-14)


def test_annulus_farfield_is_ring_ft_scaled():
    # uniformly lit annulus: physical-normalised FFT ~ lambda * ring_ft / (i lambda z)
    g = make_grid(1024, 1024, 2.0)
    u = apply_mask(ComplexField2D(g, np.ones(g.shape)), annulus_mask(g, RING))
    far = fraunhofer_numeric(u, CFG).field
    ref = CFG.wavelength * annular_ring_ft(far.grid.radius(), RING, CFG) / (1j * CFG.wavelength * CFG.z)
    c = g.nx // 2
    assert abs(far.samples[c, c] / ref[c, c] - 1) < 1e-3
    # the amplitude tail (~rho^-3/2) aliases across the band edge; compare intensities
    I, Iref = far.intensity, np.abs(ref) ** 2
    assert np.linalg.norm(I - Iref) / np.linalg.norm(Iref) < 2e-3


def test_gaussian_farfield_closed_form():
    g = make_grid(512, 512, 3.0)
    spec = GaussianSpec(150.0)
    num = fraunhofer_numeric(gaussian_field(g, spec), CFG).field
    ref = gaussian_farfield(num.grid, spec, CFG)
    np.testing.assert_allclose(num.samples, ref.samples, atol=1e-12 * np.abs(ref.samples).max())
    # the far-field 1/e amplitude radius is 2z / (k w)
    W = 2 * CFG.z / (CFG.k * spec.w)
    assert math.isclose(abs(ref.samples[256, 256]) * math.exp(-1),
                        abs(gaussian_farfield(make_grid(8, 8, W), spec, CFG).samples[4, 5]),
                        rel_tol=1e-12)


def test_fft_path_matches_convolution_on_small_grid():
    g = make_grid(256, 256, 6.0)
    gs = GaussianSpec(300.0)
    fft = gaussian_annulus_farfield(g, gs, RING, CFG).intensity
    conv = gaussian_annulus_farfield_convolution(g, gs, RING, CFG).intensity
    assert np.linalg.norm(fft - conv) / np.linalg.norm(conv) < 2e-2
    with pytest.raises(ValueError):
        gaussian_annulus_farfield_convolution(g, GaussianSpec(300.0, x0=5.0), RING, CFG)


def test_prefactor_is_unit_modulus_and_warns_when_aliased():
    # the far-field phase is resolved when N pitch^2 > lambda z
    g = make_grid(64, 64, 80.0)
    u = gaussian_field(g, GaussianSpec(800.0))
    plain = fraunhofer_numeric(u, CFG)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        withp = fraunhofer_numeric(u, CFG, include_prefactor=True)
    assert withp.phase_prefactor_included
    np.testing.assert_allclose(np.abs(withp.field.samples), np.abs(plain.field.samples), rtol=1e-12)
    with pytest.warns(RuntimeWarning):
        fraunhofer_numeric(u, OpticalConfig(z=1e9), include_prefactor=True)


def test_lens_ft_conserves_power_and_images_the_ring():
    g = make_grid(1024, 1024, 3.0)
    u = apply_mask(gaussian_field(g, GaussianSpec.from_fwhm(1000.0)), annulus_mask(g, RING))
    far = fraunhofer_numeric(zero_pad(u, 4), CFG, normalization="unitary").field
    focal = lens_ft(far, CFG)
    assert focal.grid.plane is Plane.FOCAL
    assert math.isclose(total_power(focal), total_power(far), rel_tol=1e-10)
    assert math.isclose(focal.grid.pitch_x, CFG.wavelength * CFG.f / (4096 * far.grid.pitch_x))
    # two transforms image the annulus, magnified by f / z
    r = focal.grid.radius()
    inside = (r >= 200 * CFG.f / CFG.z - 2 * focal.grid.pitch_x) & (r <= 400 * CFG.f / CFG.z + 2 * focal.grid.pitch_x)
    assert focal.intensity[inside].sum() / focal.intensity.sum() > 0.999
    assert focal.intensity[r < 100 * CFG.f / CFG.z].sum() < 1e-6 * focal.intensity.sum()
    with_prefactor = lens_ft(far, CFG, include_prefactor=False, normalization="physical")
    np.testing.assert_allclose(with_prefactor.samples, -1j * focal.samples, atol=1e-12 * np.abs(focal.samples).max())
