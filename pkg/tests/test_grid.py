import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fwmconv import (ComplexField2D, GaussianSpec, GridSpec, OpticalConfig, Plane, crop_center,
                     gaussian_field, make_grid, total_power, zero_pad)


def test_origin_is_centre_sample():
    g = make_grid(16, 8, 2.0)
    assert g.shape == (8, 16)
    assert g.coordinate(8, 4) == (0.0, 0.0)
    assert g.x()[8] == 0.0 and g.y()[4] == 0.0
    assert g.extent == (-16.0, 14.0, -8.0, 6.0)
    X, Y = g.mesh()
    assert X.shape == Y.shape == (8, 16)
    assert X[0, 0] == -16.0 and Y[0, 0] == -8.0


@pytest.mark.parametrize("n", [0, 4, 12, 1000])
def test_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        make_grid(n, 16, 1.0)


@pytest.mark.parametrize("pitch", [0.0, -1.0, float("nan"), float("inf")])
def test_rejects_bad_pitch(pitch):
    with pytest.raises(ValueError):
        make_grid(16, 16, pitch)


def test_field_is_read_only_copy():
    g = make_grid(8, 8, 1.0)
    a = np.ones(g.shape)
    u = ComplexField2D(g, a)
    a[0, 0] = 5
    assert u.samples[0, 0] == 1
    with pytest.raises(ValueError):
        u.samples[0, 0] = 2
    with pytest.raises(ValueError):
        ComplexField2D(g, np.ones((8, 16)))


def test_with_plane_keeps_size():
    g = make_grid(32, 16, 3.0).with_plane(Plane.LENS, 5.0, 7.0)
    assert (g.nx, g.ny, g.pitch_x, g.pitch_y, g.plane) == (32, 16, 5.0, 7.0, Plane.LENS)


@settings(max_examples=50, deadline=None)
@given(phase=st.floats(-10, 10), seed=st.integers(0, 2**32 - 1))
def test_power_invariant_under_global_phase(phase, seed):
    rng = np.random.default_rng(seed)
    g = make_grid(16, 16, 1.5)
    a = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    u = ComplexField2D(g, a)
    assert math.isclose(total_power(u.replace(a * np.exp(1j * phase))), total_power(u), rel_tol=1e-12)


def test_gaussian_power_matches_quadrature():
    w = 40.0
    g = make_grid(256, 256, 1.0)
    # radial quadrature of exp(-2 r^2 / w^2) over the plane; closed form pi w^2 / 2
    ref, _ = integrate.quad(lambda r: 2 * np.pi * r * np.exp(-2 * r * r / w**2), 0, np.inf)
    assert math.isclose(ref, np.pi * w**2 / 2, rel_tol=1e-10)
    assert math.isclose(total_power(gaussian_field(g, GaussianSpec(w))), ref, rel_tol=1e-9)


def test_pad_then_crop_round_trips():
    g = make_grid(16, 8, 1.0)
    a = np.arange(128.0).reshape(8, 16)
    u = ComplexField2D(g, a)
    big = zero_pad(u, 4)
    assert big.grid.shape == (32, 64)
    assert big.samples[16, 32] == a[4, 8]
    assert total_power(big) == total_power(u)
    back = crop_center(big, 16, 8)
    np.testing.assert_array_equal(back.samples, u.samples)
    assert zero_pad(u, 1) is u
    with pytest.raises(ValueError):
        crop_center(u, 32, 8)


def test_optical_config_validates():
    assert math.isclose(OpticalConfig().k, 2 * math.pi / 0.795)
    with pytest.raises(ValueError):
        OpticalConfig(wavelength=0)
    with pytest.raises(ValueError):
        OpticalConfig(z=-1)


def test_gridspec_direct_construction_rejects_non_int():
    with pytest.raises(ValueError):
        GridSpec(16.5, 16, 1.0, 1.0)
