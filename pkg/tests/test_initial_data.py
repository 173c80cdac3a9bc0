"""Tests for the initial-data generators."""

import numpy as np
import pytest

from greenprop import build_lattice
from greenprop.errors import ConfigurationError
from greenprop.initial_data import gaussian_bump, hf_packet, random_band
from greenprop.spectral import lp_norm, sobolev_seminorm, to_spectral


@pytest.fixture
def lattice():
    return build_lattice(32, 2.0 * np.pi)


class TestGaussianBump:
    def test_l2_norm_against_closed_form(self):
        # |rho0|_2^2 = eps^2 (pi sigma^2/2)^{3/2}; the gradient velocity adds
        # a factor 3 u_scale^2/4 of that (integral of |grad exp|^2).
        lat = build_lattice(64, 32.0 * np.pi)
        eps, sigma = 1e-2, 2.0 * np.pi
        state = gaussian_bump(lat, amplitude=eps, width=sigma, u_scale=1.0)
        measured = lp_norm(state.as_array(), 2.0, lat)
        closed = eps * np.sqrt((1.0 + 0.75) * (np.pi * sigma**2 / 2.0) ** 1.5)
        assert abs(measured - closed) <= 0.05 * closed

    def test_velocity_is_divergence_bearing(self, lattice):
        state = gaussian_bump(lattice, amplitude=0.01, width=1.0)
        coeffs = to_spectral(state.velocity, lattice)
        from greenprop.spectral import spectral_derivative, to_physical

        div = sum(
            to_physical(spectral_derivative(coeffs[i], lattice, i), lattice)
            for i in range(3)
        )
        assert np.max(np.abs(div)) > 1e-6

    def test_vacuum_safe(self, lattice):
        state = gaussian_bump(lattice, amplitude=0.01)
        state.check_vacuum()

    def test_bad_amplitude(self, lattice):
        with pytest.raises(ConfigurationError):
            gaussian_bump(lattice, amplitude=0.0)


class TestHfPacket:
    def test_monochromatic_scaling_ratios(self, lattice):
        K = 8.0
        state = hf_packet(lattice, K)
        arr = state.as_array()
        coeffs = to_spectral(arr, lattice)
        sup = lp_norm(arr, np.inf, lattice)
        assert abs(sup - K**-2) <= 1e-12
        from greenprop.spectral import gradient_fields

        grads = gradient_fields(coeffs, lattice).reshape((12,) + lattice.shape)
        grad_sup = lp_norm(grads, np.inf, lattice)
        assert abs(grad_sup / sup - K) <= 0.1 * K
        ratio4 = sobolev_seminorm(coeffs, lattice, 4) / sobolev_seminorm(coeffs, lattice, 0)
        assert abs(ratio4 - K**4) <= 0.1 * K**4

    def test_unresolvable_wavenumber_rejected(self, lattice):
        with pytest.raises(ConfigurationError):
            hf_packet(lattice, 11.0)  # n/3 * 2pi/L = 10.67

    def test_non_lattice_wavenumber_rejected(self, lattice):
        with pytest.raises(ConfigurationError):
            hf_packet(lattice, 2.5)


class TestRandomBand:
    def test_seed_determinism(self, lattice):
        a = random_band(lattice, seed=42, band=(2.0, 6.0), target_l2=0.01)
        b = random_band(lattice, seed=42, band=(2.0, 6.0), target_l2=0.01)
        assert np.array_equal(a.as_array(), b.as_array())
        c = random_band(lattice, seed=43, band=(2.0, 6.0), target_l2=0.01)
        assert not np.array_equal(a.as_array(), c.as_array())

    def test_target_l2(self, lattice):
        state = random_band(lattice, seed=1, band=(2.0, 6.0), target_l2=0.037)
        assert np.isclose(lp_norm(state.as_array(), 2.0, lattice), 0.037)

    def test_band_respected(self, lattice):
        state = random_band(lattice, seed=2, band=(3.0, 5.0), target_l2=0.01)
        coeffs = to_spectral(state.as_array(), lattice)
        r = lattice.k_magnitude()
        outside = (r < 3.0) | (r > 5.0)
        assert np.max(np.abs(coeffs[:, outside])) < 1e-16

    def test_empty_band_rejected(self, lattice):
        with pytest.raises(ConfigurationError):
            random_band(lattice, seed=3, band=(20.0, 21.0), target_l2=0.01)

    def test_fields_are_real(self, lattice):
        state = random_band(lattice, seed=4, band=(1.0, 4.0), target_l2=0.01)
        assert np.all(np.isreal(state.rho))
        state.check_vacuum()
