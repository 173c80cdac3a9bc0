"""Tests for lattices, transforms, derivatives, dealiasing and norms."""

import numpy as np
import pytest

from greenprop import build_lattice
from greenprop.errors import (
    ConfigurationError,
    ShapeError,
    UnsupportedOrderError,
    VacuumError,
)
from greenprop.spectral import (
    PhysicalState,
    dealias,
    gradient_fields,
    hermitian_symmetry_error,
    lp_norm,
    sobolev_seminorm,
    spectral_derivative,
    to_physical,
    to_spectral,
)

from conftest import random_state_coeffs


class TestLattice:
    def test_unit_spacing_wavenumbers(self):
        lat = build_lattice(8, 2.0 * np.pi)
        assert sorted(lat.k_axis.tolist()) == [-4, -3, -2, -1, 0, 1, 2, 3]

    def test_smallest_positive_wavenumber(self):
        lat = build_lattice(8, 4.0 * np.pi)
        positive = lat.k_axis[lat.k_axis > 0]
        assert np.isclose(positive.min(), 0.5)

    def test_odd_n_rejected(self):
        with pytest.raises(ConfigurationError):
            build_lattice(7, 1.0)

    @pytest.mark.parametrize("n", [4, 6, 514])
    def test_out_of_range_n_rejected(self, n):
        with pytest.raises(ConfigurationError):
            build_lattice(n, 1.0)

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ConfigurationError):
            build_lattice(16, 0.0)

    def test_dealias_mask_two_thirds(self):
        lat = build_lattice(12, 2.0 * np.pi)
        jhat = np.fft.fftfreq(12, d=1.0 / 12)
        keep = np.abs(jhat) <= 4.0
        expected = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
        assert np.array_equal(lat.dealias_mask, expected)


class TestTransforms:
    def test_constant_field_zero_mode(self, lattice16):
        field = np.full(lattice16.shape, 3.25)
        coeffs = to_spectral(field, lattice16)
        assert np.isclose(coeffs[0, 0, 0].real, 3.25)
        coeffs[0, 0, 0] = 0.0
        assert np.max(np.abs(coeffs)) < 1e-14

    def test_cosine_two_modes(self, lattice16):
        x, _, _ = lattice16.grid()
        field = np.cos(2.0 * np.pi * x / lattice16.length) * np.ones(lattice16.shape)
        coeffs = to_spectral(field, lattice16)
        assert np.isclose(coeffs[1, 0, 0], 0.5)
        assert np.isclose(coeffs[-1, 0, 0], 0.5)
        coeffs[1, 0, 0] = coeffs[-1, 0, 0] = 0.0
        assert np.max(np.abs(coeffs)) < 1e-14

    def test_round_trip_100_seeded_states(self, lattice16):
        rng = np.random.default_rng(42)
        for _ in range(100):
            field = rng.standard_normal(lattice16.shape)
            back = to_physical(to_spectral(field, lattice16), lattice16)
            scale = np.max(np.abs(field))
            assert np.max(np.abs(back - field)) <= 1e-12 * scale

    def test_shape_mismatch(self, lattice16):
        with pytest.raises(ShapeError):
            to_spectral(np.zeros((8, 8, 8)), lattice16)


class TestDerivative:
    def test_cos_to_minus_sin(self, lattice16):
        x, _, _ = lattice16.grid()
        field = np.cos(x) * np.ones(lattice16.shape)
        coeffs = to_spectral(field, lattice16)
        deriv = to_physical(spectral_derivative(coeffs, lattice16, 0), lattice16)
        assert np.max(np.abs(deriv - (-np.sin(x)) * np.ones(lattice16.shape))) < 1e-12

    def test_order_zero_is_identity(self, lattice16):
        rng = np.random.default_rng(0)
        coeffs = to_spectral(rng.standard_normal(lattice16.shape), lattice16)
        assert np.array_equal(spectral_derivative(coeffs, lattice16, 1, 0), coeffs)

    def test_second_derivative_multiplier(self, lattice16):
        coeffs = np.zeros(lattice16.shape, dtype=complex)
        coeffs[0, 2, 0] = 1.0  # mode jhat = (0, 2, 0), k = 2
        out = spectral_derivative(coeffs, lattice16, 1, 2)
        assert np.isclose(out[0, 2, 0], -4.0)

    def test_order_above_four_rejected(self, lattice16):
        coeffs = np.zeros(lattice16.shape, dtype=complex)
        with pytest.raises(UnsupportedOrderError):
            spectral_derivative(coeffs, lattice16, 0, 5)

    def test_hermitian_symmetry_preserved(self, lattice16):
        rng = np.random.default_rng(3)
        coeffs = to_spectral(rng.standard_normal(lattice16.shape), lattice16)
        for order in (1, 2, 3):
            out = spectral_derivative(coeffs, lattice16, 0, order)
            assert hermitian_symmetry_error(out, lattice16) < 1e-13


class TestDealias:
    def test_band_limited_unchanged(self, lattice16):
        rng = np.random.default_rng(5)
        coeffs = dealias(to_spectral(rng.standard_normal(lattice16.shape), lattice16), lattice16)
        assert np.array_equal(dealias(coeffs, lattice16), coeffs)

    def test_highest_mode_zeroed(self, lattice16):
        coeffs = np.zeros(lattice16.shape, dtype=complex)
        coeffs[lattice16.n // 2 - 1, 0, 0] = 1.0  # jhat = 7 > 16/3
        assert np.max(np.abs(dealias(coeffs, lattice16))) == 0.0

    def test_idempotent(self, lattice16):
        rng = np.random.default_rng(6)
        coeffs = to_spectral(rng.standard_normal(lattice16.shape), lattice16)
        once = dealias(coeffs, lattice16)
        assert np.array_equal(dealias(once, lattice16), once)

    def test_hermitian_symmetry_preserved(self, lattice16):
        rng = np.random.default_rng(7)
        coeffs = to_spectral(rng.standard_normal(lattice16.shape), lattice16)
        assert hermitian_symmetry_error(dealias(coeffs, lattice16), lattice16) < 1e-13


class TestNorms:
    def test_constant_field_lp(self, lattice16):
        c = -2.5
        field = np.full(lattice16.shape, c)
        volume = lattice16.volume
        for p in (1.0, 4.0 / 3.0, 2.0, 4.0):
            assert np.isclose(lp_norm(field, p, lattice16), abs(c) * volume ** (1.0 / p))
        assert np.isclose(lp_norm(field, np.inf, lattice16), abs(c))

    def test_sup_norm_of_sine(self):
        lat = build_lattice(32, 2.0 * np.pi)
        x, _, _ = lat.grid()
        field = np.sin(x) * np.ones(lat.shape)
        assert abs(lp_norm(field, np.inf, lat) - 1.0) < 1e-3

    def test_plancherel(self, lattice16):
        rng = np.random.default_rng(11)
        field = rng.standard_normal(lattice16.shape)
        coeffs = to_spectral(field, lattice16)
        spectral_side = np.sqrt(np.sum(np.abs(coeffs) ** 2) * lattice16.volume)
        physical_side = lp_norm(field, 2.0, lattice16)
        assert abs(physical_side - spectral_side) <= 1e-10 * physical_side

    def test_unsupported_p(self, lattice16):
        with pytest.raises(ConfigurationError):
            lp_norm(np.zeros(lattice16.shape), 3.0, lattice16)

    def test_absolute_homogeneity(self, lattice16):
        rng = np.random.default_rng(12)
        field = rng.standard_normal(lattice16.shape)
        for p in (1.0, 4.0 / 3.0, 2.0, 4.0, np.inf):
            base = lp_norm(field, p, lattice16)
            scaled = lp_norm(-3.7 * field, p, lattice16)
            assert abs(scaled - 3.7 * base) <= 1e-12 * scaled

    def test_multi_component_magnitude(self, lattice16):
        fields = np.stack([np.full(lattice16.shape, 3.0), np.full(lattice16.shape, 4.0)])
        assert np.isclose(lp_norm(fields, np.inf, lattice16), 5.0)


class TestSobolevSeminorm:
    def test_k0_equals_l2(self, lattice16):
        rng = np.random.default_rng(13)
        field = rng.standard_normal(lattice16.shape)
        coeffs = to_spectral(field, lattice16)
        l2 = lp_norm(field, 2.0, lattice16)
        assert abs(sobolev_seminorm(coeffs, lattice16, 0) - l2) <= 1e-10 * l2

    def test_single_mode_scaling(self, lattice16):
        coeffs = np.zeros(lattice16.shape, dtype=complex)
        coeffs[2, 0, 0] = 0.7  # |xi| = 2
        base = sobolev_seminorm(coeffs, lattice16, 0)
        for k in (1, 2, 3, 4):
            assert np.isclose(sobolev_seminorm(coeffs, lattice16, k), 2.0**k * base)

    def test_k1_matches_componentwise_gradients(self, lattice16):
        rng = np.random.default_rng(14)
        coeffs = random_state_coeffs(lattice16, rng)
        grads = gradient_fields(coeffs, lattice16)  # (3, 4, n, n, n)
        direct = np.sqrt(sum(lp_norm(grads[a], 2.0, lattice16) ** 2 for a in range(3)))
        seminorm = sobolev_seminorm(coeffs, lattice16, 1)
        assert abs(direct - seminorm) <= 1e-10 * seminorm

    def test_order_above_four_rejected(self, lattice16):
        with pytest.raises(UnsupportedOrderError):
            sobolev_seminorm(np.zeros(lattice16.shape, dtype=complex), lattice16, 5)


class TestPhysicalState:
    def test_vacuum_guard(self, lattice16):
        rho = np.full(lattice16.shape, -0.9999999)
        state = PhysicalState(rho=rho, velocity=np.zeros((3,) + lattice16.shape))
        with pytest.raises(VacuumError):
            state.check_vacuum()

    def test_round_trip_through_spectral(self, lattice16):
        from greenprop.spectral import SpectralState

        rng = np.random.default_rng(15)
        fields = 0.01 * rng.standard_normal((4,) + lattice16.shape)
        state = PhysicalState.from_array(fields)
        back = SpectralState.from_physical(state, lattice16).to_physical_state(lattice16)
        assert np.max(np.abs(back.as_array() - fields)) < 1e-14
