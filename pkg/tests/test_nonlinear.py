"""Tests for the coefficient functions and the pseudo-spectral RHS."""

import numpy as np
import pytest

from greenprop import ViscosityParams, build_lattice
from greenprop.errors import ConfigurationError, DegenerateInputError, VacuumError
from greenprop.nonlinear import (
    ConsistencyError,
    composition_bound_check,
    evaluate_rhs,
    g_alpha,
    h_alpha,
    h_alpha_smallness_check,
    h_gamma,
    n4_magnitude,
    rhs_spectral,
)
from greenprop.spectral import (
    PhysicalState,
    SpectralState,
    dealias,
    lp_norm,
    sobolev_seminorm,
    to_physical,
    to_spectral,
)


class TestCoefficientFunctions:
    def test_equilibrium_values(self):
        assert h_gamma(0.0, 1.4) == 0.0
        assert g_alpha(0.0, 0.8) == 0.8
        assert h_alpha(0.0, 0.8) == 0.0

    def test_alpha_one_identically_zero(self):
        rho = np.linspace(-0.4, 0.4, 101)
        assert np.all(h_alpha(rho, 1.0) == 0.0)

    def test_exponent_cancellations(self):
        assert h_gamma(0.1, 2.0) == 0.0
        assert np.isclose(g_alpha(0.1, 2.0), 2.0)
        assert np.isclose(h_alpha(0.1, 2.0), 0.1)

    def test_vacuum_rejected(self):
        with pytest.raises(VacuumError):
            h_gamma(-1.0, 1.4)


def make_pair(fields, lattice):
    state = PhysicalState.from_array(fields)
    return state, SpectralState.from_physical(state, lattice)


class TestEvaluateRhs:
    @pytest.fixture
    def lattice(self):
        return build_lattice(32, 2.0 * np.pi)

    @pytest.fixture
    def nl_params(self):
        return ViscosityParams(mu=1.0, lambda_bulk=0.3, alpha=1.2, gamma=1.7)

    def test_zero_velocity(self, lattice, nl_params):
        x, _, _ = lattice.grid()
        fields = np.zeros((4,) + lattice.shape)
        fields[0] = 0.05 * np.cos(x) * np.ones(lattice.shape)
        state, spec = make_pair(fields, lattice)
        rhs = evaluate_rhs(state, spec, nl_params, lattice)
        assert np.max(np.abs(rhs.n_rho)) < 1e-14
        # N_u reduces to -H_gamma(rho) grad(rho)
        from greenprop.spectral import spectral_derivative

        grad1 = to_physical(spectral_derivative(spec.coeffs[0], lattice, 0), lattice)
        expected = -h_gamma(fields[0], nl_params.gamma) * grad1
        assert np.max(np.abs(rhs.n_u[0] - expected)) < 1e-12
        assert np.max(np.abs(rhs.n_u[1:])) < 1e-13

    def test_zero_density(self, lattice, nl_params):
        x, y, _ = lattice.grid()
        fields = np.zeros((4,) + lattice.shape)
        fields[1] = 0.03 * np.sin(x) * np.ones(lattice.shape)
        fields[2] = 0.03 * np.cos(y) * np.ones(lattice.shape)
        state, spec = make_pair(fields, lattice)
        rhs = evaluate_rhs(state, spec, nl_params, lattice)
        assert np.max(np.abs(rhs.n_rho)) < 1e-14
        from greenprop.spectral import spectral_derivative

        u = fields[1:]
        for i in range(3):
            advect = np.zeros(lattice.shape)
            for a in range(3):
                advect += u[a] * to_physical(
                    spectral_derivative(spec.coeffs[1 + i], lattice, a), lattice
                )
            assert np.max(np.abs(rhs.n_u[i] + advect)) < 1e-12

    def test_single_mode_closed_form(self, lattice, nl_params):
        # rho = eps cos(x1), u = (eps sin(x1), 0, 0): all terms are elementary
        # trigonometric expressions, evaluated here in extended precision.
        eps = 0.01
        mu, lam = nl_params.mu, nl_params.lambda_bulk
        nu, alpha, gamma = nl_params.nu, nl_params.alpha, nl_params.gamma
        x, _, _ = lattice.grid()
        xg = (x * np.ones(lattice.shape)).astype(np.longdouble)
        cos, sin = np.cos(xg), np.sin(xg)
        fields = np.zeros((4,) + lattice.shape)
        fields[0] = (eps * cos).astype(float)
        fields[1] = (eps * sin).astype(float)
        state, spec = make_pair(fields, lattice)
        rhs = evaluate_rhs(state, spec, nl_params, lattice)

        e = np.longdouble(eps)
        n_rho_ref = -(e**2) * np.cos(2.0 * xg)
        base = 1.0 + e * cos
        n1 = -(e**2) * sin * cos
        n2 = e * sin * (base ** np.longdouble(gamma - 2.0) - 1.0)
        n3 = -nu * alpha * base ** np.longdouble(alpha - 2.0) * e**2 * sin * cos
        n4 = (base ** np.longdouble(alpha - 1.0) - 1.0) * (-nu * e * sin)
        n_u1_ref = n1 + n2 + n3 + n4

        assert np.max(np.abs(rhs.n_rho - n_rho_ref.astype(float))) < 1e-10
        assert np.max(np.abs(rhs.n_u[0] - n_u1_ref.astype(float))) < 1e-10
        assert np.max(np.abs(rhs.n_u[1:])) < 1e-12

    def test_divergence_structure(self, lattice, nl_params):
        rng = np.random.default_rng(21)
        fields = 0.02 * rng.standard_normal((4,) + lattice.shape)
        fields = to_physical(dealias(to_spectral(fields, lattice), lattice), lattice)
        state, spec = make_pair(fields, lattice)
        rhs = evaluate_rhs(state, spec, nl_params, lattice)
        l2 = lp_norm(rhs.n_rho, 2.0, lattice)
        assert abs(np.mean(rhs.n_rho)) <= 1e-13 * l2

    def test_dealias_idempotence(self, lattice, nl_params):
        rng = np.random.default_rng(22)
        fields = 0.02 * rng.standard_normal((4,) + lattice.shape)
        state, spec = make_pair(fields, lattice)
        out = rhs_spectral(spec.coeffs, lattice, nl_params)
        again = dealias(out, lattice)
        assert np.max(np.abs(again - out)) <= 1e-14

    def test_alpha_one_kills_n4(self, lattice):
        p1 = ViscosityParams(mu=1.0, lambda_bulk=0.3, alpha=1.0, gamma=1.7)
        rng = np.random.default_rng(23)
        fields = 0.05 * rng.standard_normal((4,) + lattice.shape)
        _, spec = make_pair(fields, lattice)
        assert n4_magnitude(spec.coeffs, lattice, p1) == 0.0

    def test_quadratic_leading_order(self, lattice, nl_params):
        rng = np.random.default_rng(24)
        base = rng.standard_normal((4,) + lattice.shape)
        base = to_physical(dealias(to_spectral(base, lattice), lattice), lattice)
        base /= np.max(np.abs(base))
        scaled_norms = []
        for s in (1e-2, 5e-3, 2.5e-3):
            _, spec = make_pair(s * base, lattice)
            out = rhs_spectral(spec.coeffs, lattice, nl_params)
            scaled_norms.append(sobolev_seminorm(out, lattice, 0) / s**2)
        drift1 = abs(scaled_norms[1] - scaled_norms[0]) / scaled_norms[0]
        drift2 = abs(scaled_norms[2] - scaled_norms[1]) / scaled_norms[1]
        assert drift1 <= 0.05 and drift2 <= 0.05
        assert drift2 <= drift1  # Richardson: error shrinks with s

    def test_vacuum_aborts(self, lattice, nl_params):
        fields = np.zeros((4,) + lattice.shape)
        fields[0] = -0.9999999
        state = PhysicalState.from_array(fields)
        spec = SpectralState.from_physical(state, lattice)
        with pytest.raises(VacuumError):
            rhs_spectral(spec.coeffs, lattice, nl_params)

    def test_inconsistent_pair_rejected(self, lattice, nl_params):
        rng = np.random.default_rng(25)
        fields = 0.02 * rng.standard_normal((4,) + lattice.shape)
        state, spec = make_pair(fields, lattice)
        spec.coeffs[1] *= 1.01
        with pytest.raises(ConsistencyError):
            evaluate_rhs(state, spec, nl_params, lattice)


class TestSmallnessCheck:
    def test_constant_field_example(self):
        rho = np.full((8, 8, 8), 0.3)
        ratio = h_alpha_smallness_check(rho, 1.1)
        expected = abs(1.3**0.1 - 1.0) / (0.1 * 0.3)
        assert np.isclose(ratio, expected)
        assert ratio <= 2.0

    def test_zero_field(self):
        assert h_alpha_smallness_check(np.zeros((4, 4, 4)), 1.3) == 0.0

    def test_alpha_one_rejected(self):
        with pytest.raises(DegenerateInputError):
            h_alpha_smallness_check(np.full((4, 4, 4), 0.2), 1.0)

    def test_dense_scalar_sampling_bound(self):
        # independent oracle: the ratio stays <= 2 on [-0.5, 0.5] x [0.5, 1.5]
        rho = np.linspace(-0.5, 0.5, 2001)
        rho = rho[rho != 0.0]
        worst = 0.0
        for alpha in np.linspace(0.5, 1.5, 201):
            if alpha == 1.0:
                continue
            ratio = np.abs((1.0 + rho) ** (alpha - 1.0) - 1.0) / (
                abs(alpha - 1.0) * np.abs(rho)
            )
            worst = max(worst, float(ratio.max()))
        assert worst <= 2.0

    def test_100_seeded_fields(self, lattice16):
        rng = np.random.default_rng(26)
        for _ in range(100):
            raw = rng.standard_normal(lattice16.shape)
            rho = 0.4 * raw / np.max(np.abs(raw))
            alpha = 1.0 + rng.uniform(-0.3, 0.3)
            if alpha == 1.0:
                continue
            assert h_alpha_smallness_check(rho, alpha) <= 2.0


class TestCompositionBound:
    def test_zero_field_degenerate_path(self, lattice16):
        ratio = composition_bound_check(
            np.zeros(lattice16.shape), lambda r: h_gamma(r, 1.4), 2, 2.0, lattice16
        )
        assert ratio == 0.0

    def test_gamma_three_identity(self, lattice16):
        x, _, _ = lattice16.grid()
        rho = 0.2 * np.cos(x) * np.ones(lattice16.shape)
        ratio = composition_bound_check(
            rho, lambda r: h_gamma(r, 3.0), 1, 2.0, lattice16
        )
        assert abs(ratio - 1.0) < 1e-12

    def test_sup_rho_above_one_rejected(self, lattice16):
        with pytest.raises(ConfigurationError):
            composition_bound_check(
                np.full(lattice16.shape, 1.5), lambda r: r, 1, 2.0, lattice16
            )

    def test_grid_refinement_stability(self):
        # band-limited rho realized identically on n = 32 and n = 64
        rng = np.random.default_rng(27)
        ratios = {}
        modes = [(1, 0, 2), (2, 1, 0), (0, 3, 1), (1, 1, 1)]
        amps = rng.standard_normal(len(modes))
        for n in (32, 64):
            lat = build_lattice(n, 2.0 * np.pi)
            x, y, z = lat.grid()
            rho = np.zeros(lat.shape)
            for (j1, j2, j3), a in zip(modes, amps):
                rho += a * np.cos(j1 * x + j2 * y + j3 * z)
            rho *= 0.4 / np.max(np.abs(rho))
            for p in (2.0, np.inf):
                ratios[(n, p)] = composition_bound_check(
                    rho, lambda r: h_gamma(r, 1.7), 2, p, lat
                )
        for p in (2.0, np.inf):
            a, b = ratios[(32, p)], ratios[(64, p)]
            assert abs(a - b) <= 0.05 * b, (p, a, b)
