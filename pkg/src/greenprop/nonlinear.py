"""Pointwise coefficient functions and the pseudo-spectral nonlinear RHS.

The perturbation system reads V_t + L V = N(V) with N = (N_rho, N_u):

    N_rho = -div(rho u)
    N_u   = -u.grad(u) - H_gamma(rho) grad(rho)
            + G_alpha(rho) (2 mu grad(rho).Du + lambda (div u) grad(rho))
            + H_alpha(rho) (mu Lap(u) + (mu+lambda) grad(div u))

with H_gamma(s) = (1+s)^(gamma-2) - 1, G_alpha(s) = alpha (1+s)^(alpha-2),
H_alpha(s) = (1+s)^(alpha-1) - 1 and Du the symmetric velocity gradient.
All derivatives are spectral, all products pointwise in physical space, and
the assembled result is dealiased once.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, GreenpropError, VacuumError
from .spectral import (
    VACUUM_FLOOR,
    dealias_half,
    derivative_multiplier,
    derivative_multiplier_half,
    full_to_half,
    half_to_full,
    k_squared_half,
    lp_norm,
    sobolev_seminorm,
    to_physical,
    to_physical_half,
    to_spectral,
    to_spectral_half,
)


def _total_density(rho):
    rho = np.asarray(rho)
    base = 1.0 + rho
    if np.any(base <= 0.0) or not np.all(np.isfinite(rho)):
        raise VacuumError("1 + rho must stay positive")
    return base


def h_gamma(rho, gamma):
    """(1+rho)**(gamma-2) - 1; zero at equilibrium and when gamma = 2."""
    return _total_density(rho) ** (gamma - 2.0) - 1.0


def g_alpha(rho, alpha):
    """alpha * (1+rho)**(alpha-2); equals alpha at equilibrium."""
    return alpha * _total_density(rho) ** (alpha - 2.0)


def h_alpha(rho, alpha):
    """(1+rho)**(alpha-1) - 1; identically zero when alpha = 1."""
    if alpha == 1.0:
        return np.zeros_like(np.asarray(rho, dtype=float))
    return _total_density(rho) ** (alpha - 1.0) - 1.0


@dataclass
class NonlinearRHS:
    """Physical-space right-hand side (N_rho, N_u) on the lattice grid."""

    n_rho: np.ndarray       # (n, n, n)
    n_u: np.ndarray         # (3, n, n, n)

    def as_array(self):
        return np.concatenate([self.n_rho[None], self.n_u], axis=0)


class ConsistencyError(GreenpropError):
    """Physical and spectral halves of a state pair disagree."""


def rhs_spectral_half(coeffs, lattice, params, vacuum_floor=VACUUM_FLOOR, physical=None):
    """Dealiased half-spectrum coefficients of N(V) from a half-spectrum state.

    ``physical`` may pass the matching (4, n, n, n) physical fields to skip
    one inverse transform; it is trusted, not checked.  The density equation
    is assembled in divergence form, so its zero mode is exactly zero.
    """
    coeffs = np.asarray(coeffs)
    V = to_physical_half(coeffs, lattice) if physical is None else physical
    rho, u = V[0], V[1:]
    lowest = float(np.min(1.0 + rho))
    if not np.isfinite(lowest) or lowest <= vacuum_floor:
        raise VacuumError(f"total density reached {lowest} (floor {vacuum_floor})")

    mults = [derivative_multiplier_half(lattice, axis, 1) for axis in range(3)]
    k_sq = k_squared_half(lattice)

    grad_rho = np.empty((3,) + lattice.shape)
    for a in range(3):
        grad_rho[a] = to_physical_half(mults[a] * coeffs[0], lattice)
    grad_u = np.empty((3, 3) + lattice.shape)  # grad_u[a, i] = d_a u_i
    for a in range(3):
        for i in range(3):
            grad_u[a, i] = to_physical_half(mults[a] * coeffs[1 + i], lattice)
    div_u = grad_u[0, 0] + grad_u[1, 1] + grad_u[2, 2]

    # mu Lap(u) + (mu+lambda) grad(div u), assembled spectrally
    div_u_hat = mults[0] * coeffs[1] + mults[1] * coeffs[2] + mults[2] * coeffs[3]
    visc = np.empty((3,) + lattice.shape)
    for i in range(3):
        visc_hat = -params.mu * k_sq * coeffs[1 + i] + (
            params.mu + params.lambda_bulk
        ) * mults[i] * div_u_hat
        visc[i] = to_physical_half(visc_hat, lattice)

    coeff_hg = h_gamma(rho, params.gamma)
    coeff_ga = g_alpha(rho, params.alpha)
    coeff_ha = h_alpha(rho, params.alpha)

    out = np.zeros((4,) + lattice.shape[:-1] + (lattice.n // 2 + 1,), dtype=complex)
    for a in range(3):
        out[0] -= mults[a] * to_spectral_half(rho * u[a], lattice)

    n_u = np.empty((3,) + lattice.shape)
    for i in range(3):
        advect = u[0] * grad_u[0, i] + u[1] * grad_u[1, i] + u[2] * grad_u[2, i]
        # grad(rho).Du with Du the symmetric gradient: sum_a d_a(rho) Du[a, i]
        grad_rho_du = 0.5 * (
            grad_rho[0] * (grad_u[0, i] + grad_u[i, 0])
            + grad_rho[1] * (grad_u[1, i] + grad_u[i, 1])
            + grad_rho[2] * (grad_u[2, i] + grad_u[i, 2])
        )
        n_u[i] = (
            -advect
            - coeff_hg * grad_rho[i]
            + coeff_ga
            * (2.0 * params.mu * grad_rho_du + params.lambda_bulk * div_u * grad_rho[i])
            + coeff_ha * visc[i]
        )
    out[1:] = to_spectral_half(n_u, lattice)
    return dealias_half(out, lattice)


def rhs_spectral(coeffs, lattice, params, vacuum_floor=VACUUM_FLOOR, physical=None):
    """Full-spectrum wrapper around rhs_spectral_half."""
    half = rhs_spectral_half(
        full_to_half(coeffs, lattice), lattice, params, vacuum_floor, physical
    )
    return half_to_full(half, lattice)


def evaluate_rhs(state, spec, params, lattice, consistency_tol=1e-10):
    """NonlinearRHS from a consistent (PhysicalState, SpectralState) pair.

    Raises ConsistencyError when ``spec`` is not the transform of ``state``
    within ``consistency_tol`` (relative to the largest coefficient).
    """
    fields = state.as_array()
    reference = to_spectral(fields, lattice)
    scale = float(np.max(np.abs(reference)))
    if scale > 0:
        drift = float(np.max(np.abs(reference - spec.coeffs)))
        if drift > consistency_tol * scale:
            raise ConsistencyError(
                f"spectral state deviates from transform of physical state "
                f"by {drift:.3e} (scale {scale:.3e})"
            )
    out = rhs_spectral(spec.coeffs, lattice, params, physical=fields)
    phys = to_physical(out, lattice)
    return NonlinearRHS(n_rho=phys[0], n_u=phys[1:])


def n4_magnitude(coeffs, lattice, params):
    """max over the grid of |H_alpha(rho) (mu Lap(u) + (mu+lambda) grad div u)|.

    Exactly zero when alpha = 1 (the viscous nonlinearity degenerates).
    Accepts full- or half-spectrum coefficients.
    """
    from .spectral import is_half

    coeffs = np.asarray(coeffs)
    if is_half(coeffs, lattice):
        inverse = to_physical_half
        mults = [derivative_multiplier_half(lattice, axis, 1) for axis in range(3)]
        k_sq = k_squared_half(lattice)
    else:
        inverse = to_physical
        mults = [derivative_multiplier(lattice, axis, 1) for axis in range(3)]
        k_sq = lattice.k_squared()
    V = inverse(coeffs, lattice)
    coeff_ha = h_alpha(V[0], params.alpha)
    if not np.any(coeff_ha):
        return 0.0
    div_u_hat = mults[0] * coeffs[1] + mults[1] * coeffs[2] + mults[2] * coeffs[3]
    total = np.zeros(lattice.shape)
    for i in range(3):
        visc_hat = -params.mu * k_sq * coeffs[1 + i] + (
            params.mu + params.lambda_bulk
        ) * mults[i] * div_u_hat
        total += (coeff_ha * inverse(visc_hat, lattice)) ** 2
    return float(np.sqrt(np.max(total)))


def h_alpha_smallness_check(rho, alpha):
    """sup|H_alpha(rho)| / (|alpha-1| * sup|rho|); vacuous at alpha = 1.

    Valid for sup|rho| <= 1/2; dense scalar sampling over
    (rho, alpha) in [-0.5, 0.5] x [0.5, 1.5] bounds the ratio by 2.
    """
    if alpha == 1.0:
        raise DegenerateInputError("H_alpha vanishes identically at alpha = 1")
    rho = np.asarray(rho, dtype=float)
    sup_rho = float(np.max(np.abs(rho)))
    if sup_rho > 0.5:
        raise ConfigurationError(f"check requires sup|rho| <= 1/2, got {sup_rho}")
    if sup_rho == 0.0:
        return 0.0
    sup_h = float(np.max(np.abs(h_alpha(rho, alpha))))
    return sup_h / (abs(alpha - 1.0) * sup_rho)


def _tensor_derivative_sup(coeffs, lattice, k):
    """sup norm of the order-k gradient tensor (all 3**k components)."""
    import itertools

    total = np.zeros(lattice.shape)
    for axes in itertools.product(range(3), repeat=k):
        d = coeffs
        for a in axes:
            d = derivative_multiplier(lattice, a, 1) * d
        total += to_physical(d, lattice) ** 2
    return float(np.sqrt(np.max(total)))


def composition_bound_check(rho, f, k, p, lattice):
    """Ratio |grad^k f(rho)|_p / |grad^k rho|_p for a pointwise function f.

    f(rho) is evaluated on the grid, transformed, and differentiated
    spectrally.  p = 2 uses the radial-multiplier seminorm; p = inf the full
    order-k gradient tensor.  Zero numerator and denominator give ratio 0;
    zero denominator with nonzero numerator is degenerate.
    """
    rho = np.asarray(rho, dtype=float)
    if float(np.max(np.abs(rho))) > 1.0:
        raise ConfigurationError("composition bound requires sup|rho| <= 1")
    if not 1 <= k <= 4:
        raise ConfigurationError(f"k must be 1..4, got {k}")
    if p not in (2.0, np.inf, 2):
        raise ConfigurationError(f"p must be 2 or inf, got {p}")
    f_hat = to_spectral(f(rho), lattice)
    f_hat[0, 0, 0] = 0.0  # seminorm ignores the mean anyway; sup should too
    rho_hat = to_spectral(rho, lattice)
    rho_hat[0, 0, 0] = 0.0
    if p == np.inf:
        num = _tensor_derivative_sup(f_hat, lattice, k)
        den = _tensor_derivative_sup(rho_hat, lattice, k)
    else:
        num = sobolev_seminorm(f_hat, lattice, k)
        den = sobolev_seminorm(rho_hat, lattice, k)
    if den == 0.0:
        if num <= 1e-14 * max(1.0, lp_norm(rho, 2.0, lattice)):
            return 0.0
        raise DegenerateInputError("grad^k rho vanishes but grad^k f(rho) does not")
    return num / den
