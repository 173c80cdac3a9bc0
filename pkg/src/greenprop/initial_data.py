"""Initial-data generators for simulation runs.

Three kinds:

* ``gaussian_bump`` — smooth localized density bump with a gradient
  (divergence-bearing) velocity; the workhorse for decay studies.
* ``hf_packet`` — monochromatic high-frequency wave with amplitude K**-2,
  realizing small sup norms alongside arbitrarily large high-order Sobolev
  norms (ratio grad^4/L2 scales like K**4).
* ``random_band`` — seeded Hermitian-symmetric noise restricted to a
  spectral band and scaled to a target L2 norm; bit-reproducible.
"""

import numpy as np

from .errors import ConfigurationError
from .spectral import (
    PhysicalState,
    lp_norm,
    spectral_derivative,
    to_physical,
    to_spectral,
)

DEFAULT_WIDTH_FRACTION = 1.0 / 16.0


def gaussian_bump(lattice, amplitude, width=None, center=None, u_scale=1.0):
    """Density bump amplitude*exp(-|x-c|^2/width^2) with gradient velocity.

    The velocity is u = u_scale * amplitude * (width/2) * grad(bump profile),
    taken spectrally so it is an exact gradient field on the lattice.
    """
    if amplitude <= 0:
        raise ConfigurationError(f"amplitude must be positive, got {amplitude}")
    L = lattice.length
    sigma = L * DEFAULT_WIDTH_FRACTION if width is None else float(width)
    if sigma <= 0:
        raise ConfigurationError(f"width must be positive, got {sigma}")
    c = np.full(3, L / 2.0) if center is None else np.asarray(center, dtype=float)
    x, y, z = lattice.grid()
    profile = np.exp(
        -(((x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2)) / sigma**2
    ) * np.ones(lattice.shape)
    profile_hat = to_spectral(profile, lattice)
    velocity = np.empty((3,) + lattice.shape)
    for axis in range(3):
        velocity[axis] = (
            u_scale
            * amplitude
            * (sigma / 2.0)
            * to_physical(spectral_derivative(profile_hat, lattice, axis), lattice)
        )
    return PhysicalState(rho=amplitude * profile, velocity=velocity)


def gaussian_radial_profile(amplitude, sigma, u_scale=1.0):
    """Whole-space radial spectral profile matching gaussian_bump.

    Returns (rho0, a0): rho0(r) is the Fourier transform of the density
    bump; the velocity transform is i*a0(r)*xi/|xi| (longitudinal), so the
    pair feeds kernels.linear_radial_norms directly.
    """
    peak = amplitude * (np.sqrt(np.pi) * sigma) ** 3

    def rho0(r):
        return peak * np.exp(-(sigma**2) * np.asarray(r, float) ** 2 / 4.0)

    def a0(r):
        r = np.asarray(r, float)
        return u_scale * (sigma / 2.0) * r * rho0(r)

    return rho0, a0


def hf_packet(lattice, wavenumber, amplitude=None):
    """Monochromatic density wave amplitude*sin(K x1) with zero velocity.

    amplitude defaults to K**-2.  K must be a lattice wavenumber inside the
    dealiased band: K = j*(2*pi/L) with integer j <= n/3.
    """
    K = float(wavenumber)
    spacing = 2.0 * np.pi / lattice.length
    j = K / spacing
    if abs(j - round(j)) > 1e-9:
        raise ConfigurationError(
            f"wavenumber {K} is not an integer multiple of 2*pi/L = {spacing}"
        )
    if K <= 0 or round(j) > lattice.n / 3.0:
        raise ConfigurationError(
            f"wavenumber {K} outside the resolvable band (max {lattice.n / 3.0 * spacing})"
        )
    eps = K**-2 if amplitude is None else float(amplitude)
    if eps <= 0:
        raise ConfigurationError(f"amplitude must be positive, got {eps}")
    x, _, _ = lattice.grid()
    rho = eps * np.sin(K * x) * np.ones(lattice.shape)
    return PhysicalState(rho=rho, velocity=np.zeros((3,) + lattice.shape))


def random_band(lattice, seed, band, target_l2):
    """Seeded band-limited noise in all 4 components, scaled to an L2 norm.

    Coefficients are Hermitian-symmetric by construction (spectrum of a real
    white-noise field, masked to band[0] <= |xi| <= band[1]).
    """
    lo, hi = band
    if not 0 <= lo < hi:
        raise ConfigurationError(f"band must satisfy 0 <= lo < hi, got {band}")
    if target_l2 <= 0:
        raise ConfigurationError(f"target L2 norm must be positive, got {target_l2}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((4,) + lattice.shape)
    coeffs = to_spectral(noise, lattice)
    r = lattice.k_magnitude()
    mask = (r >= lo) & (r <= hi) & lattice.dealias_mask
    coeffs = np.where(mask, coeffs, 0.0)
    fields = to_physical(coeffs, lattice)
    norm = lp_norm(fields, 2.0, lattice)
    if norm == 0.0:
        raise ConfigurationError(f"band {band} contains no lattice modes")
    fields *= target_l2 / norm
    return PhysicalState.from_array(fields)
