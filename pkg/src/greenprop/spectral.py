"""Wavenumber lattices, FFT transforms, derivatives, dealiasing and norms.

Conventions used throughout the package:

* The domain is the periodic box [0, L)^3 sampled on an n^3 grid.
* Spectral coefficients are normalized so that the zero mode equals the grid
  mean of the field: ``coeffs = fftn(field) / n**3``.
* With this normalization Plancherel reads
  ``||f||_L2^2 = L^3 * sum |coeffs|^2``.
* States carry 4 components (density perturbation + 3 velocity components)
  in axis 0; all routines also accept single fields or other leading shapes.
"""

import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ConfigurationError, ShapeError, UnsupportedOrderError, VacuumError

VACUUM_FLOOR = 1e-6

SUPPORTED_P = (1.0, 4.0 / 3.0, 2.0, 4.0, np.inf)
MAX_DERIVATIVE_ORDER = 4


def fft_workers():
    """Worker count for FFT calls, capped by the GREENPROP_THREADS env var.

    pocketfft parallelizes over independent transform lines, so results are
    bit-identical for any worker count.
    """
    workers = min(os.cpu_count() or 1, 8)
    raw = os.environ.get("GREENPROP_THREADS")
    if raw is not None:
        try:
            workers = min(workers, max(1, int(raw)))
        except ValueError:
            pass
    return workers


@dataclass(frozen=True)
class Lattice:
    """Cubic wavenumber lattice for the box [0, L)^3.

    ``k_axis[j] = (2*pi/L) * jhat`` with integer offsets jhat in
    {-n/2, ..., n/2 - 1} stored in FFT order.  ``dealias_mask`` is False
    exactly where any |jhat| > n/3 (two-thirds rule).
    """

    n: int
    length: float
    k_axis: np.ndarray
    dealias_mask: np.ndarray

    @property
    def cell_volume(self):
        return (self.length / self.n) ** 3

    @property
    def volume(self):
        return self.length**3

    @property
    def shape(self):
        return (self.n, self.n, self.n)

    def axes(self):
        """Physical grid coordinates along one axis (same for all three)."""
        return np.arange(self.n) * (self.length / self.n)

    def grid(self):
        """Sparse meshgrid of physical coordinates (x, y, z)."""
        x = self.axes()
        return np.meshgrid(x, x, x, indexing="ij", sparse=True)

    def k_components(self):
        """Sparse meshgrid of wavenumber components (kx, ky, kz)."""
        k = self.k_axis
        return np.meshgrid(k, k, k, indexing="ij", sparse=True)

    def k_squared(self):
        kx, ky, kz = self.k_components()
        return kx**2 + ky**2 + kz**2

    def k_magnitude(self):
        return np.sqrt(self.k_squared())


def build_lattice(n, box_length):
    """Build a Lattice; n must be even and in [8, 512], box_length > 0."""
    if n % 2 != 0:
        raise ConfigurationError(f"grid size must be even, got n={n}")
    if not 8 <= n <= 512:
        raise ConfigurationError(f"grid size must satisfy 8 <= n <= 512, got n={n}")
    if not box_length > 0:
        raise ConfigurationError(f"box length must be positive, got {box_length}")
    jhat = np.fft.fftfreq(n, d=1.0 / n)  # integer offsets in FFT order
    k_axis = (2.0 * np.pi / box_length) * jhat
    keep = np.abs(jhat) <= n / 3.0
    mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    k_axis.setflags(write=False)
    mask.setflags(write=False)
    return Lattice(n=n, length=float(box_length), k_axis=k_axis, dealias_mask=mask)


def _check_grid_shape(fields, lattice):
    if fields.shape[-3:] != lattice.shape:
        raise ShapeError(
            f"field shape {fields.shape} does not end in lattice shape {lattice.shape}"
        )


def to_spectral(fields, lattice):
    """Forward transform; zero mode equals the grid mean of the field."""
    fields = np.asarray(fields)
    _check_grid_shape(fields, lattice)
    return scipy.fft.fftn(fields, axes=(-3, -2, -1), workers=fft_workers()) / lattice.n**3


def to_physical(coeffs, lattice):
    """Inverse transform back to a real physical field."""
    coeffs = np.asarray(coeffs)
    _check_grid_shape(coeffs, lattice)
    out = scipy.fft.ifftn(coeffs, axes=(-3, -2, -1), workers=fft_workers()) * lattice.n**3
    return out.real


def derivative_multiplier(lattice, axis, order):
    """(i*k_axis)**order broadcast over the grid, Nyquist zeroed for odd order.

    The jhat = -n/2 mode has no conjugate partner, so odd powers of (i*k)
    there would break Hermitian symmetry of real fields.
    """
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(f"derivative order {order} not in [0, 4]")
    if axis not in (0, 1, 2):
        raise ConfigurationError(f"axis must be 0, 1 or 2, got {axis}")
    k = lattice.k_axis.copy()
    if order % 2 == 1:
        k[lattice.n // 2] = 0.0
    mult = (1j * k) ** order
    shape = [1, 1, 1]
    shape[axis] = lattice.n
    return mult.reshape(shape)


def spectral_derivative(coeffs, lattice, axis, order=1):
    """Differentiate spectrally along one axis: multiply by (i*k_axis)**order."""
    coeffs = np.asarray(coeffs)
    _check_grid_shape(coeffs, lattice)
    if order == 0:
        return coeffs.copy()
    return coeffs * derivative_multiplier(lattice, axis, order)


def dealias(coeffs, lattice):
    """Zero all modes with any |jhat| > n/3 (two-thirds rule); idempotent."""
    coeffs = np.asarray(coeffs)
    _check_grid_shape(coeffs, lattice)
    return np.where(lattice.dealias_mask, coeffs, 0.0)


def pointwise_magnitude(fields):
    """Euclidean magnitude across all leading (component) axes."""
    fields = np.asarray(fields)
    if fields.ndim == 3:
        return np.abs(fields)
    flat = fields.reshape(-1, *fields.shape[-3:])
    return np.sqrt(np.sum(np.abs(flat) ** 2, axis=0))


def lp_norm(fields, p, lattice):
    """Discrete L^p norm via midpoint Riemann sum, p in {1, 4/3, 2, 4, inf}.

    Multi-component inputs use the pointwise Euclidean magnitude across
    components.
    """
    if not any(p == q for q in SUPPORTED_P):
        raise ConfigurationError(f"unsupported exponent p={p}; allowed: {SUPPORTED_P}")
    mag = pointwise_magnitude(fields)
    _check_grid_shape(mag, lattice)
    if not np.all(np.isfinite(mag)):
        raise ValueError("lp_norm requires finite field values")
    if p == np.inf:
        return float(np.max(mag))
    return float((np.sum(mag**p) * lattice.cell_volume) ** (1.0 / p))


def sobolev_seminorm(coeffs, lattice, k):
    """Radial-multiplier seminorm sqrt(sum |xi|^(2k) |coeffs|^2 * L^3).

    Equals the L2 norm at k = 0 and the |grad|^k equivalent norm otherwise.
    Accepts a single field or any stack of component fields.
    """
    if not 0 <= k <= MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(f"seminorm order {k} not in [0, 4]")
    coeffs = np.asarray(coeffs)
    _check_grid_shape(coeffs, lattice)
    weight = lattice.k_squared() ** k if k > 0 else 1.0
    total = np.sum(weight * np.abs(coeffs) ** 2)
    return float(np.sqrt(total * lattice.volume))


def gradient_fields(coeffs, lattice):
    """Physical-space first derivatives of every component.

    Returns an array with one extra leading axis of length 3 (the derivative
    axis), i.e. shape (3,) + coeffs.shape, in physical space.
    """
    coeffs = np.asarray(coeffs)
    _check_grid_shape(coeffs, lattice)
    grads = np.empty((3,) + coeffs.shape)
    for axis in range(3):
        grads[axis] = to_physical(spectral_derivative(coeffs, lattice, axis), lattice)
    return grads


def hermitian_symmetry_error(coeffs, lattice):
    """Max |coeff(-xi) - conj(coeff(xi))| over all modes and components."""
    coeffs = np.asarray(coeffs)
    _check_grid_shape(coeffs, lattice)
    flipped = coeffs[..., ::-1, ::-1, ::-1]
    flipped = np.roll(flipped, shift=(1, 1, 1), axis=(-3, -2, -1))
    return float(np.max(np.abs(flipped - np.conj(coeffs))))


# ---------------------------------------------------------------------------
# Half-spectrum (rfft layout) fast path.  Real fields carry a Hermitian
# spectrum, so hot loops store only the last axis' nonnegative frequencies
# (n//2 + 1 columns); real transforms are 2-3x cheaper than complex ones.
# Values on the stored modes coincide with the full-spectrum convention.
# ---------------------------------------------------------------------------


def half_width(n):
    return n // 2 + 1


def is_half(coeffs, lattice):
    return np.asarray(coeffs).shape[-1] == half_width(lattice.n)


def _check_half_shape(coeffs, lattice):
    expected = (lattice.n, lattice.n, half_width(lattice.n))
    if coeffs.shape[-3:] != expected:
        raise ShapeError(f"half-spectrum shape {coeffs.shape} does not end in {expected}")


def to_spectral_half(fields, lattice):
    """rfft forward transform with the same mean-as-zero-mode normalization."""
    fields = np.asarray(fields)
    _check_grid_shape(fields, lattice)
    return scipy.fft.rfftn(fields, axes=(-3, -2, -1), workers=fft_workers()) / lattice.n**3


def to_physical_half(coeffs, lattice):
    coeffs = np.asarray(coeffs)
    _check_half_shape(coeffs, lattice)
    return (
        scipy.fft.irfftn(coeffs, s=lattice.shape, axes=(-3, -2, -1), workers=fft_workers())
        * lattice.n**3
    )


def full_to_half(coeffs, lattice):
    return np.ascontiguousarray(np.asarray(coeffs)[..., : half_width(lattice.n)])


def half_to_full(coeffs, lattice):
    """Rebuild the full Hermitian spectrum from the rfft half layout."""
    coeffs = np.asarray(coeffs)
    _check_half_shape(coeffs, lattice)
    n = lattice.n
    h = half_width(n)
    full = np.empty(coeffs.shape[:-1] + (n,), dtype=complex)
    full[..., :h] = coeffs
    # full[i, j, k] = conj(half[-i mod n, -j mod n, n-k]) for k in [h, n-1]
    reflected = np.roll(coeffs[..., ::-1, ::-1, :], shift=(1, 1), axis=(-3, -2))
    full[..., h:] = np.conj(reflected[..., 1 : n // 2][..., ::-1])
    return full


def _half_plane_weights(lattice):
    """Multiplicity of each stored column when summing over the full lattice."""
    w = np.full(half_width(lattice.n), 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


def derivative_multiplier_half(lattice, axis, order):
    mult = derivative_multiplier(lattice, axis, order)
    if axis == 2:
        return mult[..., : half_width(lattice.n)]
    return mult


def k_squared_half(lattice):
    return lattice.k_squared()[..., : half_width(lattice.n)]


def dealias_half(coeffs, lattice):
    mask = lattice.dealias_mask[..., : half_width(lattice.n)]
    return np.where(mask, coeffs, 0.0)


def sobolev_seminorm_half(coeffs, lattice, k):
    """sobolev_seminorm evaluated on the half layout (plane-weighted sums)."""
    if not 0 <= k <= MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(f"seminorm order {k} not in [0, 4]")
    coeffs = np.asarray(coeffs)
    _check_half_shape(coeffs, lattice)
    weight = _half_plane_weights(lattice)
    radial = k_squared_half(lattice) ** k if k > 0 else 1.0
    total = np.sum(weight * radial * np.abs(coeffs) ** 2)
    return float(np.sqrt(total * lattice.volume))


def gradient_fields_half(coeffs, lattice):
    """Physical first derivatives of every component, from the half layout."""
    coeffs = np.asarray(coeffs)
    _check_half_shape(coeffs, lattice)
    grads = np.empty((3,) + coeffs.shape[:-3] + lattice.shape)
    for axis in range(3):
        grads[axis] = to_physical_half(
            derivative_multiplier_half(lattice, axis, 1) * coeffs, lattice
        )
    return grads


@dataclass
class PhysicalState:
    """Density perturbation and velocity on the grid.

    ``rho`` is the deviation from the background density 1, so the total
    density 1 + rho must stay positive pointwise.
    """

    rho: np.ndarray       # (n, n, n) real
    velocity: np.ndarray  # (3, n, n, n) real

    def as_array(self):
        """Stack into the (4, n, n, n) component layout (rho, u1, u2, u3)."""
        return np.concatenate([self.rho[None], self.velocity], axis=0)

    @classmethod
    def from_array(cls, fields):
        fields = np.asarray(fields, dtype=float)
        if fields.ndim != 4 or fields.shape[0] != 4:
            raise ShapeError(f"expected (4, n, n, n) array, got {fields.shape}")
        return cls(rho=fields[0], velocity=fields[1:])

    def check_vacuum(self, floor=VACUUM_FLOOR):
        """Raise VacuumError if min(1 + rho) <= floor or values are not finite."""
        if not np.all(np.isfinite(self.rho)) or not np.all(np.isfinite(self.velocity)):
            raise VacuumError("state contains non-finite values")
        lowest = float(np.min(1.0 + self.rho))
        if lowest <= floor:
            raise VacuumError(f"total density reached {lowest} (floor {floor})")
        return lowest


@dataclass
class SpectralState:
    """Fourier coefficients of the 4-component state (rho, u1, u2, u3)."""

    coeffs: np.ndarray  # (4, n, n, n) complex

    @classmethod
    def from_physical(cls, state, lattice):
        return cls(coeffs=to_spectral(state.as_array(), lattice))

    def to_physical_state(self, lattice):
        return PhysicalState.from_array(to_physical(self.coeffs, lattice))

    def copy(self):
        return SpectralState(coeffs=self.coeffs.copy())
