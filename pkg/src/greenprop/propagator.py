"""Exact Fourier symbol of the linear propagator and its frequency parts.

Per wave vector xi the linear system couples the density mode to the
longitudinal velocity mode through a damped oscillator with eigenvalues

    lam_pm(r) = (-nu*r**2 +- sqrt(nu**2*r**4 - 4*r**2)) / 2,   r = |xi|,

(principal square root, nu = 2*mu + lambda_bulk), while the two transverse
velocity modes decay by the scalar heat factor exp(-mu*r**2*t).  The two
eigenvalues collide at r = 2/nu, so every coefficient is evaluated in the
confluent-stable form based on

    lam_bar = (lam_plus + lam_minus)/2,   delta = (lam_plus - lam_minus)/2,

with a power-series branch of sinh(z)/z and cosh(z) when |delta*t| is small.
All coefficient functions accept scalars or numpy arrays of |xi|.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError

# |delta*t| below this evaluates sinhc/cosh by truncated power series.
SERIES_CUTOFF = 1e-3
# |delta| <= ratio * |lam_bar| counts as confluent for the singular part;
# keeps the split coefficient -lam_minus/(lam_plus - lam_minus) bounded by
# ~1/(2*ratio) while the affected radial band has width O(ratio**2).
SINGULAR_CLIP_RATIO = 0.05

PARTS = ("full", "low", "high_regular", "high_singular")


@dataclass(frozen=True)
class EigenPair:
    """Acoustic eigenvalue pair with its mean and half-gap."""

    lam_plus: np.ndarray
    lam_minus: np.ndarray
    lam_bar: np.ndarray
    delta: np.ndarray


def eigenvalues(xi_mag, params):
    """Roots of lam**2 + nu*r**2*lam + r**2 = 0 at r = |xi| (array-capable).

    Complex-conjugate pair for r < 2/nu, real with lam_minus <= lam_plus < 0
    for r > 2/nu, double root -2/nu at the confluent radius.
    """
    r2 = np.asarray(xi_mag, dtype=float) ** 2
    lam_bar = -0.5 * params.nu * r2
    delta = 0.5 * np.sqrt((params.nu**2 * r2 - 4.0) * r2 + 0j)
    return EigenPair(
        lam_plus=lam_bar + delta,
        lam_minus=lam_bar - delta,
        lam_bar=lam_bar + 0j,
        delta=delta,
    )


def sinhc(z):
    """sinh(z)/z with a series branch near 0; sinhc(0) = 1."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_CUTOFF
    zs = np.where(small, z, 1.0)
    series = 1.0 + zs**2 / 6.0 + zs**4 / 120.0
    zb = np.where(small, 1.0, z)
    return np.where(small, series, np.sinh(zb) / zb)


def stable_entries(t, xi_mag, params):
    """The three scalar symbol coefficients (m, g_minus, g_plus).

    m       = (e^{l+t} - e^{l-t}) / (l+ - l-)  = e^{lbar t} t sinhc(dt)
    g_minus = (l+ e^{l-t} - l- e^{l+t}) / (l+ - l-)
    g_plus  = (l+ e^{l+t} - l- e^{l-t}) / (l+ - l-)

    Evaluated through lam_bar/delta so the confluent point is regular; away
    from confluence the exponential-difference form is used directly, which
    also avoids the cosh overflow at large real delta*t.
    """
    eig = eigenvalues(xi_mag, params)
    t = float(t)
    z = eig.delta * t
    small = np.abs(z) < SERIES_CUTOFF

    zs = np.where(small, z, 0.0)
    shc = 1.0 + zs**2 / 6.0 + zs**4 / 120.0
    ch = 1.0 + zs**2 / 2.0 + zs**4 / 24.0
    base = np.exp(eig.lam_bar * t)
    m_series = base * t * shc
    gm_series = base * (ch - eig.lam_bar * t * shc)
    gp_series = base * (ch + eig.lam_bar * t * shc)

    # Generic branch: both exponents have nonpositive real part, never overflows.
    denom = np.where(small, 1.0, 2.0 * eig.delta)
    e_plus = np.exp(eig.lam_plus * t)
    e_minus = np.exp(eig.lam_minus * t)
    m_gen = (e_plus - e_minus) / denom
    gm_gen = (eig.lam_plus * e_minus - eig.lam_minus * e_plus) / denom
    gp_gen = (eig.lam_plus * e_plus - eig.lam_minus * e_minus) / denom

    m = np.where(small, m_series, m_gen)
    g_minus = np.where(small, gm_series, gm_gen)
    g_plus = np.where(small, gp_series, gp_gen)
    return m, g_minus, g_plus


def transverse_factor(t, xi_mag, params):
    """Heat factor exp(-mu*r**2*t) acting on the transverse velocity modes."""
    r2 = np.asarray(xi_mag, dtype=float) ** 2
    return np.exp(-params.mu * r2 * float(t)) + 0j


def smooth_cutoff(xi_mag):
    """Smooth low-frequency cutoff: 1 for r <= 1/2, 0 for r > 1.

    On the transition annulus uses the standard bump partition
    f(1-r) / (f(1-r) + f(r-1/2)) with f(s) = exp(-1/s) for s > 0.
    Monotone non-increasing; equals 1/2 at r = 3/4.
    """

    def bump(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    r = np.asarray(xi_mag, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    chi = np.zeros_like(r)
    chi[r <= 0.5] = 1.0
    band = (r > 0.5) & (r <= 1.0)
    if np.any(band):
        up = bump(1.0 - r[band])
        down = bump(r[band] - 0.5)
        chi[band] = up / (up + down)
    return float(chi[0]) if scalar else chi


def high_singular_coeff(t, xi_mag, params):
    """Symbol of the singular part: (1-chi(r)) * (-lam_-/(lam_+-lam_-)) * e^{lam_+ t}.

    Zero within the confluence band |delta| <= SINGULAR_CLIP_RATIO*|lam_bar|
    where the split coefficient degenerates; the regular part absorbs the
    difference there, so the three-part sum is unaffected.
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    r = np.asarray(xi_mag, dtype=float)
    eig = eigenvalues(r, params)
    one_minus_chi = 1.0 - smooth_cutoff(r)
    confluent = np.abs(eig.delta) <= SINGULAR_CLIP_RATIO * np.abs(eig.lam_bar)
    usable = (~confluent) & (one_minus_chi > 0.0)
    denom = np.where(usable, eig.lam_plus - eig.lam_minus, 1.0)
    coeff = np.where(usable, -eig.lam_minus / denom * np.exp(eig.lam_plus * t), 0.0)
    return one_minus_chi * coeff


def _assemble_full(m, g_minus, g_plus, h, xi_components, r_squared):
    """4x4 symbol entries from the scalar coefficients; broadcasts over modes.

    At r = 0 the projector term is dropped, which yields the identity matrix
    (the continuous limit) without forming xi/|xi|.
    """
    x1, x2, x3 = (np.asarray(c, dtype=float) for c in xi_components)
    r2 = np.asarray(r_squared, dtype=float)
    shape = np.broadcast_shapes(
        np.shape(m), np.shape(h), x1.shape, x2.shape, x3.shape, r2.shape
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_r2 = np.where(r2 > 0.0, 1.0 / np.where(r2 > 0.0, r2, 1.0), 0.0)
    G = np.zeros((4, 4) + shape, dtype=complex)
    G[0, 0] = g_minus
    xi = (x1, x2, x3)
    for i in range(3):
        coupling = -1j * m * xi[i]
        G[0, 1 + i] = coupling
        G[1 + i, 0] = coupling
        for j in range(3):
            proj = (g_plus - h) * xi[i] * xi[j] * inv_r2
            G[1 + i, 1 + j] = proj + h if i == j else proj
    return G


def _coefficients(t, xi_mag, params):
    m, g_minus, g_plus = stable_entries(t, xi_mag, params)
    h = transverse_factor(t, xi_mag, params)
    return m, g_minus, g_plus, h


def symbol(t, xi, params):
    """Full 4x4 propagator symbol at one wave vector (identity at xi = 0)."""
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    xi = np.asarray(xi, dtype=float)
    r2 = float(np.dot(xi, xi))
    m, g_minus, g_plus, h = _coefficients(t, np.sqrt(r2), params)
    return _assemble_full(m, g_minus, g_plus, h, tuple(xi), r2)


def symbol_parts(t, xi, params):
    """(low, high_regular, high_singular) matrices; they sum to the full symbol."""
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    xi = np.asarray(xi, dtype=float)
    r = float(np.linalg.norm(xi))
    full = symbol(t, xi, params)
    chi = smooth_cutoff(r)
    low = chi * full
    hs = np.zeros_like(full)
    hs[0, 0] = complex(high_singular_coeff(t, r, params))
    hr = (1.0 - chi) * full - hs
    return low, hr, hs


def linear_symbol(xi, params):
    """Symbol L(xi) of the linear operator: V_t + L V = N(V).

    L(xi) = [[0, i xi^T], [i xi, mu|xi|^2 I + (mu+lambda) xi xi^T]].
    """
    xi = np.asarray(xi, dtype=float)
    r2 = float(np.dot(xi, xi))
    L = np.zeros((4, 4), dtype=complex)
    L[0, 1:] = 1j * xi
    L[1:, 0] = 1j * xi
    L[1:, 1:] = params.mu * r2 * np.eye(3) + (
        params.mu + params.lambda_bulk
    ) * np.outer(xi, xi)
    return L


def expm_oracle(t, xi, params):
    """Independent propagator: expm(-t*L(xi)) via scaling-and-squaring.

    Makes no reference to the eigenvalue formulas; used to cross-check
    ``symbol``.
    """
    return scipy.linalg.expm(-float(t) * linear_symbol(xi, params))


def radial_matrix(t, r, params, part="full"):
    """Symbol part evaluated at xi = (r, 0, 0); vectorized over an array r.

    The Frobenius norm of the returned matrix equals that at any other
    direction with the same |xi|, which is what the radial quadrature needs.
    Returns shape (4, 4) + r.shape.
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if part not in PARTS:
        raise DomainError(f"unknown part {part!r}; expected one of {PARTS}")
    r = np.asarray(r, dtype=float)
    m, g_minus, g_plus, h = _coefficients(t, r, params)
    full = _assemble_full(
        m, g_minus, g_plus, h, (r, np.zeros_like(r), np.zeros_like(r)), r**2
    )
    if part == "full":
        return full
    chi = smooth_cutoff(r)
    if part == "low":
        return chi * full
    hs = np.zeros_like(full)
    hs[0, 0] = high_singular_coeff(t, r, params)
    if part == "high_singular":
        return hs
    return (1.0 - chi) * full - hs


def propagator_lattice(lattice, t, params, part="full"):
    """Symbol part sampled on every lattice mode: shape (4, 4, n, n, n)."""
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if part not in PARTS:
        raise DomainError(f"unknown part {part!r}; expected one of {PARTS}")
    kx, ky, kz = lattice.k_components()
    r2 = lattice.k_squared()
    r = np.sqrt(r2)
    m, g_minus, g_plus, h = _coefficients(t, r, params)
    if part == "high_singular":
        G = np.zeros((4, 4) + lattice.shape, dtype=complex)
        G[0, 0] = high_singular_coeff(t, r, params)
        return G
    full = _assemble_full(m, g_minus, g_plus, h, (kx, ky, kz), r2)
    if part == "full":
        return full
    chi = smooth_cutoff(r)
    if part == "low":
        return chi * full
    hr = (1.0 - chi) * full
    hr[0, 0] -= high_singular_coeff(t, r, params)
    return hr


def apply_propagator(coeffs, lattice, t, params, part="full"):
    """Per-mode matrix-vector product of a symbol part with a 4-component state."""
    G = propagator_lattice(lattice, t, params, part)
    return np.einsum("ab...,b...->a...", G, np.asarray(coeffs))


def operator_two_norms(matrices):
    """Largest singular value of each 4x4 matrix in a (4, 4, ...) stack."""
    arr = np.asarray(matrices)
    moved = np.moveaxis(arr, (0, 1), (-2, -1))
    return np.linalg.svd(moved, compute_uv=False)[..., 0]
