"""Norms of the propagator kernel parts and decay-exponent fitting.

Two independent pipelines measure the same quantities:

* the radial pipeline integrates the symbol over |xi| on the whole space
  (L2 kernel norms by Plancherel, sup-norm upper bounds by the symbol L1
  integral), with no domain truncation;
* the box pipeline inverse-transforms the sampled symbol on a periodic
  lattice and takes grid norms, guarded by an explicit truncation-quality
  flag (fraction of symbol L1 mass resolved inside the Nyquist ball).

Their agreement at p = 2 is a cross-validation of both.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
import scipy.integrate

from .errors import ConfigurationError, DomainError, QuadratureError
from .propagator import PARTS, radial_matrix
from .spectral import fft_workers

# Radial quadrature never integrates beyond this; several symbol parts have
# slowly decaying entries (~1/|xi|) whose kernel norms exist only with an
# explicit frequency cap.
RADIAL_CAP = 400.0
TRUNCATION_THRESHOLD = 1e-16
RADIAL_FIT_WINDOW = (5.0, 500.0)

NORM_MODES = ("L2_kernel", "L1_symbol")


def box_fit_window(box_length, params, t_end=80.0):
    """Default box-pipeline fit window [5, min(t_end, torus cap)].

    On a torus algebraic decay crosses over to exponential once the slowest
    mode's damping exp(-nu*k_min^2*t/2) dominates; the cap
    0.3*(L/2pi)^2*(2/nu) keeps fits inside the algebraic regime.
    """
    cap = 0.3 * (box_length / (2.0 * np.pi)) ** 2 * 2.0 / params.nu
    return (5.0, min(t_end, cap))


def frobenius_radial(t, r, params, part):
    """Frobenius norm of the requested symbol part at radius r (vectorized)."""
    M = radial_matrix(t, r, params, part)
    return np.sqrt(np.sum(np.abs(M) ** 2, axis=(0, 1)))


def _truncation_radius(values, radii, peak):
    """First scan radius past the peak after which the integrand stays tiny."""
    threshold = TRUNCATION_THRESHOLD * peak
    peak_idx = int(np.argmax(values))
    below = values < threshold
    for i in range(peak_idx + 1, len(radii)):
        if below[i:].all():
            return radii[i]
    return radii[-1]


def _integrate_radial(integrand_vec, params, rtol):
    """Adaptive quadrature of a radial integrand over (0, inf) with truncation.

    The integrand must accept numpy arrays.  Breakpoints are placed at the
    cutoff transitions (1/2, 1) and around the confluent radius 2/nu where
    the regular/singular split has a narrow clipped band.
    """
    radii = np.concatenate([[0.0], np.geomspace(1e-4, RADIAL_CAP, 800)])
    values = integrand_vec(radii)
    peak = float(np.max(values))
    if peak == 0.0:
        return 0.0
    r_top = float(_truncation_radius(values, radii, peak))
    r0 = 2.0 / params.nu
    pts = [0.5, 1.0, r0 * (1.0 - 5e-3), r0, r0 * (1.0 + 5e-3)]
    pts = sorted(p for p in pts if 0.0 < p < r_top)
    result = scipy.integrate.quad(
        lambda r: float(integrand_vec(np.asarray(r))),
        0.0,
        r_top,
        points=pts,
        limit=2000,
        epsrel=rtol,
        epsabs=0.0,
        full_output=True,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 or abserr > max(10.0 * rtol * abs(value), 1e-300):
        message = result[3] if len(result) > 3 else f"abserr {abserr:.2e} vs value {value:.2e}"
        raise QuadratureError(f"radial quadrature did not converge: {message}")
    return value


def symbol_norm_radial(t, part, k, mode, params, rtol=1e-8):
    """Whole-space kernel norm of a symbol part via radial quadrature.

    mode="L2_kernel": sqrt( int 4 pi r^2 r^{2k} |M|_F^2 dr / (2 pi)^3 ),
    the L2 norm of the |grad|^k kernel by Plancherel.
    mode="L1_symbol": int 4 pi r^2 r^k |M|_F dr / (2 pi)^3, an upper bound
    for the kernel sup-norm.
    """
    if t <= 0:
        raise DomainError(f"radial norms require t > 0, got {t}")
    if part not in PARTS:
        raise DomainError(f"unknown part {part!r}")
    if mode not in NORM_MODES:
        raise ConfigurationError(f"mode must be one of {NORM_MODES}, got {mode!r}")
    if not 0 <= k <= 2:
        raise ConfigurationError(f"derivative order k must be 0..2, got {k}")

    if mode == "L2_kernel":
        def integrand(r):
            return 4.0 * np.pi * r ** (2 + 2 * k) * frobenius_radial(t, r, params, part) ** 2

        raw = _integrate_radial(integrand, params, rtol)
        return float(np.sqrt(raw / (2.0 * np.pi) ** 3))

    def integrand(r):
        return 4.0 * np.pi * r ** (2 + k) * frobenius_radial(t, r, params, part)

    return float(_integrate_radial(integrand, params, rtol) / (2.0 * np.pi) ** 3)


def symbol_sup_norm(t, part, k, params, r_cap=None):
    """sup over r of r^k * |M(t, r)|_F by dense scan with local refinement."""
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    cap = r_cap if r_cap is not None else max(50.0, 8.0 / params.nu)
    radii = np.concatenate([np.linspace(0.0, 5.0, 2001), np.geomspace(5.0, cap, 800)])
    vals = radii**k * frobenius_radial(t, radii, params, part)
    i = int(np.argmax(vals))
    lo, hi = radii[max(i - 1, 0)], radii[min(i + 1, len(radii) - 1)]
    fine = np.linspace(lo, hi, 200)
    fine_vals = fine**k * frobenius_radial(t, fine, params, part)
    return float(max(vals[i], np.max(fine_vals)))


@dataclass
class NormSeries:
    """A labeled time series of norm values."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise ConfigurationError("times and values must be 1-d and equally long")
        if not np.all(np.diff(self.times) > 0):
            raise ConfigurationError("times must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ConfigurationError("values must be finite and nonnegative")


@dataclass
class DecayFit:
    """Result of fitting value ~ (1+t)^-rate or value ~ exp(-rate*t)."""

    model: str                 # "algebraic" or "exponential"
    fitted_rate: float
    window: tuple
    r_squared: float
    theory_rate: float
    tolerance: float
    passed: bool
    one_sided: bool = False
    intercept: float = field(default=0.0, repr=False)


def fit_decay(series, model, window, theory_rate, tolerance, one_sided=False):
    """Least-squares decay-rate fit on log-transformed data.

    Algebraic model regresses log(value) on log(1+t); exponential on t.
    ``passed`` requires r^2 >= 0.98 and the rate condition
    (|fitted - theory| <= tolerance, or fitted >= theory - tolerance when
    one_sided).
    """
    if model not in ("algebraic", "exponential"):
        raise ConfigurationError(f"unknown decay model {model!r}")
    lo, hi = window
    mask = (series.times >= lo) & (series.times <= hi)
    if np.count_nonzero(mask) < 8:
        raise ConfigurationError(
            f"window [{lo}, {hi}] holds {np.count_nonzero(mask)} samples; need >= 8"
        )
    values = series.values[mask]
    if np.any(values <= 0):
        raise DomainError("decay fit requires strictly positive values in the window")
    times = series.times[mask]
    x = np.log1p(times) if model == "algebraic" else times
    y = np.log(values)
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    rate = -float(slope)
    if one_sided:
        rate_ok = rate >= theory_rate - tolerance
    else:
        rate_ok = abs(rate - theory_rate) <= tolerance
    return DecayFit(
        model=model,
        fitted_rate=rate,
        window=(float(lo), float(hi)),
        r_squared=r_squared,
        theory_rate=float(theory_rate),
        tolerance=float(tolerance),
        passed=bool(rate_ok and r_squared >= 0.98),
        one_sided=one_sided,
        intercept=float(intercept),
    )


def radial_norm_series(times, part, k, mode, params, rtol=1e-8, label=None):
    """NormSeries of symbol_norm_radial over the given times."""
    values = [symbol_norm_radial(t, part, k, mode, params, rtol=rtol) for t in times]
    if label is None:
        label = f"{part}:k={k}:{mode}"
    return NormSeries(times=np.asarray(times, float), values=np.asarray(values), label=label)


@dataclass
class BoxKernelNorms:
    """Physical kernel of a symbol part on a lattice, with its grid norms."""

    t: float
    part: str
    k: int
    norms: dict                 # p -> norm of the pointwise Frobenius magnitude
    truncation_quality: float   # fraction of symbol L1 mass inside the Nyquist ball


def kernel_on_box(t, part, lattice, params, k=0, rtol=1e-8):
    """Inverse-transform a symbol part on the lattice and take its L^p norms.

    Preconditions: the box must contain the kernel's diffusive support
    (L >= 20 sqrt(nu t)) and resolve the unit frequency (n pi / L >= 4).
    The kernel is scaled as the restriction of the whole-space inverse
    Fourier transform: K(x) = L^-3 sum_xi r^k M(t, xi) e^{i xi x}.
    """
    if t <= 0:
        raise DomainError(f"box kernels require t > 0, got {t}")
    if part not in PARTS:
        raise DomainError(f"unknown part {part!r}")
    L = lattice.length
    if L < 20.0 * np.sqrt(params.nu * t):
        raise ConfigurationError(
            f"box length {L:.3g} < 20*sqrt(nu*t) = {20.0 * np.sqrt(params.nu * t):.3g}"
        )
    nyquist = np.pi * lattice.n / L
    if nyquist < 4.0:
        raise ConfigurationError(f"n*pi/L = {nyquist:.3g} < 4: unit frequency unresolved")

    from .propagator import propagator_lattice

    r = lattice.k_magnitude()
    weight = r**k if k > 0 else 1.0
    M = propagator_lattice(lattice, t, params, part)
    mag_sq = np.zeros(lattice.shape)
    scale = weight / L**3
    for i in range(4):
        for j in range(4):
            entry = scipy.fft.ifftn(M[i, j] * scale, workers=fft_workers()) * lattice.n**3
            mag_sq += np.abs(entry) ** 2
    mag = np.sqrt(mag_sq)
    cell = lattice.cell_volume
    norms = {
        1.0: float(np.sum(mag) * cell),
        4.0 / 3.0: float((np.sum(mag ** (4.0 / 3.0)) * cell) ** 0.75),
        2.0: float(np.sqrt(np.sum(mag_sq) * cell)),
        np.inf: float(np.max(mag)),
    }

    def l1_integrand(rr):
        return 4.0 * np.pi * rr ** (2 + k) * frobenius_radial(t, rr, params, part)

    total = _integrate_radial(l1_integrand, params, rtol)
    inside = scipy.integrate.quad(
        lambda rr: float(l1_integrand(np.asarray(rr))),
        0.0,
        nyquist,
        points=[p for p in (0.5, 1.0, 2.0 / params.nu) if p < nyquist],
        limit=800,
        epsrel=rtol,
    )[0]
    quality = inside / total if total > 0 else 1.0
    return BoxKernelNorms(t=float(t), part=part, k=k, norms=norms, truncation_quality=float(quality))


def singular_operator_ratios(times, lattice, params, seed, n_fields=20):
    """L2 amplification of the singular part applied to random fields.

    Returns one NormSeries per field of |G_HS * f|_2 / |f|_2 over the times;
    every ratio is also bounded by the sup of the singular symbol on the
    lattice (checked by the caller).
    """
    from .propagator import high_singular_coeff

    rng = np.random.default_rng(seed)
    r = lattice.k_magnitude()
    out = []
    for _ in range(n_fields):
        f = rng.standard_normal(lattice.shape)
        fh = scipy.fft.fftn(f, workers=fft_workers())
        denom = np.sqrt(np.sum(np.abs(fh) ** 2))
        ratios = []
        for t in times:
            hs = high_singular_coeff(t, r, params)
            ratios.append(float(np.sqrt(np.sum(np.abs(hs * fh) ** 2)) / denom))
        out.append(NormSeries(times=np.asarray(times, float), values=np.asarray(ratios), label="hs-operator"))
    return out


def linear_radial_norms(t, rho0, a0, params, k=0, quantity="L2"):
    """Whole-space norms of the linearly evolved radial initial profile.

    The initial data is rho0(r) for the density and a longitudinal velocity
    u0(xi) = i a0(r) xi/|xi| (a gradient field), which keeps the evolution
    inside the exact radial 2x2 block:

        rho(t) = g_minus rho0 + m r a0,   a(t) = -m r rho0 + g_plus a0.

    quantity="L2" gives the L2 norm of |grad|^k V by Plancherel;
    quantity="Linf_bound" gives the symbol-L1 upper bound for the sup norm.
    """
    from .propagator import stable_entries

    if t <= 0:
        raise DomainError(f"radial norms require t > 0, got {t}")
    if quantity not in ("L2", "Linf_bound"):
        raise ConfigurationError(f"unknown quantity {quantity!r}")

    def magnitude(r):
        m, g_minus, g_plus = stable_entries(t, r, params)
        rho = g_minus * rho0(r) + m * r * a0(r)
        a = -m * r * rho0(r) + g_plus * a0(r)
        return np.sqrt(np.abs(rho) ** 2 + np.abs(a) ** 2)

    if quantity == "L2":
        def integrand(r):
            return 4.0 * np.pi * r ** (2 + 2 * k) * magnitude(r) ** 2

        raw = _integrate_radial(integrand, params, rtol=1e-8)
        return float(np.sqrt(raw / (2.0 * np.pi) ** 3))

    def integrand(r):
        return 4.0 * np.pi * r ** (2 + k) * magnitude(r)

    return float(_integrate_radial(integrand, params, rtol=1e-8) / (2.0 * np.pi) ** 3)
