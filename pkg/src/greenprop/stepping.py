"""Duhamel-based exponential time stepping of the perturbation system.

The linear part is treated exactly by the propagator symbol, so with the
nonlinearity off a step reproduces the semigroup to rounding.  The
nonlinearity enters through the standard exponential-integrator weights

    phi1(A) = A^-1 (e^A - I),    phi2(A) = A^-2 (e^A - I - A),

evaluated per mode with A = -dt*L(xi).  Both are assembled analytically
from the same confluent-stable coefficients as the propagator (longitudinal
2x2 block) plus the scalar heat factor (transverse block), with a Taylor
branch when |dt*L| is small.
"""

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import check_apriori, sample_norms
from .errors import ConfigurationError, NumericalError, VacuumError
from .nonlinear import g_alpha, h_alpha, h_gamma, rhs_spectral_half
from .params import ViscosityParams
from .propagator import propagator_lattice, stable_entries
from .spectral import (
    VACUUM_FLOOR,
    derivative_multiplier,
    derivative_multiplier_half,
    full_to_half,
    half_width,
    is_half,
    k_squared_half,
    sobolev_seminorm_half,
    to_physical,
    to_physical_half,
)

PHI_TAYLOR_CUTOFF = 1e-2
SCHEMES = ("exponential_euler", "etdrk2")


def _phi_scalar(z, order):
    """phi_1 or phi_2 of a scalar array with a series branch near zero."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < PHI_TAYLOR_CUTOFF
    zs = np.where(small, z, 0.0)
    if order == 1:
        series = 1.0 + zs / 2.0 + zs**2 / 6.0 + zs**3 / 24.0 + zs**4 / 120.0
    else:
        series = 0.5 + zs / 6.0 + zs**2 / 24.0 + zs**3 / 120.0 + zs**4 / 720.0
    zb = np.where(small, 1.0, z)
    if order == 1:
        generic = np.expm1(zb) / zb
    else:
        generic = (np.expm1(zb) - zb) / zb**2
    return np.where(small, series, generic)


def _mat2_series(a11, a12, a21, a22, order, terms=6):
    """phi_order of a stack of 2x2 matrices by the Taylor series."""
    shape = np.broadcast_shapes(np.shape(a11), np.shape(a22))
    t11 = np.ones(shape, dtype=complex)
    t12 = np.zeros(shape, dtype=complex)
    t21 = np.zeros(shape, dtype=complex)
    t22 = np.ones(shape, dtype=complex)
    import math

    out = [t11 / math.factorial(order), t12.copy(), t21.copy(), t22 / math.factorial(order)]
    for k in range(1, terms + 1):
        t11, t12, t21, t22 = (
            t11 * a11 + t12 * a21,
            t11 * a12 + t12 * a22,
            t21 * a11 + t22 * a21,
            t21 * a12 + t22 * a22,
        )
        w = 1.0 / math.factorial(k + order)
        out[0] = out[0] + w * t11
        out[1] = out[1] + w * t12
        out[2] = out[2] + w * t21
        out[3] = out[3] + w * t22
    return out


def _phi_longitudinal(dt, r, params):
    """phi1 and phi2 of the longitudinal 2x2 block, entrywise over radii.

    In (density, longitudinal velocity) coordinates A = -dt*L_long with
    L_long = [[0, i r], [i r, nu r^2]]; away from small |A| the closed form
    uses A^-1 = -(1/(dt r^2)) [[nu r^2, -i r], [-i r, 0]] against the exact
    propagator block, which keeps it branch-consistent with the symbol.
    """
    r = np.asarray(r, dtype=float)
    nu = params.nu
    proxy = dt * (r + max(nu, params.mu) * r**2)
    small = proxy < PHI_TAYLOR_CUTOFF

    rs = np.where(small, 1.0, r)  # safe radius for the closed form
    m, gm, gp = stable_entries(dt, rs, params)
    p1_11 = (m - nu * (gm - 1.0)) / dt
    p1_12 = 1j * (nu * m * rs + (gp - 1.0) / rs) / dt
    p1_21 = 1j * (gm - 1.0) / (rs * dt)
    p1_22 = m / dt
    d11, d12, d21, d22 = p1_11 - 1.0, p1_12, p1_21, p1_22 - 1.0
    p2_11 = -(nu * d11) / dt + 1j * d21 / (dt * rs)
    p2_12 = -(nu * d12) / dt + 1j * d22 / (dt * rs)
    p2_21 = 1j * d11 / (dt * rs)
    p2_22 = 1j * d12 / (dt * rs)

    a12 = -1j * dt * r
    a22 = -dt * nu * r**2
    zero = np.zeros_like(a12)
    s1 = _mat2_series(zero, a12, a12, a22, order=1)
    s2 = _mat2_series(zero, a12, a12, a22, order=2)

    phi1 = [np.where(small, s, g) for s, g in zip(s1, (p1_11, p1_12, p1_21, p1_22))]
    phi2 = [np.where(small, s, g) for s, g in zip(s2, (p2_11, p2_12, p2_21, p2_22))]
    return phi1, phi2


def _assemble_phi(entries, phi_t, xi_components, r, r_squared):
    """Expand a longitudinal 2x2 block + transverse scalar to the 4x4 form."""
    e11, e12, e21, e22 = entries
    shape = np.broadcast_shapes(np.shape(e11), np.shape(r))
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_r = np.where(r > 0.0, 1.0 / np.where(r > 0.0, r, 1.0), 0.0)
        inv_r2 = inv_r**2
    out = np.zeros((4, 4) + shape, dtype=complex)
    out[0, 0] = e11
    x = [np.asarray(c, dtype=float) for c in xi_components]
    for i in range(3):
        out[0, 1 + i] = e12 * x[i] * inv_r
        out[1 + i, 0] = e21 * x[i] * inv_r
        for j in range(3):
            proj = (e22 - phi_t) * x[i] * x[j] * inv_r2
            out[1 + i, 1 + j] = proj + phi_t if i == j else proj
    return out


def phi_matrices_lattice(lattice, dt, params):
    """(phi1, phi2) weights on every mode, each of shape (4, 4, n, n, n)."""
    if dt <= 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    r2 = lattice.k_squared()
    r = np.sqrt(r2)
    phi1_l, phi2_l = _phi_longitudinal(dt, r, params)
    kx, ky, kz = lattice.k_components()
    phi1_t = _phi_scalar(-dt * params.mu * r2, 1)
    phi2_t = _phi_scalar(-dt * params.mu * r2, 2)
    phi1 = _assemble_phi(phi1_l, phi1_t, (kx, ky, kz), r, r2)
    phi2 = _assemble_phi(phi2_l, phi2_t, (kx, ky, kz), r, r2)
    return phi1, phi2


def phi1_matrix(dt, xi, params):
    """phi1(-dt*L(xi)) as a single 4x4 matrix (identity at xi = 0)."""
    xi = np.asarray(xi, dtype=float)
    r2 = float(np.dot(xi, xi))
    r = np.sqrt(r2)
    phi1_l, _ = _phi_longitudinal(dt, r, params)
    phi1_t = _phi_scalar(-dt * params.mu * r2, 1)
    return _assemble_phi(phi1_l, phi1_t, tuple(xi), r, r2)


def phi2_matrix(dt, xi, params):
    """phi2(-dt*L(xi)) as a single 4x4 matrix."""
    xi = np.asarray(xi, dtype=float)
    r2 = float(np.dot(xi, xi))
    r = np.sqrt(r2)
    _, phi2_l = _phi_longitudinal(dt, r, params)
    phi2_t = _phi_scalar(-dt * params.mu * r2, 2)
    return _assemble_phi(phi2_l, phi2_t, tuple(xi), r, r2)


@dataclass(frozen=True)
class SchemeConfig:
    """Time-stepping configuration.

    dt <= 0.5 resolves the O(1) acoustic time scale at unit sound speed.
    ``cadence`` counts steps between diagnostics samples.
    """

    scheme: str = "etdrk2"
    dt: float = 0.05
    t_end: float = 10.0
    cadence: int = 1
    linear_only: bool = False
    eta: float = 0.1
    vacuum_floor: float = VACUUM_FLOOR
    monitors_terminate: bool = True
    energy_only: bool = False  # record only energy integrals (skips monitors)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if not 0.0 < self.dt <= 0.5:
            raise ConfigurationError(f"dt must lie in (0, 0.5], got {self.dt}")
        if self.t_end < self.dt:
            raise ConfigurationError("t_end must be at least one step")
        if self.cadence < 1:
            raise ConfigurationError("cadence must be a positive integer")


class Stepper:
    """Applies one exponential-integrator step on a fixed lattice.

    Precomputes the propagator and phi weights once per (lattice, dt).
    State is carried in the half-spectrum layout; step() accepts either
    layout and preserves it.
    """

    def __init__(self, lattice, params, config):
        self.lattice = lattice
        self.params = params
        self.config = config
        h = half_width(lattice.n)
        self.G = np.ascontiguousarray(
            propagator_lattice(lattice, config.dt, params)[..., :h]
        )
        if config.linear_only:
            self.phi1 = self.phi2 = None
        else:
            phi1, phi2 = phi_matrices_lattice(lattice, config.dt, params)
            self.phi1 = np.ascontiguousarray(phi1[..., :h])
            self.phi2 = np.ascontiguousarray(phi2[..., :h])

    def _mat(self, M, coeffs):
        return np.einsum("ab...,b...->a...", M, coeffs)

    def step(self, coeffs):
        if not is_half(coeffs, self.lattice):
            from .spectral import half_to_full

            out = self.step(full_to_half(coeffs, self.lattice))
            return half_to_full(out, self.lattice)
        cfg = self.config
        if cfg.linear_only:
            return self._mat(self.G, coeffs)
        n0 = rhs_spectral_half(coeffs, self.lattice, self.params, vacuum_floor=cfg.vacuum_floor)
        predictor = self._mat(self.G, coeffs) + cfg.dt * self._mat(self.phi1, n0)
        if cfg.scheme == "exponential_euler":
            return predictor
        n1 = rhs_spectral_half(
            predictor, self.lattice, self.params, vacuum_floor=cfg.vacuum_floor
        )
        return predictor + cfg.dt * self._mat(self.phi2, n1 - n0)


@dataclass
class RunRecord:
    """Diagnostics of one simulation run."""

    config: SchemeConfig
    params: ViscosityParams
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norms: dict = field(default_factory=dict)          # name -> array over times
    monitor_history: list = field(default_factory=list)
    step_l2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    termination: str = "completed"
    termination_step: int = -1
    final_coeffs: np.ndarray = None

    def series(self, name):
        return np.asarray(self.norms[name])

    @property
    def monitors_ok(self):
        return all(s.ok for s in self.monitor_history)


def energy_integrals(coeffs, lattice, params):
    """Energy, dissipation and the six nonlinear work integrals.

    E = 1/2 int (rho^2 + |u|^2), D = mu int |grad u|^2 + (mu+lam) int (div u)^2,
    I1 = -int rho^2 div u            I2 = -int (u.grad rho) rho
    I3 = -int (u.grad u).u           I4 = -int H_gamma grad(rho).u
    I5 = +int G_alpha (2 mu grad(rho).Du + lam div u grad(rho)).u
    I6 = +int H_alpha (mu Lap u + (mu+lam) grad div u).u
    so that dE/dt + D = sum_i I_i along exact solutions.
    """
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
    rho, u = V[0], V[1:]
    cell = lattice.cell_volume
    grad_rho = np.array([inverse(mults[a] * coeffs[0], lattice) for a in range(3)])
    grad_u = np.array(
        [[inverse(mults[a] * coeffs[1 + i], lattice) for i in range(3)] for a in range(3)]
    )
    div_u = grad_u[0, 0] + grad_u[1, 1] + grad_u[2, 2]
    div_u_hat = mults[0] * coeffs[1] + mults[1] * coeffs[2] + mults[2] * coeffs[3]
    visc = np.array(
        [
            inverse(
                -params.mu * k_sq * coeffs[1 + i]
                + (params.mu + params.lambda_bulk) * mults[i] * div_u_hat,
                lattice,
            )
            for i in range(3)
        ]
    )

    def integral(f):
        return float(np.sum(f) * cell)

    energy = 0.5 * integral(rho**2 + np.sum(u**2, axis=0))
    dissipation = params.mu * integral(np.sum(grad_u**2, axis=(0, 1))) + (
        params.mu + params.lambda_bulk
    ) * integral(div_u**2)

    u_grad_rho = np.einsum("a...,a...->...", u, grad_rho)
    i1 = -integral(rho**2 * div_u)
    i2 = -integral(u_grad_rho * rho)
    advect = np.einsum("a...,ai...->i...", u, grad_u)
    i3 = -integral(np.einsum("i...,i...->...", advect, u))
    coeff_hg = h_gamma(rho, params.gamma)
    i4 = -integral(coeff_hg * np.einsum("i...,i...->...", grad_rho, u))
    du = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
    grad_rho_du = np.einsum("a...,ai...->i...", grad_rho, du)
    coeff_ga = g_alpha(rho, params.alpha)
    i5 = integral(
        coeff_ga
        * np.einsum(
            "i...,i...->...",
            2.0 * params.mu * grad_rho_du + params.lambda_bulk * div_u * grad_rho,
            u,
        )
    )
    coeff_ha = h_alpha(rho, params.alpha)
    i6 = integral(coeff_ha * np.einsum("i...,i...->...", visc, u))
    return {
        "energy": energy,
        "dissipation": dissipation,
        "i1": i1,
        "i2": i2,
        "i3": i3,
        "i4": i4,
        "i5": i5,
        "i6": i6,
    }


def run_simulation(initial, config, params, lattice):
    """Advance a PhysicalState to t_end, recording diagnostics at cadence.

    Terminates early with a labeled reason on vacuum, threshold violation
    (when config.monitors_terminate) or non-finite values.  The zero mode of
    the density is conserved exactly by construction (divergence-form
    nonlinearity and identity propagator at xi = 0).
    """
    from .spectral import to_spectral_half

    initial.check_vacuum(config.vacuum_floor)
    coeffs = to_spectral_half(initial.as_array(), lattice)
    stepper = Stepper(lattice, params, config)
    n_steps = int(round(config.t_end / config.dt))

    record = RunRecord(config=config, params=params)
    times = []
    norms = {}
    step_l2 = [sobolev_seminorm_half(coeffs, lattice, 0)]

    def sample(t):
        from .nonlinear import n4_magnitude

        bundle = {} if config.energy_only else sample_norms(coeffs, lattice, t)
        bundle.update(energy_integrals(coeffs, lattice, params))
        bundle["mean_rho"] = float(coeffs[0, 0, 0, 0].real)
        if not config.energy_only:
            bundle["n4_max"] = (
                0.0 if config.linear_only else n4_magnitude(coeffs, lattice, params)
            )
        times.append(t)
        for key, value in bundle.items():
            if key == "t":
                continue
            norms.setdefault(key, []).append(value)
        if config.energy_only:
            from .diagnostics import MonitorStatus

            status = MonitorStatus(t=t, ok=True)
        else:
            status = check_apriori(bundle, config.eta, t)
        record.monitor_history.append(status)
        return status

    status = sample(0.0)
    if not status.ok and config.monitors_terminate:
        record.termination = "threshold_violation"
        record.termination_step = 0
    else:
        for step in range(1, n_steps + 1):
            try:
                coeffs = stepper.step(coeffs)
            except VacuumError:
                record.termination = "vacuum_abort"
                record.termination_step = step
                break
            if not np.all(np.isfinite(coeffs)):
                record.termination = "numerical_error"
                record.termination_step = step
                break
            step_l2.append(sobolev_seminorm_half(coeffs, lattice, 0))
            if step % config.cadence == 0 or step == n_steps:
                try:
                    status = sample(step * config.dt)
                except NumericalError:
                    record.termination = "numerical_error"
                    record.termination_step = step
                    break
                if not status.ok and config.monitors_terminate:
                    record.termination = "threshold_violation"
                    record.termination_step = step
                    break

    record.times = np.asarray(times)
    record.norms = {k: np.asarray(v) for k, v in norms.items()}
    record.step_l2 = np.asarray(step_l2)
    record.final_coeffs = coeffs
    return record


def energy_residual(record):
    """Residual of the basic energy identity at interior diagnostics samples.

    R = d/dt E (centered differences of recorded energies) + D - sum_i I_i.
    Returns (times, residuals).
    """
    t = record.times
    if t.size < 3:
        raise ConfigurationError("need at least three samples for centered differences")
    E = record.series("energy")
    D = record.series("dissipation")
    work = sum(record.series(f"i{i}") for i in range(1, 7))
    dEdt = (E[2:] - E[:-2]) / (t[2:] - t[:-2])
    R = dEdt + D[1:-1] - work[1:-1]
    return t[1:-1], R
