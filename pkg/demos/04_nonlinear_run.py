#!/usr/bin/env python3
# A small nonlinear run end to end: exponential time stepping, a priori
# monitors, mass conservation, the energy identity, and decay fits.
#
# The solver advances V_t + L V = N(V) with the linear part treated exactly
# per mode and the nonlinearity weighted by the phi1/phi2 exponential-
# integrator functions (ETDRK2).  Along the way it records norm bundles,
# checks the decaying sup-norm thresholds, and accumulates the terms of the
# basic energy identity
#
#   d/dt 1/2 int(rho^2 + |u|^2) + mu int |grad u|^2 + (mu+lam) int (div u)^2
#     = sum of six nonlinear work integrals,
#
# whose residual shrinks at second order in dt.

import numpy as np

from greenprop import ViscosityParams, build_lattice
from greenprop.diagnostics import build_decay_report
from greenprop.initial_data import gaussian_bump
from greenprop.kernels import box_fit_window
from greenprop.stepping import SchemeConfig, energy_residual, run_simulation

params = ViscosityParams(mu=1.0, lambda_bulk=0.0, alpha=1.05, gamma=1.4)
lattice = build_lattice(32, 16.0 * np.pi)
initial = gaussian_bump(lattice, amplitude=1e-2)  # width defaults to L/16

config = SchemeConfig(scheme="etdrk2", dt=0.1, t_end=20.0, cadence=5, eta=0.1)
record = run_simulation(initial, config, params, lattice)
print(f"termination: {record.termination} after t = {record.times[-1]:g}")
drift = abs(record.series("mean_rho")[-1] - record.series("mean_rho")[0])
print(f"mean density drift over the run: {drift:.2e}  (conserved exactly by construction)")
print(f"a priori monitors: {'OK at every sample' if record.monitors_ok else 'violated'}")

ts, residual = energy_residual(record)
print(f"energy-identity residual: max |R| = {np.max(np.abs(residual)):.3e} at dt = {config.dt}")

window = box_fit_window(lattice.length, params, t_end=record.times[-1])
report = build_decay_report(
    record.times, record.norms, window=window, tolerance=0.25, one_sided=True
)
print(f"\ndecay fits over the torus-capped window {window}:")
for row in report.rows:
    f = row.fit
    print(
        f"  {row.quantity:12s} fitted {f.fitted_rate:6.3f}  theory {f.theory_rate:5.3f}"
        f"  r2 {f.r_squared:.3f}  {'pass' if f.passed else 'fail'}"
    )
print("\n(Small box + short window: the gradient rows sit above their whole-space")
print("rates because the torus cuts off the slowest scales; the report's r2 gate")
print("marks rows whose series are not clean power laws.)")
