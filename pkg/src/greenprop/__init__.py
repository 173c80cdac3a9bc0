"""Spectral propagator and Duhamel solver for the linearized compressible
Navier-Stokes system with density-dependent viscosities."""

from .params import ViscosityParams, DEFAULT_PARAMS
from .spectral import (
    Lattice,
    PhysicalState,
    SpectralState,
    build_lattice,
    dealias,
    lp_norm,
    sobolev_seminorm,
    spectral_derivative,
    to_physical,
    to_spectral,
)
from .propagator import (
    EigenPair,
    apply_propagator,
    eigenvalues,
    expm_oracle,
    smooth_cutoff,
    stable_entries,
    symbol,
    symbol_parts,
)

__version__ = "0.1.0"


def __getattr__(name):
    # Heavier layers are imported lazily so `import greenprop` stays light.
    if name in ("SchemeConfig", "Stepper", "run_simulation", "energy_residual"):
        from . import stepping

        return getattr(stepping, name)
    if name in ("NormSeries", "DecayFit", "fit_decay", "symbol_norm_radial"):
        from . import kernels

        return getattr(kernels, name)
    raise AttributeError(f"module 'greenprop' has no attribute {name!r}")

__all__ = [
    "ViscosityParams",
    "DEFAULT_PARAMS",
    "Lattice",
    "PhysicalState",
    "SpectralState",
    "build_lattice",
    "dealias",
    "lp_norm",
    "sobolev_seminorm",
    "spectral_derivative",
    "to_physical",
    "to_spectral",
    "EigenPair",
    "apply_propagator",
    "eigenvalues",
    "expm_oracle",
    "smooth_cutoff",
    "stable_entries",
    "symbol",
    "symbol_parts",
    "__version__",
]
