import numpy as np
import pytest

from greenprop import ViscosityParams, build_lattice


@pytest.fixture
def params():
    """Reference parameters: nu = 2, confluent radius 1."""
    return ViscosityParams(mu=1.0, lambda_bulk=0.0, alpha=1.0, gamma=1.4)


@pytest.fixture
def lattice16():
    return build_lattice(16, 2.0 * np.pi)


@pytest.fixture
def lattice32():
    return build_lattice(32, 2.0 * np.pi)


def random_params(rng):
    """Admissible viscosity parameters drawn at random."""
    mu = rng.uniform(0.05, 3.0)
    lam = rng.uniform(-2.0 * mu / 3.0, 3.0)
    return ViscosityParams(
        mu=mu,
        lambda_bulk=lam,
        alpha=rng.uniform(0.5, 1.5),
        gamma=rng.uniform(1.1, 2.0),
    )


def random_state_coeffs(lattice, rng, amplitude=1.0, components=4):
    """Hermitian-symmetric random coefficients from a real random field."""
    from greenprop.spectral import dealias, to_spectral

    fields = rng.standard_normal((components,) + lattice.shape) * amplitude
    return dealias(to_spectral(fields, lattice), lattice)
