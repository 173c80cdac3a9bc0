"""Physical parameters of the perturbation system.

The background state is the constant density 1 with pressure law
P(rho) = rho**gamma / gamma, so the linearized sound speed is 1.  Shear and
second viscosity scale with density as mu*rho**alpha and lambda*rho**alpha;
at the background both reduce to the constants stored here.
"""

from dataclasses import dataclass, field

from .errors import ConfigurationError


@dataclass(frozen=True)
class ViscosityParams:
    """Viscosity and pressure-law constants, plus the derived damping rate.

    Attributes:
        mu: shear viscosity, > 0.
        lambda_bulk: second viscosity; 2*mu + 3*lambda_bulk >= 0.
        alpha: exponent of the density dependence of both viscosities, > 0.
        gamma: adiabatic exponent, > 1.
        nu: derived acoustic damping coefficient 2*mu + lambda_bulk
            (always recomputed, never passed in).
    """

    mu: float
    lambda_bulk: float
    alpha: float
    gamma: float
    nu: float = field(init=False)

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigurationError(f"mu must be positive, got {self.mu}")
        if 2.0 * self.mu + 3.0 * self.lambda_bulk < 0:
            raise ConfigurationError(
                f"2*mu + 3*lambda_bulk must be >= 0, got "
                f"{2.0 * self.mu + 3.0 * self.lambda_bulk}"
            )
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not self.gamma > 1:
            raise ConfigurationError(f"gamma must exceed 1, got {self.gamma}")
        object.__setattr__(self, "nu", 2.0 * self.mu + self.lambda_bulk)


DEFAULT_PARAMS = ViscosityParams(mu=1.0, lambda_bulk=0.0, alpha=1.0, gamma=1.4)
