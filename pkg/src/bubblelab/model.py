"""Physical parameters, derived constants, and far-field pressure forcing.

The model couples a compressible ideal gas inside the bubble to an
incompressible liquid outside.  All parameters are held in one immutable
tuple; validation happens at construction and invalid values are rejected,
never clamped.

The adiabatic constant is not a free knob: the ideal-gas relations force
gamma = c_p/c_v = 1 + R_g/c_v, and the energy dissipation law holds only
under that identity.  Constructors therefore reject inconsistent
(gamma, c_v, R_g) triples; `ModelParams.from_gamma` derives R_g for you.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = [
    "ModelParams",
    "ForcingKind",
    "PressureForcing",
    "kappa_bar",
    "p_infinity",
    "p_infinity_dot",
    "canonical_params",
    "GAMMA_IDENTITY_RTOL",
]

# gamma = 1 + R_g/c_v must hold to this relative tolerance.
GAMMA_IDENTITY_RTOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Physical parameter tuple (thermal, thermodynamic, liquid, interface).

    kappa_g     thermal conductivity of the gas            (> 0)
    R_g         specific gas constant                      (> 0)
    gamma       adiabatic constant c_p/c_v                 (> 1, = 1 + R_g/c_v)
    c_v         heat capacity at constant volume           (> 0)
    sigma       surface tension; may be mildly negative, but the coercivity
                coefficient requires sigma > -(3/4) p_inf_star R* for every
                equilibrium radius in use (checked per-equilibrium elsewhere)
    mu_l        liquid dynamic viscosity                   (>= 0)
    rho_l       liquid density                             (> 0)
    T_inf       far-field liquid temperature               (> 0)
    p_inf_star  reference far-field pressure               (> 0)
    """

    kappa_g: float
    R_g: float
    gamma: float
    c_v: float
    sigma: float
    mu_l: float
    rho_l: float
    T_inf: float
    p_inf_star: float

    def __post_init__(self):
        positive = {
            "kappa_g": self.kappa_g,
            "R_g": self.R_g,
            "c_v": self.c_v,
            "rho_l": self.rho_l,
            "T_inf": self.T_inf,
            "p_inf_star": self.p_inf_star,
        }
        for name, value in positive.items():
            if not (value > 0.0) or not math.isfinite(value):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if not (self.gamma > 1.0):
            raise ConfigError(f"gamma must exceed 1, got {self.gamma!r}")
        if self.mu_l < 0.0 or not math.isfinite(self.mu_l):
            raise ConfigError(f"mu_l must be nonnegative, got {self.mu_l!r}")
        if not math.isfinite(self.sigma):
            raise ConfigError(f"sigma must be finite, got {self.sigma!r}")
        implied = 1.0 + self.R_g / self.c_v
        if abs(self.gamma - implied) > GAMMA_IDENTITY_RTOL * implied:
            raise ConfigError(
                "gamma must equal 1 + R_g/c_v (ideal gas; the energy dissipation "
                f"law fails otherwise): gamma={self.gamma}, 1+R_g/c_v={implied}"
            )

    @classmethod
    def from_gamma(cls, *, kappa_g, gamma, c_v, sigma, mu_l, rho_l, T_inf,
                   p_inf_star) -> "ModelParams":
        """Build params with R_g derived from gamma and c_v."""
        return cls(
            kappa_g=kappa_g,
            R_g=c_v * (gamma - 1.0),
            gamma=gamma,
            c_v=c_v,
            sigma=sigma,
            mu_l=mu_l,
            rho_l=rho_l,
            T_inf=T_inf,
            p_inf_star=p_inf_star,
        )

    @property
    def RT(self) -> float:
        """The lump R_g * T_inf that the reduced system actually depends on."""
        return self.R_g * self.T_inf

    def sigma_coercive_for(self, R_star: float) -> bool:
        """Coercivity coefficient positivity: sigma > -(3/4) p_inf_star R*."""
        return self.sigma > -0.75 * self.p_inf_star * R_star


class ForcingKind(enum.Enum):
    CONSTANT = "constant"
    DECAYING_PERTURBATION = "decaying"


@dataclass(frozen=True)
class PressureForcing:
    """Far-field pressure p_inf(t).

    CONSTANT:               p_inf(t) = p_inf_star.
    DECAYING_PERTURBATION:  p_inf(t) = p_inf_star + amplitude * exp(-rate*t),
    whose time derivative is absolutely integrable with
    integral_0^inf |d/dt p_inf| dt = |amplitude|.
    """

    kind: ForcingKind = ForcingKind.CONSTANT
    amplitude: float = 0.0
    rate: float = 1.0

    def __post_init__(self):
        if self.kind is ForcingKind.DECAYING_PERTURBATION:
            if not (self.rate > 0.0):
                raise ConfigError(f"decay rate must be positive, got {self.rate!r}")
            if not math.isfinite(self.amplitude):
                raise ConfigError("forcing amplitude must be finite")

    @property
    def is_constant(self) -> bool:
        return self.kind is ForcingKind.CONSTANT or self.amplitude == 0.0


def p_infinity(params: ModelParams, forcing: PressureForcing, t) -> float:
    """Far-field pressure at time t >= 0 (vectorizes over t)."""
    import numpy as np

    if forcing.is_constant:
        return params.p_inf_star + 0.0 * np.asarray(t)
    return params.p_inf_star + forcing.amplitude * np.exp(-forcing.rate * np.asarray(t))


def p_infinity_dot(params: ModelParams, forcing: PressureForcing, t) -> float:
    """d/dt of p_infinity (vectorizes over t)."""
    import numpy as np

    if forcing.is_constant:
        return 0.0 * np.asarray(t)
    return -forcing.rate * forcing.amplitude * np.exp(-forcing.rate * np.asarray(t))


def kappa_bar(params: ModelParams, eq) -> float:
    """Thermal relaxation rate kbar = kappa / (gamma c_v R*^2 rho*).

    This is the diffusion constant of the fixed-domain density equation and
    sets every mode's linear decay rate kbar * (j pi)^2.
    """
    return params.kappa_g / (params.gamma * params.c_v * eq.R_star**2 * eq.rho_star)


def canonical_params(mu_l: float = 0.0, sigma: float = 0.1) -> ModelParams:
    """The desk-scale reference parameter set.

    gamma=1.4, c_v=1, kappa=1, rho_l=1, sigma=0.1, p_inf_star=1, with the
    (R_g, T_inf) split fixed by the gas identity: R_g = 2/5, T_inf = 5/2,
    so that R_g*T_inf = 1.  At bubble mass M = 8 pi/5 this gives R* = 1,
    rho* = 1.2, kbar = 25/42.
    """
    return ModelParams(
        kappa_g=1.0,
        R_g=0.4,
        gamma=1.4,
        c_v=1.0,
        sigma=sigma,
        mu_l=mu_l,
        rho_l=1.0,
        T_inf=2.5,
        p_inf_star=1.0,
    )
