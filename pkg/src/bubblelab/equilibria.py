"""Spherically symmetric equilibria and the manifold they sweep out.

A uniform-density bubble of mass M in mechanical balance satisfies

    (4 pi / 3) rho* R*^3 = M,          R_g T_inf rho* = p_inf_star + 2 sigma / R*,

so R* is the unique positive root of the cubic

    p_inf_star R*^3 + 2 sigma R*^2 - 3 R_g T_inf M / (4 pi) = 0,

and rho*, p* follow.  The map M -> (R*, rho*) is smooth; its derivative has
the closed form dR*/dM = 3 R_g T_inf / (4 pi (3 p_inf R*^2 + 4 sigma R*)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NoPositiveRoot
from .model import ModelParams

__all__ = [
    "Equilibrium",
    "FullModelTemperatureProfile",
    "solve_equilibrium",
    "mass_of",
    "continuity_gap",
    "dRstar_dM",
    "full_model_temperature",
]


@dataclass(frozen=True)
class Equilibrium:
    """One point (M, R*, rho*, p*) on the equilibrium manifold."""

    mass: float
    R_star: float
    rho_star: float
    p_star: float


@dataclass(frozen=True)
class FullModelTemperatureProfile:
    """Two-parameter family of equilibrium temperature fields of the full model.

    T_l(r) = T_inf - a1/r for r >= R*, and
    T_g(r) = T_inf - a1/R* + a2 (1/R* - 1/r) for r < R*.
    a1 = a2 = 0 recovers the uniform profile T = T_inf.
    """

    a1: float
    a2: float
    R_star: float
    T_inf: float

    @property
    def singular_at_origin(self) -> bool:
        # a2 != 0 puts a 1/r singularity in the gas temperature at r = 0.
        return self.a2 != 0.0

    def __call__(self, r: float) -> float:
        return full_model_temperature(self.a1, self.a2, self.R_star, self.T_inf, r)


def _cubic(params: ModelParams, mass: float, R: float) -> float:
    return params.p_inf_star * R**3 + 2.0 * params.sigma * R**2 \
        - 3.0 * params.RT * mass / (4.0 * np.pi)


def solve_equilibrium(params: ModelParams, mass: float) -> Equilibrium:
    """Unique positive root of the equilibrium cubic, by bracketed Newton.

    The bracket is [eps, 2*R_hi] with R_hi the sigma=0 closed form; the
    cubic is increasing wherever it crosses zero from below, so bisection
    safeguarding cannot stall.  Residual is polished to <= 1e-12 relative.
    """
    if not (mass > 0.0):
        raise ConfigError(f"mass must be positive, got {mass!r}")
    rhs = 3.0 * params.RT * mass / (4.0 * np.pi)
    R_hi = (rhs / params.p_inf_star) ** (1.0 / 3.0)
    lo, hi = 0.0, 2.0 * R_hi
    # expand hi until the cubic is positive there (sigma<0 can push the root up)
    for _ in range(200):
        if _cubic(params, mass, hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NoPositiveRoot("equilibrium cubic has no positive root in reach")

    R = R_hi  # sigma=0 guess
    if not (lo < R < hi):
        R = 0.5 * (lo + hi)
    scale = abs(params.p_inf_star * R_hi**3) + abs(2 * params.sigma * R_hi**2) + rhs
    for _ in range(200):
        f = _cubic(params, mass, R)
        if f > 0.0:
            hi = R
        else:
            lo = R
        df = 3.0 * params.p_inf_star * R**2 + 4.0 * params.sigma * R
        step_ok = df > 0.0
        if step_ok:
            R_new = R - f / df
            step_ok = lo < R_new < hi
        if not step_ok:
            R_new = 0.5 * (lo + hi)
        if abs(f) <= 1e-15 * scale and abs(R_new - R) <= 4 * np.finfo(float).eps * R:
            R = R_new
            break
        R = R_new
    if not (R > 0.0) or abs(_cubic(params, mass, R)) > 1e-12 * scale:
        raise NoPositiveRoot(
            f"cubic root polish failed: R={R}, residual={_cubic(params, mass, R)}"
        )
    rho = (params.p_inf_star + 2.0 * params.sigma / R) / params.RT
    if not (rho > 0.0):
        raise NoPositiveRoot(f"induced equilibrium density nonpositive: {rho}")
    return Equilibrium(mass=mass, R_star=R, rho_star=rho, p_star=params.RT * rho)


def dRstar_dM(params: ModelParams, eq: Equilibrium) -> float:
    """Implicit-function derivative of R* along the manifold."""
    R = eq.R_star
    return 3.0 * params.RT / (4.0 * np.pi * (3.0 * params.p_inf_star * R**2
                                             + 4.0 * params.sigma * R))


def mass_of(R: float, rho_profile, n: int = 512) -> float:
    """Bubble mass 4 pi * int_0^R rho(r) r^2 dr by composite Simpson.

    `rho_profile` is either a callable on [0, R], a scalar (uniform
    density), or an array of samples on the uniform grid linspace(0, R, odd).
    Simpson is exact for the uniform profiles most tests use.
    """
    if not (R > 0.0):
        raise ConfigError(f"R must be positive, got {R!r}")
    if np.isscalar(rho_profile):
        return 4.0 / 3.0 * np.pi * float(rho_profile) * R**3
    if callable(rho_profile):
        m = n + 1 if n % 2 == 0 else n
        r = np.linspace(0.0, R, m)
        rho = np.asarray(rho_profile(r), dtype=float)
    else:
        rho = np.asarray(rho_profile, dtype=float)
        if rho.ndim != 1 or rho.size < 3 or rho.size % 2 == 0:
            raise ConfigError("sampled rho must be a 1-D array of odd length >= 3")
        r = np.linspace(0.0, R, rho.size)
    if np.any(rho < 0.0):
        raise ConfigError("rho_profile must be nonnegative")
    from scipy.integrate import simpson

    return 4.0 * np.pi * simpson(rho * r**2, x=r)


def continuity_gap(params: ModelParams, eq_a: Equilibrium, rho_profile, R: float,
                   n: int = 512):
    """Measure both sides of the manifold-continuity bound.

    Returns (lhs, rhs_inputs) where

        lhs        = |R*[M0] - R*[M_a]| + |rho*[M0] - rho*[M_a]|,
        rhs_inputs = |R0 - R*[M_a]| + sup |rho0 - rho*[M_a]|,

    with M0 the mass of the given state.  Callers estimate the Lipschitz
    constant empirically; no claimed constant is returned.
    """
    M0 = mass_of(R, rho_profile, n=n)
    if not (M0 > 0.0):
        raise ConfigError("state has nonpositive mass")
    eq0 = solve_equilibrium(params, M0)
    lhs = abs(eq0.R_star - eq_a.R_star) + abs(eq0.rho_star - eq_a.rho_star)
    if np.isscalar(rho_profile):
        sup = abs(float(rho_profile) - eq_a.rho_star)
    elif callable(rho_profile):
        r = np.linspace(0.0, R, n + 1)
        sup = float(np.max(np.abs(np.asarray(rho_profile(r)) - eq_a.rho_star)))
    else:
        sup = float(np.max(np.abs(np.asarray(rho_profile) - eq_a.rho_star)))
    rhs_inputs = abs(R - eq_a.R_star) + sup
    return lhs, rhs_inputs


def full_model_temperature(a1: float, a2: float, R_star: float, T_inf: float,
                           r) -> float:
    """Piecewise equilibrium temperature of the full liquid/gas model.

    Liquid side (r >= R*): T_inf - a1/r.  Gas side (r < R*):
    T_inf - a1/R* + a2 (1/R* - 1/r).  The gas branch is singular at the
    origin whenever a2 != 0 (see FullModelTemperatureProfile.singular_at_origin);
    evaluation at r=0 then returns -inf/+inf by sign rather than raising.
    """
    if not (R_star > 0.0):
        raise ConfigError("R_star must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ConfigError("r must be nonnegative")
    with np.errstate(divide="ignore"):
        inv_r = np.divide(1.0, r, out=np.full_like(r, np.inf), where=r > 0)
    gas = np.full_like(r, T_inf - a1 / R_star)
    if a2 != 0.0:
        gas = gas + a2 * (1.0 / R_star - inv_r)
    liquid = T_inf - a1 * np.where(r > 0, inv_r, 0.0)
    out = np.where(r >= R_star, liquid, gas)
    return float(out) if out.ndim == 0 else out
