"""Total energy, dissipation law, and the coercivity of the energy landscape.

The total energy

    E_total = FE + KE_l + U_gl + PV,
    FE   = (4 pi c_v/(3 R_g)) p R^3 - c_v T_inf M0 log p
           + c_v g T_inf int_{B_R} rho log rho,
    KE_l = 2 pi rho_l R^3 Rdot^2,
    U_gl = 4 pi sigma R^2,
    PV   = (4 pi/3) R^3 p_inf(t),

obeys dE/dt = -kappa T_inf int |grad T|^2/T^2 - 16 pi mu_l R Rdot^2
+ (4 pi/3) R^3 d/dt p_inf along solutions, with grad T/T = -grad rho/rho
because the gas pressure is spatially uniform.

Near an equilibrium of the same mass the energy is locally convex: with
vrho(y) = rho(R y) - rho*, the exact second variation along the
mass-preserving hypersurface is

    Q2 = A (vrho(1) - avg vrho)^2 + B int vrho^2 + 2 pi rho_l R*^3 Rdot^2
         - D (int vrho)^2,
    A = c_v T_inf R*^3 |B1| / (2 rho*),     B = c_v g T_inf R*^3 / (2 rho*),
    D = sigma R*^2/(4 pi rho*^2) + c_v T_inf R*^3/(2 rho* |B1|),

and E_total - E_* = Q2 + O(cubic).  Applying Cauchy-Schwarz to the -D term
yields the displayed lower bound with int vrho^2 coefficient
(R*^3/rho*^2)(p_inf_star/2 + 2 sigma/(3 R*)); that bound is positive for
sigma > -(3/4) p_inf_star R* but is not tight for nonuniform vrho, so the
gap-to-quadratic-form ratio test uses Q2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import RadialGrid
from .errors import MassNotPreserved, NonPhysicalState
from .model import ModelParams

__all__ = [
    "EnergyBreakdown",
    "total_energy",
    "total_energy_fd",
    "total_energy_w",
    "dissipation_rate",
    "dissipation_rate_fd",
    "dissipation_rate_w",
    "CoercivityProbe",
    "coercivity_probe",
    "random_mass_preserving_perturbation",
]

_B1 = 4.0 * np.pi / 3.0


@dataclass(frozen=True)
class EnergyBreakdown:
    FE: float
    KE_l: float
    U_gl: float
    PV: float

    @property
    def total(self) -> float:
        return self.FE + self.KE_l + self.U_gl + self.PV


def _energy_from_profile(params: ModelParams, rho_vals, weights, mass, R, Rdot,
                         rho_boundary, p_inf) -> EnergyBreakdown:
    """Assemble the four components from fixed-domain quadrature data.

    rho_vals/weights approximate int_{B1} f(rho_bar) dx; all volume
    integrals scale with R^3.
    """
    if np.min(rho_vals) <= 0.0 or R <= 0.0:
        raise NonPhysicalState("energy of a nonphysical state")
    p_g = params.RT * rho_boundary
    int_rho_log = float(weights @ (rho_vals * np.log(rho_vals)))
    FE = 4.0 * np.pi * params.c_v / (3.0 * params.R_g) * p_g * R**3 \
        - params.c_v * params.T_inf * mass * np.log(p_g) \
        + params.c_v * params.gamma * params.T_inf * R**3 * int_rho_log
    KE = 2.0 * np.pi * params.rho_l * R**3 * Rdot**2
    U = 4.0 * np.pi * params.sigma * R**2
    PV = _B1 * R**3 * p_inf
    return EnergyBreakdown(FE=float(FE), KE_l=float(KE), U_gl=float(U), PV=float(PV))


def total_energy_fd(params: ModelParams, g, p_inf: float) -> EnergyBreakdown:
    """Energy of a GridState (Simpson weights on the uniform fixed grid)."""
    from scipy.integrate import simpson

    y = np.linspace(0.0, 1.0, g.N + 1)
    # Simpson as a weight vector: integrate each basis delta; cheaper to
    # integrate the two needed integrands directly
    mass = 4.0 * np.pi * g.R**3 * simpson(g.rho_bar * y**2, x=y)
    rho = g.rho_bar
    if np.min(rho) <= 0.0:
        raise NonPhysicalState("energy of a nonphysical state")
    int_rho_log = 4.0 * np.pi * simpson(rho * np.log(rho) * y**2, x=y)
    p_g = params.RT * rho[-1]
    FE = 4.0 * np.pi * params.c_v / (3.0 * params.R_g) * p_g * g.R**3 \
        - params.c_v * params.T_inf * mass * np.log(p_g) \
        + params.c_v * params.gamma * params.T_inf * g.R**3 * int_rho_log
    KE = 2.0 * np.pi * params.rho_l * g.R**3 * g.R_dot**2
    U = 4.0 * np.pi * params.sigma * g.R**2
    PV = _B1 * g.R**3 * p_inf
    return EnergyBreakdown(FE=float(FE), KE_l=float(KE), U_gl=float(U), PV=float(PV))


def total_energy_w(params: ModelParams, eq, wv: np.ndarray, p_inf: float,
                   tables) -> EnergyBreakdown:
    """Energy of a w-state, reconstructed on the quadrature grid."""
    from .dynamics import mass_w

    rho_vals = eq.rho_star + wv[0] + tables.synth(wv[3:])
    R = eq.R_star + wv[1]
    mass = mass_w(params, eq, wv)
    return _energy_from_profile(params, rho_vals, tables.Wvol, mass, R, wv[2],
                                eq.rho_star + wv[0], p_inf)


def total_energy(params: ModelParams, state, p_inf: float, *, eq=None,
                 tables=None) -> EnergyBreakdown:
    """Dispatch on GridState / StateW / raw w vector."""
    from .dynamics import GridState
    from .nonlinearity import StateW

    if isinstance(state, GridState):
        return total_energy_fd(params, state, p_inf)
    wv = state.as_vector() if isinstance(state, StateW) else np.asarray(state)
    if eq is None or tables is None:
        raise ValueError("w-state energy needs eq and mode tables")
    return total_energy_w(params, eq, wv, p_inf, tables)


def dissipation_rate_fd(params: ModelParams, g, dp_inf_dt: float = 0.0) -> float:
    """RHS of the dissipation law for a GridState.

    -kappa T_inf int |grad rho|^2/rho^2 - 16 pi mu_l R Rdot^2
    + (4 pi/3) R^3 dp_inf/dt, with the gradient by centered differences.
    """
    from scipy.integrate import simpson

    y = np.linspace(0.0, 1.0, g.N + 1)
    h = 1.0 / g.N
    rho = g.rho_bar
    drho = np.empty_like(rho)
    drho[1:-1] = (rho[2:] - rho[:-2]) / (2.0 * h)
    drho[0] = 0.0
    drho[-1] = (3.0 * rho[-1] - 4.0 * rho[-2] + rho[-3]) / (2.0 * h)
    integral = 4.0 * np.pi * g.R * simpson((drho / rho) ** 2 * y**2, x=y)
    return float(-params.kappa_g * params.T_inf * integral
                 - 16.0 * np.pi * params.mu_l * g.R * g.R_dot**2
                 + _B1 * g.R**3 * dp_inf_dt)


def dissipation_rate_w(params: ModelParams, eq, wv: np.ndarray, tables,
                       dp_inf_dt: float = 0.0) -> float:
    """RHS of the dissipation law for a w-state (exact mode derivatives)."""
    rho_vals = eq.rho_star + wv[0] + tables.synth(wv[3:])
    du = tables.synth_d(wv[3:])
    R = eq.R_star + wv[1]
    integral = R * float(tables.Wvol @ ((du / rho_vals) ** 2))
    return float(-params.kappa_g * params.T_inf * integral
                 - 16.0 * np.pi * params.mu_l * R * wv[2] ** 2
                 + _B1 * R**3 * dp_inf_dt)


def dissipation_rate(params: ModelParams, state, dp_inf_dt: float = 0.0, *,
                     eq=None, tables=None) -> float:
    from .dynamics import GridState
    from .nonlinearity import StateW

    if isinstance(state, GridState):
        return dissipation_rate_fd(params, state, dp_inf_dt)
    wv = state.as_vector() if isinstance(state, StateW) else np.asarray(state)
    return dissipation_rate_w(params, eq, wv, tables, dp_inf_dt)


# --------------------------------------------------------------------------
# coercivity probe
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoercivityProbe:
    energy_gap: float        # E_total - E_*
    quadratic_form: float    # exact second variation Q2
    quadratic_bound: float   # displayed lower bound (Cauchy-Schwarz slack removed)
    theta_estimate: float    # gap / int_{B_R} (rho - rho*)^2
    cal_R: float             # radius perturbation solved from the mass constraint


def _solve_mass_preserving_radius(eq, vrho_int: float) -> float:
    """R - R* from (R*+R)^3 [(4 pi/3) rho* + int vrho] = (4 pi/3) rho* R*^3."""
    factor = 1.0 + 3.0 * vrho_int / (4.0 * np.pi * eq.rho_star)
    if factor <= 0.0:
        raise NonPhysicalState("perturbation removes more than the whole mass")
    return eq.R_star * (factor ** (-1.0 / 3.0) - 1.0)


def coercivity_probe(params: ModelParams, eq, vrho, R_dot: float,
                     grid: RadialGrid, *,
                     mass_tol: float = 1e-10) -> CoercivityProbe:
    """Energy gap vs the quadratic form for a mass-preserving perturbation.

    `vrho` is a callable for vrho(y) = rho(R y) - rho* on [0, 1]; the radius
    perturbation is solved exactly from the mass constraint, then the gap
    is evaluated from the full energy functional at p_inf = p_inf_star.
    """
    W = grid.wvol
    vrho_vals = np.asarray(vrho(grid.y), dtype=float)
    vrho_1 = float(vrho(1.0))
    vrho_int = float(W @ vrho_vals)
    cal_R = _solve_mass_preserving_radius(eq, vrho_int)
    R = eq.R_star + cal_R
    rho_vals = eq.rho_star + vrho_vals
    mass = R**3 * float(W @ rho_vals)
    mass_eq = _B1 * eq.rho_star * eq.R_star**3
    if abs(mass - mass_eq) > mass_tol * mass_eq:
        raise MassNotPreserved(f"|M - M*|/M* = {abs(mass - mass_eq) / mass_eq}")

    e_pert = _energy_from_profile(params, rho_vals, W, mass, R, R_dot,
                                  eq.rho_star + vrho_1, params.p_inf_star)
    e_star = _energy_from_profile(
        params, np.full_like(vrho_vals, eq.rho_star), W, mass_eq, eq.R_star,
        0.0, eq.rho_star, params.p_inf_star)
    gap = e_pert.total - e_star.total

    avg = vrho_int / _B1
    int_sq = float(W @ vrho_vals**2)
    A = params.c_v * params.T_inf * eq.R_star**3 * _B1 / (2.0 * eq.rho_star)
    B = params.c_v * params.gamma * params.T_inf * eq.R_star**3 / (2.0 * eq.rho_star)
    D = params.sigma * eq.R_star**2 / (4.0 * np.pi * eq.rho_star**2) \
        + params.c_v * params.T_inf * eq.R_star**3 / (2.0 * eq.rho_star * _B1)
    q2 = A * (vrho_1 - avg) ** 2 + B * int_sq \
        + 2.0 * np.pi * params.rho_l * eq.R_star**3 * R_dot**2 - D * vrho_int**2
    C_bound = eq.R_star**3 / eq.rho_star**2 \
        * (params.p_inf_star / 2.0 + 2.0 * params.sigma / (3.0 * eq.R_star))
    q_bound = A * (vrho_1 - avg) ** 2 \
        + 2.0 * np.pi * params.rho_l * eq.R_star**3 * R_dot**2 + C_bound * int_sq
    theta = gap / (R**3 * int_sq) if int_sq > 0 else np.inf
    return CoercivityProbe(energy_gap=float(gap), quadratic_form=float(q2),
                           quadratic_bound=float(q_bound), theta_estimate=float(theta),
                           cal_R=float(cal_R))


def random_mass_preserving_perturbation(rng: np.random.Generator, size: float,
                                        n_modes: int = 4):
    """Smooth random vrho callable of the given sup scale plus a random Rdot.

    Low-order cosines in y^2 (even in y, smooth at the center) with free
    boundary value; the radius adjustment happens inside the probe via the
    exact mass constraint.
    """
    coeffs = rng.standard_normal(n_modes)
    probe = np.linspace(0.0, 1.0, 257)

    def raw(y):
        y = np.asarray(y, dtype=float)
        vals = np.zeros_like(y)
        for k, a in enumerate(coeffs):
            vals = vals + a * np.cos(k * np.pi * y**2)
        return vals

    scale = float(np.max(np.abs(raw(probe)))) / size
    R_dot = size * float(rng.standard_normal())
    return (lambda y: raw(y) / scale), R_dot
