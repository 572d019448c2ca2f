"""Nonlinear terms F, G, H and the split N(w, p) = N1(w) p + N0(w).

The exact perturbation equations around an equilibrium carry three
nonlinearities: F (a radial field driving the mode equations), G (scalar,
driving the boundary-density/radius coupling), and H (scalar, the nonlinear
part of the radius ODE).  Each is affine in the rate vector
p = (zdot, Rdot, Rddot, cdot_1, ...), which is what makes the quasilinear
form (I - N1(w)) wdot = L w + N0(w) solvable per step.

N1(w) has nonzero entries only in the zdot and Rddot columns: F and G are
affine in zdot alone, H in Rddot alone.  That rank-2 structure is exploited
by the dynamics module; `n1_matrix` materializes the dense matrix on demand.

F's mode projections F_k = int F phi_k dx are computed by quadrature of the
field against the tabulated basis, except the part affine in zdot, whose
integrals int ((y/3) phi_m' + phi_m) phi_k dx are closed-form coupling
coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import (ModeTables, RadialGrid, dphi_boundary, gamma_k,
                    sum_gamma_sq_closed)
from .errors import NonPhysicalState
from .model import ModelParams

__all__ = ["StateW", "RateW", "NonlinearOps", "eval_F", "eval_G", "eval_H",
           "assemble_N"]


@dataclass(frozen=True)
class StateW:
    """Galerkin state w = (z, R - R*, Rdot, c_1..c_J)."""

    z: float
    cal_R: float
    cal_R_dot: float
    c: np.ndarray

    @property
    def J(self) -> int:
        return len(self.c)

    def as_vector(self) -> np.ndarray:
        v = np.empty(self.J + 3)
        v[0], v[1], v[2] = self.z, self.cal_R, self.cal_R_dot
        v[3:] = self.c
        return v

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "StateW":
        v = np.asarray(v, dtype=float)
        return cls(z=float(v[0]), cal_R=float(v[1]), cal_R_dot=float(v[2]),
                   c=v[3:].copy())

    def norm(self) -> float:
        return float(np.sqrt(self.z**2 + self.cal_R**2 + self.cal_R_dot**2
                             + np.sum(self.c**2)))


# the rate vector p = wdot = (zdot, Rdot, Rddot, cdot_1, ...) shares the layout
RateW = StateW


class NonlinearOps:
    """Precomputed workspace for evaluating N0, N1 on a fixed (params, eq, J).

    With tail_closure the neglected modes j > J are slaved quasi-statically,
    which replaces the inversion coefficient 3 g rho*/R* by
    1/(R*/(3 g rho*) + sum_{j>J} Gamma_j Lambda_j/(kbar lambda_j)).  That
    single change makes the truncated flow conserve the bubble mass exactly
    at linear order (the Gamma^2 tail cancels term by term) and removes the
    O(1/J) spectral truncation error.
    """

    def __init__(self, params: ModelParams, eq, J: int,
                 grid: RadialGrid | None = None, tables: ModeTables | None = None,
                 tail_closure: bool = False):
        self.params = params
        self.eq = eq
        self.J = J
        self.tables = tables if tables is not None else ModeTables(
            J, grid if grid is not None else RadialGrid.gauss(192))
        self.kappa_gcv = params.kappa_g / (params.gamma * params.c_v)
        g = params.gamma
        a00 = eq.R_star / (3.0 * g * eq.rho_star)
        if tail_closure:
            from scipy.special import polygamma

            a00 += 2.0 * (g - 1.0) * eq.R_star \
                / (g * np.pi**2 * eq.rho_star) * float(polygamma(1, J + 1))
        self.tail_closure = tail_closure
        self.coeff = 1.0 / a00
        # q (S_inf - S_J): the Gamma^2 tail that the closure reinstates
        self.q_tail = g / (g - 1.0) * (sum_gamma_sq_closed(params)
                                       - sum(gamma_k(params, k) ** 2
                                             for k in range(1, J + 1)))
        self.deltaJ0 = self.q_tail * eq.R_star / (4.0 * np.pi * eq.rho_star)
        self.Gam = np.array([gamma_k(params, k) for k in range(1, J + 1)])
        self.dphi1 = np.array([dphi_boundary(j) for j in range(1, J + 1)])
        # int ((y/3) phi_m' + phi_m) phi_k dx in closed form
        self.M_adv = self.tables.A / 3.0 + np.eye(J)
        self.y = self.tables.grid.y

    # --- field-level pieces -------------------------------------------------

    def check_admissible(self, w: np.ndarray, rho_y: np.ndarray):
        if self.eq.R_star + w[1] <= 0.0:
            raise NonPhysicalState(f"radius R*+R = {self.eq.R_star + w[1]} <= 0")
        if np.min(rho_y) <= 0.0 or self.eq.rho_star + w[0] <= 0.0:
            raise NonPhysicalState("density rho* + u + z <= 0 somewhere")

    def fields(self, w: np.ndarray):
        """(u, du, lap_u, rho_y) on the quadrature grid."""
        c = w[3:]
        u = self.tables.synth(c)
        du = self.tables.synth_d(c)
        lap_u = self.tables.synth_lap(c)
        rho_y = self.eq.rho_star + w[0] + u
        return u, du, lap_u, rho_y

    def F0_field(self, w: np.ndarray, fields=None) -> np.ndarray:
        u, du, lap_u, rho_y = fields if fields is not None else self.fields(w)
        self.check_admissible(w, rho_y)
        R = self.eq.R_star + w[1]
        inv = 1.0 / (R**2 * rho_y)
        base = 1.0 / (self.eq.R_star**2 * self.eq.rho_star)
        # the (Rdot/R) y du term is the mesh advection of the fixed-domain
        # pullback; dropping it breaks exact mass transport at O(|w|^2)
        return self.kappa_gcv * ((inv - base) * lap_u - du**2 * inv / rho_y) \
            + (w[2] / R) * self.y * du

    def F1_coeff_field(self, w: np.ndarray, fields=None) -> np.ndarray:
        """Field multiplying zdot inside F."""
        u, du, _, _ = fields if fields is not None else self.fields(w)
        return (self.y * du / 3.0 + u) / (self.params.gamma
                                          * (self.eq.rho_star + w[0]))

    def G0(self, w: np.ndarray) -> float:
        z, R = w[0], w[1]
        du1 = float(self.dphi1 @ w[3:])  # exact boundary derivative of u
        rs, rhos = self.eq.R_star, self.eq.rho_star
        bracket = 1.0 / ((rs + R) * (rhos + z) ** 2) - 1.0 / (rs * rhos**2)
        return -self.kappa_gcv * bracket * du1

    def G1_coeff(self, w: np.ndarray) -> float:
        """Coefficient of zdot in G."""
        z, R = w[0], w[1]
        g, rs, rhos = self.params.gamma, self.eq.R_star, self.eq.rho_star
        return -R / (3.0 * g * (rhos + z)) + rs * z / (3.0 * g * rhos * (rhos + z))

    def H0(self, w: np.ndarray) -> float:
        R, Rdot = w[1], w[2]
        rs = self.eq.R_star
        p = self.params
        return (-(R / (rs * (rs + R))) * (-(2.0 * p.sigma / rs) * R
                                          + 4.0 * p.mu_l * Rdot)
                + 1.5 * p.rho_l * Rdot**2) / p.RT

    def H1_coeff(self, w: np.ndarray) -> float:
        """Coefficient of Rddot in H."""
        return self.params.rho_l * w[1] / self.params.RT

    # --- assembled split ----------------------------------------------------

    def n0(self, w: np.ndarray) -> np.ndarray:
        """N0(w) in state layout."""
        fields = self.fields(w)
        F0 = self.F0_field(w, fields)
        F0_k = self.tables.project_grid(F0)
        G0 = self.G0(w)
        H0 = self.H0(w)
        out = np.zeros(self.J + 3)
        out[0] = self.coeff * G0
        out[2] = -self.params.RT / (self.params.rho_l * self.eq.R_star) * H0
        out[3:] = -self.Gam * self.coeff * G0 + F0_k
        return out

    def n1_columns(self, w: np.ndarray):
        """(zdot column, Rddot column) of N1(w); all other columns vanish."""
        fields = self.fields(w)
        self.check_admissible(w, fields[3])
        g1 = self.G1_coeff(w)
        f1_k = (self.M_adv @ w[3:]) / (self.params.gamma * (self.eq.rho_star + w[0]))
        col_z = np.zeros(self.J + 3)
        col_z[0] = self.coeff * g1
        col_z[3:] = -self.Gam * self.coeff * g1 + f1_k
        col_u = np.zeros(self.J + 3)
        col_u[2] = -w[1] / self.eq.R_star  # -(RT/(rho_l R*)) * rho_l R / RT
        return col_z, col_u

    def n1_matrix(self, w: np.ndarray) -> np.ndarray:
        col_z, col_u = self.n1_columns(w)
        N1 = np.zeros((self.J + 3, self.J + 3))
        N1[:, 0] = col_z
        N1[:, 2] = col_u
        return N1

    def n_of(self, w: np.ndarray, p: np.ndarray) -> np.ndarray:
        """N(w, p) = N1(w) p + N0(w)."""
        col_z, col_u = self.n1_columns(w)
        return self.n0(w) + col_z * p[0] + col_u * p[2]


# --- spec-level wrappers on StateW/RateW ------------------------------------

def _ops(params, eq, w: StateW, grid=None) -> NonlinearOps:
    return NonlinearOps(params, eq, w.J, grid=grid)


def eval_F(params: ModelParams, eq, w: StateW, p: RateW,
           grid: RadialGrid | None = None):
    """The field F(w, p) on the quadrature grid; returns (y, F values)."""
    ops = _ops(params, eq, w, grid)
    wv = w.as_vector()
    fields = ops.fields(wv)
    F = ops.F0_field(wv, fields) + ops.F1_coeff_field(wv, fields) * p.z
    return ops.y, F


def eval_G(params: ModelParams, eq, w: StateW, p: RateW) -> float:
    ops = _ops(params, eq, w)
    wv = w.as_vector()
    ops.check_admissible(wv, ops.fields(wv)[3])
    return ops.G0(wv) + ops.G1_coeff(wv) * p.z


def eval_H(params: ModelParams, eq, w: StateW, p: RateW) -> float:
    # in the rate layout p = (zdot, Rdot, Rddot, ...), so p.cal_R_dot is Rddot
    ops = _ops(params, eq, w)
    wv = w.as_vector()
    ops.check_admissible(wv, ops.fields(wv)[3])
    return ops.H0(wv) + ops.H1_coeff(wv) * p.cal_R_dot


def assemble_N(params: ModelParams, eq, w: StateW, p: RateW):
    """N(w, p) in state layout plus the dense N1(w).

    Returns (n_vector, n1_matrix).
    """
    ops = _ops(params, eq, w)
    wv, pv = w.as_vector(), p.as_vector()
    return ops.n_of(wv, pv), ops.n1_matrix(wv)
