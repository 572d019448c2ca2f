"""Field reconstruction, distance to the equilibrium manifold, decay fits.

reconstruct() recovers every state variable of the underlying liquid/gas
system from (rho, R, Rdot): the gas velocity from the diffusive flux and
the uniform-pressure compression rate, temperature and entropy from the
ideal-gas relations, and the liquid velocity/pressure from the potential
flow around a breathing sphere.

dist_to_manifold() evaluates a discrete surrogate of the distance to the
equilibrium family: sup|rho_bar - rho*[M]| + sup|d_y rho_bar| + |R - R*[M]|
+ |Rdot|, minimized over the bubble mass by golden-section around the
state's own mass (the asymptotic selector).

fit_decay() least-squares fits log(quantity) on the window where the
quantity lies in [1e-8, 1e-3] - below the transient, above roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import ModeTables
from .dynamics import GridState, _fd_boundary_slope
from .equilibria import solve_equilibrium
from .errors import NonPhysicalState, WindowNotFound
from .model import ModelParams, PressureForcing, p_infinity
from .nonlinearity import StateW

__all__ = ["ReconstructedFields", "reconstruct", "dist_to_manifold",
           "DecayFit", "fit_decay"]


@dataclass(frozen=True)
class ReconstructedFields:
    r_gas: np.ndarray
    v_g: np.ndarray
    T_g: np.ndarray
    s: np.ndarray
    r_liquid: np.ndarray
    v_l: np.ndarray
    p_l: np.ndarray
    p_g: float
    R: float
    R_dot: float
    R_ddot: float
    pdot_over_p: float


def _wall_data(params: ModelParams, state, eq, forcing, t, tables):
    """(R, Rdot, rho_wall, slope_wall, rho_of_y, drho_of_y) for either kind."""
    if isinstance(state, GridState):
        R, Rdot = state.R, state.R_dot
        h = 1.0 / state.N
        rho_w = float(state.rho_bar[-1])
        slope = _fd_boundary_slope(state.rho_bar, h)
        ys = np.linspace(0.0, 1.0, state.N + 1)

        def rho_y(y):
            return np.interp(y, ys, state.rho_bar)

        drho = np.gradient(state.rho_bar, h)

        def drho_y(y):
            return np.interp(y, ys, drho)

        return R, Rdot, rho_w, slope, rho_y, drho_y
    wv = state.as_vector() if isinstance(state, StateW) else np.asarray(state)
    J = len(wv) - 3
    if tables is None:
        raise ValueError("w-state reconstruction needs mode tables")
    from .basis import dphi, phi

    R = eq.R_star + wv[1]
    rho_w = eq.rho_star + wv[0]
    c = wv[3:]
    slope = float(sum(c[j - 1] * np.sqrt(np.pi / 2) * (-1.0) ** j * j
                      for j in range(1, J + 1)))

    def rho_y(y):
        out = np.full_like(np.asarray(y, dtype=float), rho_w)
        for j in range(1, J + 1):
            out = out + c[j - 1] * phi(j, y)
        return out

    def drho_y(y):
        out = np.zeros_like(np.asarray(y, dtype=float))
        for j in range(1, J + 1):
            out = out + c[j - 1] * dphi(j, y)
        return out

    return R, wv[2], rho_w, slope, rho_y, drho_y


def reconstruct(params: ModelParams, state, t: float = 0.0, *, eq=None,
                forcing: PressureForcing | None = None,
                r_gas: np.ndarray | None = None,
                r_max: float | None = None, n_liquid: int = 128,
                tables: ModeTables | None = None) -> ReconstructedFields:
    """All state variables of the liquid/gas system from (rho, R, Rdot)."""
    forcing = forcing if forcing is not None else PressureForcing()
    R, Rdot, rho_w, slope, rho_y, drho_y = _wall_data(
        params, state, eq, forcing, t, tables)
    if rho_w <= 0.0 or R <= 0.0:
        raise NonPhysicalState("reconstruction of a nonphysical state")
    gam, c_v, kap = params.gamma, params.c_v, params.kappa_g
    p_g = params.RT * rho_w
    pdot_over_p = -(3.0 * gam / R) * (Rdot + kap / (gam * c_v * R)
                                      * slope / rho_w**2)
    p_inf = float(p_infinity(params, forcing, t))
    R_ddot = (p_g - p_inf - 2.0 * params.sigma / R
              - 4.0 * params.mu_l * Rdot / R
              - 1.5 * params.rho_l * Rdot**2) / (params.rho_l * R)

    if r_gas is None:
        r_gas = np.linspace(0.0, R, 129)
    y = np.asarray(r_gas, dtype=float) / R
    rho_vals = np.asarray(rho_y(y), dtype=float)
    drho_vals = np.asarray(drho_y(y), dtype=float) / R  # d/dr
    v_g = -kap / (gam * c_v) * drho_vals / rho_vals**2 \
        - pdot_over_p * np.asarray(r_gas) / (3.0 * gam)
    T_g = p_g / (params.R_g * rho_vals)
    s = c_v * np.log(p_g / rho_vals**gam)

    if r_max is None:
        r_max = 10.0 * R
    r_l = np.linspace(R, r_max, n_liquid)
    v_l = R**2 * Rdot / r_l**2
    p_l = p_inf + params.rho_l * ((2.0 * R * Rdot**2 + R**2 * R_ddot) / r_l
                                  - R**4 * Rdot**2 / (2.0 * r_l**4))
    return ReconstructedFields(
        r_gas=np.asarray(r_gas, dtype=float), v_g=v_g, T_g=T_g, s=s,
        r_liquid=r_l, v_l=v_l, p_l=p_l, p_g=float(p_g), R=float(R),
        R_dot=float(Rdot), R_ddot=float(R_ddot),
        pdot_over_p=float(pdot_over_p))


# --------------------------------------------------------------------------

def _surrogate_distance(params: ModelParams, M: float, rho_sup_fn, R: float,
                        Rdot: float, grad_sup: float) -> float:
    eqM = solve_equilibrium(params, M)
    return rho_sup_fn(eqM.rho_star) + grad_sup + abs(R - eqM.R_star) + abs(Rdot)


def dist_to_manifold(params: ModelParams, state, *, eq=None,
                     tables: ModeTables | None = None,
                     refine: bool = True) -> float:
    """Surrogate distance to the equilibrium manifold.

    Evaluated at the state's own mass, then (optionally) refined by
    golden-section minimization over masses within +-10%.
    """
    from .dynamics import mass_fd, mass_w

    if isinstance(state, GridState):
        M0 = mass_fd(state)
        rho = state.rho_bar
        h = 1.0 / state.N
        grad = np.gradient(rho, h)
        grad_sup = float(np.max(np.abs(grad)))
        R, Rdot = state.R, state.R_dot

        def rho_sup(rho_star):
            return float(np.max(np.abs(rho - rho_star)))
    else:
        wv = state.as_vector() if isinstance(state, StateW) else np.asarray(state)
        if eq is None or tables is None:
            raise ValueError("w-state distance needs eq and mode tables")
        M0 = mass_w(params, eq, wv)
        rho = eq.rho_star + wv[0] + tables.synth(wv[3:])
        rho = np.append(rho, eq.rho_star + wv[0])  # y = 1 value
        du = tables.synth_d(wv[3:])
        grad_sup = float(np.max(np.abs(du)))
        R, Rdot = eq.R_star + wv[1], wv[2]

        def rho_sup(rho_star):
            return float(np.max(np.abs(rho - rho_star)))

    def d_of_M(M):
        return _surrogate_distance(params, M, rho_sup, R, Rdot, grad_sup)

    best = d_of_M(M0)
    if not refine:
        return best
    # golden-section over [0.9 M0, 1.1 M0]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.9 * M0, 1.1 * M0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = d_of_M(c), d_of_M(d)
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = d_of_M(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = d_of_M(d)
        if b - a < 1e-12 * M0:
            break
    return min(best, fc, fd)


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    rate: float
    intercept: float
    window: tuple
    r_squared: float
    n_points: int


def fit_decay(times: np.ndarray, values: np.ndarray, *, lo: float = 1e-8,
              hi: float = 1e-3) -> DecayFit:
    """Least-squares exponential rate of `values` over the [lo, hi] window.

    The window opens at the first sample at or below hi and closes at the
    first later sample below lo (or the end of the data).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values < 0):
        raise WindowNotFound("negative values cannot be log-fitted")
    below_hi = np.nonzero(values <= hi)[0]
    if len(below_hi) == 0:
        raise WindowNotFound(f"quantity never drops to {hi}")
    i0 = int(below_hi[0])
    after = np.nonzero(values[i0:] < lo)[0]
    i1 = int(i0 + after[0]) if len(after) else len(values)
    if i1 - i0 < 5:
        raise WindowNotFound("decay window holds fewer than 5 samples")
    t = times[i0:i1]
    v = values[i0:i1]
    if np.any(v <= 0.0):
        raise WindowNotFound("nonpositive values inside the fit window")
    logv = np.log(v)
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, logv, rcond=None)
    ss_tot = float(np.sum((logv - logv.mean()) ** 2))
    ss_res = float(res[0]) if len(res) else float(np.sum((logv - A @ [slope, intercept]) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(rate=float(-slope), intercept=float(intercept),
                    window=(float(t[0]), float(t[-1])), r_squared=float(r2),
                    n_points=int(i1 - i0))
