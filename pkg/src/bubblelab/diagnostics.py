"""Per-output-time diagnostics of a trajectory: the CSV column set.

Columns: t, R, Rdot, p, mass, E_total, dEdt_fd, diss_rhs, residual,
dist_manifold, normW.  dEdt_fd is a 4th-order finite-difference derivative
of E_total on the uniform output grid (5-point central inside, 5-point
one-sided at the edges), so the dissipation residual dEdt_fd - diss_rhs
carries only O(dt_out^4) differentiation error on top of the solver error.
"""

from __future__ import annotations

import numpy as np

from .basis import ModeTables, RadialGrid
from .dynamics import GridState, Trajectory, mass_fd, mass_w
from .energy import (dissipation_rate_fd, dissipation_rate_w, total_energy_fd,
                     total_energy_w)
from .model import p_infinity, p_infinity_dot
from .observe import dist_to_manifold

__all__ = ["CSV_COLUMNS", "trajectory_diagnostics", "deriv_uniform_4th"]

CSV_COLUMNS = ("t", "R", "Rdot", "p", "mass", "E_total", "dEdt_fd",
               "diss_rhs", "residual", "dist_manifold", "normW")


def deriv_uniform_4th(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative on a uniform grid (needs >= 5 samples)."""
    f = np.asarray(f, dtype=float)
    n = len(f)
    if n < 5:
        raise ValueError("need at least 5 samples")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3]
            - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3]
            + f[4]) / (12.0 * h)
    d[-2] = -(-3.0 * f[-1] - 10.0 * f[-2] + 18.0 * f[-3] - 6.0 * f[-4]
              + f[-5]) / (12.0 * h)
    d[-1] = -(-25.0 * f[-1] + 48.0 * f[-2] - 36.0 * f[-3] + 16.0 * f[-4]
              - 3.0 * f[-5]) / (12.0 * h)
    return d


def trajectory_diagnostics(traj: Trajectory, *, tables: ModeTables | None = None,
                           with_dist: bool = True) -> dict:
    """Column arrays for a trajectory, keyed as in CSV_COLUMNS."""
    params, eq = traj.params, traj.eq
    n = len(traj.times)
    out = {k: np.empty(n) for k in CSV_COLUMNS}
    out["t"] = traj.times.copy()
    p_inf = np.asarray(p_infinity(params, traj.forcing, traj.times), dtype=float)
    dp_inf = np.asarray(p_infinity_dot(params, traj.forcing, traj.times), dtype=float)
    if traj.kind == "w":
        if tables is None:
            tables = ModeTables(traj.resolution, RadialGrid.gauss(192))
        for i, wv in enumerate(traj.states):
            out["R"][i] = eq.R_star + wv[1]
            out["Rdot"][i] = wv[2]
            out["p"][i] = params.RT * (eq.rho_star + wv[0])
            out["mass"][i] = mass_w(params, eq, wv)
            out["E_total"][i] = total_energy_w(params, eq, wv, p_inf[i], tables).total
            out["diss_rhs"][i] = dissipation_rate_w(params, eq, wv, tables, dp_inf[i])
            out["dist_manifold"][i] = dist_to_manifold(
                params, wv, eq=eq, tables=tables) if with_dist else np.nan
            out["normW"][i] = float(np.linalg.norm(wv))
    elif traj.kind == "fd":
        for i, sv in enumerate(traj.states):
            g = GridState.from_vector(sv)
            out["R"][i] = g.R
            out["Rdot"][i] = g.R_dot
            out["p"][i] = params.RT * g.rho_bar[-1]
            out["mass"][i] = mass_fd(g)
            out["E_total"][i] = total_energy_fd(params, g, p_inf[i]).total
            out["diss_rhs"][i] = dissipation_rate_fd(params, g, dp_inf[i])
            out["dist_manifold"][i] = dist_to_manifold(params, g) \
                if with_dist else np.nan
            # normW of the projected fixed-domain state
            u = g.rho_bar - g.rho_bar[-1]
            c = _project_samples(u, traj.resolution, min(traj.resolution // 16, 16))
            out["normW"][i] = float(np.sqrt(
                (g.rho_bar[-1] - eq.rho_star) ** 2 + (g.R - eq.R_star) ** 2
                + g.R_dot**2 + np.sum(c**2)))
    else:  # pragma: no cover
        raise ValueError(f"unknown trajectory kind {traj.kind!r}")
    h = float(traj.times[1] - traj.times[0])
    out["dEdt_fd"] = deriv_uniform_4th(out["E_total"], h)
    out["residual"] = out["dEdt_fd"] - out["diss_rhs"]
    return out


def _project_samples(u: np.ndarray, N: int, J: int) -> np.ndarray:
    """Dirichlet-mode coefficients of uniform-grid samples, by Simpson."""
    from scipy.integrate import simpson

    from .basis import phi

    J = max(J, 1)
    y = np.linspace(0.0, 1.0, N + 1)
    return np.array([4.0 * np.pi * simpson(u * phi(j, y) * y**2, x=y)
                     for j in range(1, J + 1)])
