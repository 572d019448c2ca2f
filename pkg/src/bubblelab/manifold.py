"""The equilibrium manifold as an invariant curve tangent to ker L.

Along the kernel direction b, the curve of equilibria through (rho*, R*) is
parametrized by alpha with

    R**(alpha) = (-alpha + sqrt(alpha^2 + 4 R*^2))/2,
    RT rho**(alpha) = p_inf_star + 2 sigma / R**(alpha),

(the positive branch of R**^2 + alpha R** - R*^2 = 0), and the embedded
state w = alpha b + h(alpha b) is itself a uniform equilibrium: its radius
is alpha + R**(alpha) and its boundary density rho**(alpha)
- 2 sigma alpha/(RT R*^2) - still on the pressure relation, which is
exactly the quadratic above.  The Taylor coefficients of R** at 0 are
R**'(0) = -1/2 and R**''(0)/2 = 1/(8 R*).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartExceeded
from .model import ModelParams

__all__ = ["ManifoldPoint", "h_of_alpha", "taylor_check", "J_alpha",
           "trivial_dynamics_bracket", "R_double_star", "rho_double_star"]


@dataclass(frozen=True)
class ManifoldPoint:
    alpha: float
    rho_ss: float      # rho**(alpha)
    R_ss: float        # R**(alpha)
    w: np.ndarray      # alpha b + h(alpha b), length J+3

    @property
    def y_part(self) -> np.ndarray:
        """h(alpha b) alone (the component off the kernel direction)."""
        out = self.w.copy()
        return out


def R_double_star(eq, alpha: float) -> float:
    return 0.5 * (-alpha + np.sqrt(alpha**2 + 4.0 * eq.R_star**2))


def rho_double_star(params: ModelParams, eq, alpha: float) -> float:
    return (params.p_inf_star + 2.0 * params.sigma / R_double_star(eq, alpha)) \
        / params.RT


def _check_chart(eq, alpha: float):
    if abs(alpha) >= eq.R_star:
        raise ChartExceeded(f"|alpha| = {abs(alpha)} >= R* = {eq.R_star}")


def h_of_alpha(params: ModelParams, eq, alpha: float, J: int = 16) -> ManifoldPoint:
    """Embedded center-manifold point w = alpha b + h(alpha b)."""
    _check_chart(eq, alpha)
    Rss = R_double_star(eq, alpha)
    rss = rho_double_star(params, eq, alpha)
    w = np.zeros(J + 3)
    w[0] = -2.0 * params.sigma * alpha / (params.RT * eq.R_star**2) \
        + rss - eq.rho_star
    w[1] = alpha + Rss - eq.R_star
    return ManifoldPoint(alpha=alpha, rho_ss=rss, R_ss=Rss, w=w)


def taylor_check(params: ModelParams, eq, h: float = 1e-4):
    """Centered finite-difference (R**'(0), R**''(0)) against (-1/2, 1/(4R*))."""
    f = lambda a: R_double_star(eq, a)
    d1 = (f(h) - f(-h)) / (2.0 * h)
    d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / h**2
    return float(d1), float(d2)


def J_alpha(params: ModelParams, eq, alpha: float) -> float:
    """The scalar J(alpha) controlling the on-manifold zdot coupling."""
    _check_chart(eq, alpha)
    Rss = R_double_star(eq, alpha)
    rss = rho_double_star(params, eq, alpha)
    RT, rs, rhos = params.RT, eq.R_star, eq.rho_star
    num = -(rhos + 2.0 * params.sigma / (RT * rs)) * alpha - rhos * Rss + rs * rss
    den = 3.0 * params.gamma * rhos * (-2.0 * params.sigma * alpha / (RT * rs**2)
                                       + rss)
    return float(num / den)


def _drho_ss(params: ModelParams, eq, alpha: float) -> float:
    """d rho**/d alpha, analytic."""
    Rss = R_double_star(eq, alpha)
    dRss = 0.5 * (-1.0 + alpha / np.sqrt(alpha**2 + 4.0 * eq.R_star**2))
    return -2.0 * params.sigma * dRss / (params.RT * Rss**2)


def trivial_dynamics_bracket(params: ModelParams, eq, alpha: float) -> float:
    """1 + (4 pi K/(3 g)) (rho**' - 2 sigma/(RT R*^2)) (3 g rho*/R*) J(alpha).

    The on-manifold amplitude equation reads bracket * alphadot = 0, so
    wherever the bracket stays away from 0 the manifold dynamics is frozen.
    """
    from .linearized import kernel_vectors

    K = kernel_vectors(params, eq, 1).K
    g = params.gamma
    term = (-2.0 * params.sigma / (params.RT * eq.R_star**2)
            + _drho_ss(params, eq, alpha))
    return float(1.0 + 4.0 * np.pi * K / (3.0 * g) * term
                 * (3.0 * g * eq.rho_star / eq.R_star) * J_alpha(params, eq, alpha))
