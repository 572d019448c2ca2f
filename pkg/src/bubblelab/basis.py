"""Radial Dirichlet eigenbasis of the unit ball and its coupling data.

The normalized eigenfunctions and eigenvalues are

    phi_j(y) = sin(j pi y) / (sqrt(2 pi) y),      lambda_j = (j pi)^2,

with -Lap phi_j = lambda_j phi_j, phi_j(1) = 0, and int_{B1} phi_j phi_k = delta_jk.
Everything downstream (the Galerkin operator, the dispersion function, the
mass identity) is built from four closed-form scalars per mode:

    int_{B1} phi_j dx           = (2 sqrt2 / sqrt(pi)) (-1)^(j-1) / j
    d/dy phi_j (1)              = sqrt(pi/2) (-1)^j j
    Gamma_j = ((g-1)/g) int phi_j
    Lambda_j = -(R* kbar / rho*) d/dy phi_j(1)

plus the advection coupling int_{B1} y phi_k' phi_j dx, which is -3/2 on the
diagonal and (-1)^(j+k) 2jk/(k^2-j^2) off it.

Radial quadrature uses Gauss-Legendre nodes in y with weight 4 pi y^2; for
the smooth trigonometric integrands here this is accurate to machine
precision at a few hundred nodes, which composite Simpson is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonDirichlet

__all__ = [
    "phi",
    "dphi",
    "d2phi",
    "lap_phi",
    "lambda_j",
    "dphi_boundary",
    "integral_phi",
    "gamma_k",
    "lambda_cap_j",
    "sum_gamma_sq_closed",
    "coupling_integral",
    "coupling_matrix",
    "RadialGrid",
    "ModeTables",
    "project",
    "synthesize",
]

_SQRT_2PI = np.sqrt(2.0 * np.pi)

# |t| below which the sinc-derivative helpers switch to their Taylor series
# (the closed forms lose ~t^-2 digits to cancellation as t -> 0).
_SERIES_CUT = 0.1


def _sinc(t):
    """sin(t)/t with the removable singularity filled in."""
    return np.sinc(np.asarray(t) / np.pi)


def _sinc_d1(t):
    """d/dt [sin(t)/t] = (t cos t - sin t)/t^2, series-protected near 0."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _SERIES_CUT
    ts = np.where(small, t, 1.0)
    series = -ts / 3.0 + ts**3 / 30.0 - ts**5 / 840.0 + ts**7 / 45360.0
    tb = np.where(small, 1.0, t)
    closed = (tb * np.cos(tb) - np.sin(tb)) / tb**2
    return np.where(small, series, closed)


def _sinc_d2(t):
    """d^2/dt^2 [sin(t)/t], series-protected near 0."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _SERIES_CUT
    ts = np.where(small, t, 1.0)
    series = -1.0 / 3.0 + ts**2 / 10.0 - ts**4 / 168.0 + ts**6 / 6480.0
    tb = np.where(small, 1.0, t)
    closed = -np.sin(tb) / tb - 2.0 * np.cos(tb) / tb**2 + 2.0 * np.sin(tb) / tb**3
    return np.where(small, series, closed)


def phi(j: int, y):
    """Eigenfunction phi_j(y) = sin(j pi y)/(sqrt(2 pi) y); y=0 gives the limit."""
    jpi = j * np.pi
    out = (jpi / _SQRT_2PI) * _sinc(jpi * np.asarray(y, dtype=float))
    return float(out) if out.ndim == 0 else out


def dphi(j: int, y):
    """d/dy phi_j."""
    jpi = j * np.pi
    out = (jpi**2 / _SQRT_2PI) * _sinc_d1(jpi * np.asarray(y, dtype=float))
    return float(out) if out.ndim == 0 else out


def d2phi(j: int, y):
    """d^2/dy^2 phi_j."""
    jpi = j * np.pi
    out = (jpi**3 / _SQRT_2PI) * _sinc_d2(jpi * np.asarray(y, dtype=float))
    return float(out) if out.ndim == 0 else out


def lap_phi(j: int, y):
    """Radial Laplacian of phi_j, assembled from the derivative helpers.

    Identical to -lambda_j phi_j analytically; computing it from phi'' and
    (2/y) phi' keeps it an independent consistency check on those paths.
    """
    jpi = j * np.pi
    t = jpi * np.asarray(y, dtype=float)
    small = np.abs(t) < _SERIES_CUT
    tb = np.where(small, 1.0, t)
    ts = np.where(small, t, 1.0)
    # (2/t) d1 has its own removable singularity; expand the combination.
    series = -2.0 / 3.0 + ts**2 / 15.0 - ts**4 / 420.0 + ts**6 / 22680.0
    combo = np.where(small, _sinc_d2(t) + series, _sinc_d2(t) + 2.0 * _sinc_d1(tb) / tb)
    out = (jpi**3 / _SQRT_2PI) * combo
    return float(out) if out.ndim == 0 else out


def lambda_j(j: int) -> float:
    """Dirichlet eigenvalue lambda_j = (j pi)^2."""
    return (j * np.pi) ** 2


def dphi_boundary(j: int) -> float:
    """d/dy phi_j at y = 1: sqrt(pi/2) (-1)^j j."""
    return np.sqrt(np.pi / 2.0) * (-1.0) ** j * j


def integral_phi(j: int) -> float:
    """int_{B1} phi_j dx = (2 sqrt2 / sqrt(pi)) (-1)^(j-1) / j."""
    return 2.0 * np.sqrt(2.0 / np.pi) * (-1.0) ** (j - 1) / j


def gamma_k(params, k: int) -> float:
    """Gamma_k = ((gamma-1)/gamma) int_{B1} phi_k dx."""
    g = params.gamma
    return (g - 1.0) / g * integral_phi(k)


def lambda_cap_j(params, eq, j: int) -> float:
    """Lambda_j = -(R* kbar / rho*) sqrt(pi/2) (-1)^j j."""
    from .model import kappa_bar

    kb = kappa_bar(params, eq)
    return -(eq.R_star * kb / eq.rho_star) * dphi_boundary(j)


def sum_gamma_sq_closed(params) -> float:
    """sum_j Gamma_j^2 = 4 pi (gamma-1)^2 / (3 gamma^2)."""
    g = params.gamma
    return 4.0 * np.pi * (g - 1.0) ** 2 / (3.0 * g**2)


def coupling_integral(j: int, k: int) -> float:
    """int_{B1} y (d/dy phi_k) phi_j dx, closed form."""
    if j == k:
        return -1.5
    return (-1.0) ** (k + j) * 2.0 * j * k / (k**2 - j**2)


def coupling_matrix(J: int) -> np.ndarray:
    """A[k-1, j-1] = int y phi_k' phi_j dx for 1 <= j,k <= J."""
    jj = np.arange(1, J + 1, dtype=float)
    k = jj[:, None]
    j = jj[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        A = (-1.0) ** (k + j) * 2.0 * j * k / (k**2 - j**2)
    np.fill_diagonal(A, -1.5)
    return A


@dataclass(frozen=True)
class RadialGrid:
    """Gauss-Legendre quadrature nodes on [0,1] with the 4 pi y^2 measure."""

    y: np.ndarray
    w: np.ndarray  # plain GL weights on [0,1]

    @classmethod
    def gauss(cls, n: int = 512) -> "RadialGrid":
        x, w = np.polynomial.legendre.leggauss(n)
        return cls(y=0.5 * (x + 1.0), w=0.5 * w)

    @property
    def wvol(self) -> np.ndarray:
        """Volume weights: int_{B1} f dx = sum wvol * f(y)."""
        return 4.0 * np.pi * self.y**2 * self.w

    def integrate(self, f_vals: np.ndarray) -> float:
        return float(self.wvol @ f_vals)


@dataclass(frozen=True)
class ModeTables:
    """Mode values and derivatives tabulated on a quadrature grid.

    Shared, immutable, and reused across every right-hand-side evaluation;
    building one per run keeps the dynamics hot path to matrix products.
    """

    J: int
    grid: RadialGrid
    Phi: np.ndarray = field(init=False, repr=False)    # (J, n)
    dPhi: np.ndarray = field(init=False, repr=False)   # (J, n)
    lam: np.ndarray = field(init=False, repr=False)    # (J,)
    A: np.ndarray = field(init=False, repr=False)      # coupling matrix (J, J)
    Wvol: np.ndarray = field(init=False, repr=False)   # (n,)

    def __post_init__(self):
        js = np.arange(1, self.J + 1)
        object.__setattr__(self, "Phi",
                           np.vstack([phi(int(j), self.grid.y) for j in js]))
        object.__setattr__(self, "dPhi",
                           np.vstack([dphi(int(j), self.grid.y) for j in js]))
        object.__setattr__(self, "lam", np.array([lambda_j(int(j)) for j in js]))
        object.__setattr__(self, "A", coupling_matrix(self.J))
        object.__setattr__(self, "Wvol", self.grid.wvol)

    def synth(self, c: np.ndarray) -> np.ndarray:
        """u(y) = sum c_j phi_j(y) on the grid."""
        return c @ self.Phi

    def synth_d(self, c: np.ndarray) -> np.ndarray:
        return c @ self.dPhi

    def synth_lap(self, c: np.ndarray) -> np.ndarray:
        """Lap_y u = sum c_j (-lambda_j) phi_j, exact mode derivatives."""
        return -(c * self.lam) @ self.Phi

    def project_grid(self, u_vals: np.ndarray) -> np.ndarray:
        """c_j = int u phi_j dx for u sampled on the grid."""
        return self.Phi @ (self.Wvol * u_vals)


def project(u, J: int, grid: RadialGrid | None = None, *, tables: ModeTables | None = None,
            tol: float = 1e-8) -> np.ndarray:
    """Mode coefficients c_j = int_{B1} u phi_j dx, j = 1..J.

    `u` is a callable on [0,1]; its boundary value is checked against the
    Dirichlet class (|u(1)| <= tol) and NonDirichlet is raised otherwise.
    """
    if tables is None:
        tables = ModeTables(J, grid if grid is not None else RadialGrid.gauss())
    u1 = float(u(1.0))
    if abs(u1) > tol:
        raise NonDirichlet(f"|u(1)| = {abs(u1)} exceeds Dirichlet tolerance {tol}")
    u_vals = np.asarray(u(tables.grid.y), dtype=float)
    return tables.project_grid(u_vals)


def synthesize(c: np.ndarray, y) -> np.ndarray:
    """Partial sum sum_j c_j phi_j evaluated at y (arbitrary points)."""
    c = np.asarray(c, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y, dtype=float)
    for idx, cj in enumerate(c):
        if cj != 0.0:
            out += cj * phi(idx + 1, y)
    return out
