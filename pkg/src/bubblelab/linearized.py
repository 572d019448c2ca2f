"""Truncated linearization L of the Galerkin bubble system.

State order is w = (z, R, Rdot, c_1 ... c_J), so dim = J + 3.  The operator
couples the boundary-density perturbation z, the radius perturbation and its
velocity, and the Dirichlet mode amplitudes:

    row 1   (zdot):    -(3 g rho*/R*) Rdot + (3 g rho*/R*) sum_j Lambda_j c_j
    row 2   (Rdot):     Rdot
    row 3   (Rddot):   (RT/(rho_l R*)) z + (2 sigma/(rho_l R*^3)) R
                        - (4 mu_l/(rho_l R*^2)) Rdot
    row 3+k (c_k dot):  Gamma_k (3 g rho*/R*) Rdot
                        - Gamma_k Lambda_j (3 g rho*/R*) c_j - kbar lambda_k c_k

The kernel vector b = (-2 sigma/(RT R*^2), 1, 0, ...) is annihilated exactly
at every truncation.  The cokernel vector b^T L vanishes only in the infinite
system, through the identity sum_j Gamma_j^2 = 4 pi (g-1)^2/(3 g^2); at finite
J every nonzero entry of b^T L is proportional to the tail deficit
S_inf - S_J of that sum, with the mode columns amplified by Lambda_j ~ j.
`cokernel_residual` therefore reports the raw sup-norm, the deficit-scale
residual (the Rdot column entry, which decays like 1/J), and the residual
after adding back the closed-form tail (zero in exact arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import gamma_k, lambda_cap_j, lambda_j, sum_gamma_sq_closed
from .errors import EigensolverFailure
from .model import ModelParams, kappa_bar

__all__ = [
    "TruncatedL",
    "KernelVectors",
    "CokernelResidual",
    "assemble_L",
    "kernel_vectors",
    "cokernel_residual",
    "eigenvalues",
    "spectral_abscissa",
    "kernel_eigenvalue_count",
    "project_kernel",
    "project_stable",
]

KERNEL_TOL = 1e-8


@dataclass(frozen=True)
class TruncatedL:
    J: int
    matrix: np.ndarray = field(repr=False)
    Gam: np.ndarray = field(repr=False)   # Gamma_1..Gamma_J
    Lam: np.ndarray = field(repr=False)   # Lambda_1..Lambda_J
    lam: np.ndarray = field(repr=False)   # lambda_1..lambda_J
    kbar: float
    coeff: float                          # 3 gamma rho* / R*

    @property
    def dim(self) -> int:
        return self.J + 3


@dataclass(frozen=True)
class KernelVectors:
    b: np.ndarray
    b_dagger: np.ndarray
    K: float

    @property
    def b0_dagger(self) -> np.ndarray:
        return self.K * self.b_dagger


def assemble_L(params: ModelParams, eq, J: int, *,
               tail_closure: bool = False) -> TruncatedL:
    """Dense (J+3)x(J+3) truncation of the linear operator.

    tail_closure=False gives the verbatim truncation (rows/columns exactly
    as stated); True slaves the neglected modes quasi-statically, which
    only changes the inversion coefficient 3 g rho*/R* (see
    `generalized_matrices`) and restores exact linear mass conservation.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    g = params.gamma
    R, rho = eq.R_star, eq.rho_star
    kb = kappa_bar(params, eq)
    a00 = R / (3.0 * g * rho)
    if tail_closure:
        from scipy.special import polygamma

        a00 += 2.0 * (g - 1.0) * R / (g * np.pi**2 * rho) \
            * float(polygamma(1, J + 1))
    coeff = 1.0 / a00
    Gam = np.array([gamma_k(params, k) for k in range(1, J + 1)])
    Lam = np.array([lambda_cap_j(params, eq, j) for j in range(1, J + 1)])
    lam = np.array([lambda_j(j) for j in range(1, J + 1)])

    L = np.zeros((J + 3, J + 3))
    L[0, 2] = -coeff
    L[0, 3:] = coeff * Lam
    L[1, 2] = 1.0
    L[2, 0] = params.RT / (params.rho_l * R)
    L[2, 1] = 2.0 * params.sigma / (params.rho_l * R**3)
    L[2, 2] = -4.0 * params.mu_l / (params.rho_l * R**2)
    L[3:, 2] = coeff * Gam
    L[3:, 3:] = -coeff * np.outer(Gam, Lam) - np.diag(kb * lam)
    return TruncatedL(J=J, matrix=L, Gam=Gam, Lam=Lam, lam=lam, kbar=kb, coeff=coeff)


def kernel_vectors(params: ModelParams, eq, J: int) -> KernelVectors:
    """Kernel b, cokernel b_dagger, and the normalizer K with <K b_dagger, b> = 1."""
    g = params.gamma
    b = np.zeros(J + 3)
    b[0] = -2.0 * params.sigma / (params.RT * eq.R_star**2)
    b[1] = 1.0
    bd = np.zeros(J + 3)
    bd[0] = 4.0 * np.pi / 3.0
    bd[1] = 4.0 * np.pi * eq.rho_star / eq.R_star
    bd[3:] = g / (g - 1.0) * np.array([gamma_k(params, k) for k in range(1, J + 1)])
    K = 1.0 / (4.0 * np.pi * params.p_inf_star / (3.0 * params.RT * eq.R_star)
               + 8.0 * np.pi * eq.rho_star / (3.0 * eq.R_star))
    return KernelVectors(b=b, b_dagger=bd, K=K)


@dataclass(frozen=True)
class CokernelResidual:
    raw: float           # ||b^T L||_inf as assembled
    deficit: float       # |(b^T L)_Rdot|; scales like the Gamma^2 tail ~ 1/J
    compensated: float   # ||b^T L + closed-form tail correction||_inf


def cokernel_residual(params: ModelParams, L: TruncatedL,
                      kv: KernelVectors) -> CokernelResidual:
    v = kv.b_dagger @ L.matrix
    g = params.gamma
    S_J = float(np.sum(L.Gam**2))
    S_inf = sum_gamma_sq_closed(params)
    # every entry of v is this deficit times (0,0,1,-Lambda_1,...,-Lambda_J)
    D = (g / (g - 1.0)) * L.coeff * (S_J - S_inf)
    correction = np.zeros(L.dim)
    correction[2] = D
    correction[3:] = -D * L.Lam
    return CokernelResidual(
        raw=float(np.max(np.abs(v))),
        deficit=float(abs(v[2])),
        compensated=float(np.max(np.abs(v - correction))),
    )


def eigenvalues(L: TruncatedL) -> np.ndarray:
    """Full spectrum of the dense truncation."""
    try:
        return np.linalg.eigvals(L.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK pathology
        raise EigensolverFailure(str(exc)) from exc


def generalized_matrices(params: ModelParams, eq, J: int, *,
                         tail_closure: bool = False):
    """Mass/stiffness pair (A, B) of the pre-inverted system, L = A^{-1} B.

    With tail_closure, the modes j > J are closed quasi-statically
    (c_j = -Gamma_j zdot / (kbar lambda_j), exact to leading order in
    tau/(kbar lambda_j)), which adds sum_{j>J} Gamma_j Lambda_j/(kbar lambda_j)
    = (2(g-1) R*/(g pi^2 rho*)) sum_{j>J} j^-2 to the zdot mass entry.  This
    removes the O(1/J) eigenvalue truncation error (leaving O(1/J^3)), while
    keeping b in the kernel exactly.
    """
    g = params.gamma
    R, rho = eq.R_star, eq.rho_star
    kb = kappa_bar(params, eq)
    Gam = np.array([gamma_k(params, k) for k in range(1, J + 1)])
    Lam = np.array([lambda_cap_j(params, eq, j) for j in range(1, J + 1)])
    lam = np.array([lambda_j(j) for j in range(1, J + 1)])
    n = J + 3
    A = np.eye(n)
    A[0, 0] = R / (3.0 * g * rho)
    A[0, 1] = 1.0
    A[3:, 0] = Gam
    if tail_closure:
        from scipy.special import polygamma

        tail = float(polygamma(1, J + 1))  # sum_{j>J} 1/j^2
        A[0, 0] += 2.0 * (g - 1.0) * R / (g * np.pi**2 * rho) * tail
    B = np.zeros((n, n))
    B[0, 3:] = Lam
    B[1, 2] = 1.0
    B[2, 0] = params.RT / (params.rho_l * R)
    B[2, 1] = 2.0 * params.sigma / (params.rho_l * R**3)
    B[2, 2] = -4.0 * params.mu_l / (params.rho_l * R**2)
    B[3:, 3:] = -np.diag(kb * lam)
    return A, B


def eigenvalues_tail_closed(params: ModelParams, eq, J: int) -> np.ndarray:
    """Spectrum of the tail-closed generalized pencil (B, A)."""
    from scipy.linalg import eig

    A, B = generalized_matrices(params, eq, J, tail_closure=True)
    try:
        w = eig(B, A, right=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolverFailure(str(exc)) from exc
    return w[np.isfinite(w)]


def kernel_eigenvalue_count(eigs: np.ndarray, tol: float = KERNEL_TOL) -> int:
    return int(np.sum(np.abs(eigs) <= tol))


def spectral_abscissa(eigs: np.ndarray, tol: float = KERNEL_TOL) -> float:
    """Largest real part over the nonzero spectrum."""
    nonzero = eigs[np.abs(eigs) > tol]
    return float(np.max(nonzero.real))


def project_kernel(kv: KernelVectors, w: np.ndarray) -> np.ndarray:
    """Q1 w = <b0_dagger, w> b (spectral projection onto ker L)."""
    return (kv.b0_dagger @ w) * kv.b


def project_stable(kv: KernelVectors, w: np.ndarray) -> np.ndarray:
    """Q2 = I - Q1."""
    return w - project_kernel(kv, w)
