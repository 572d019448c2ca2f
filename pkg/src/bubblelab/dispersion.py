"""Dispersion function Q(tau), its complex roots, and the decay bound beta.

The nonzero linearized spectrum is exactly the zero set of the meromorphic

    Q(tau) = (1/RT) (4 pi/(3 g) + (8(g-1)/(pi g)) S(tau))
                 (rho_l R* tau^2 + 4 mu_l tau / R* - 2 sigma / R*^2)
             + 4 pi rho* / R*,

    S(tau) = sum_{j>=1} pi^2 kbar / (pi^2 kbar j^2 + tau),

with simple poles at tau = -pi^2 kbar j^2.  S has the closed form

    S = (pi sqrt(b) coth(pi sqrt(b)) - 1) / (2 b),     b = tau / (pi^2 kbar),

which is branch-independent (even in sqrt(b)); for |b| < 1e-4 a zeta-series
Taylor expansion avoids the 0/0.  Roots are located by recursive
argument-principle subdivision of a rectangle (winding number of Q along the
boundary, corrected by the exactly known pole count), then polished by Newton
with the analytic derivative.

The explicit bound beta = min(term1, term2, term3) certifies Re(tau) <= -beta
for every root; term3 keeps only the leading pi^4/90 piece of the small-B
expansion (the remainder constant is not quantified), so B is reported
alongside for regime judgment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PoleProximity, WindingInconclusive
from .model import ModelParams, kappa_bar

__all__ = [
    "QEvaluation",
    "BetaBound",
    "eval_Q",
    "eval_Q_deriv",
    "eval_S",
    "eval_S_partial",
    "Q0_closed",
    "poles",
    "find_roots",
    "winding_count",
    "beta_bound",
]

# zeta(2m+2) for the small-b Taylor branch of S
_ZETAS = (
    np.pi**2 / 6.0,
    np.pi**4 / 90.0,
    np.pi**6 / 945.0,
    np.pi**8 / 9450.0,
    np.pi**10 / 93555.0,
    691.0 * np.pi**12 / 638512875.0,
)

_SMALL_B = 1e-4
POLE_TOL = 1e-10


@dataclass(frozen=True)
class QEvaluation:
    tau: complex
    value: complex
    branch_note: str  # "closed-form" | "taylor"


@dataclass(frozen=True)
class BetaBound:
    beta: float
    term1: float
    term2: float
    term3: float
    delta: float
    B: float  # smallness parameter of the term3 expansion

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "term1": self.term1,
            "term2": self.term2,
            "term3": self.term3,
            "delta": self.delta,
            "B": self.B,
            "term3_note": "leading-order (O(B^{3/2}) remainder dropped)",
        }


def _coth(z):
    return 1.0 / np.tanh(z)


def _S_of_b(b):
    """sum_j 1/(j^2 + b) for complex b, poles at b = -j^2."""
    b = np.asarray(b, dtype=complex)
    small = np.abs(b) < _SMALL_B
    bs = np.where(small, b, 0.0)
    series = np.zeros_like(b)
    for m, z in enumerate(_ZETAS):
        series = series + (-1.0) ** m * z * bs**m
    bb = np.where(small, 1.0, b)
    x = np.pi * np.sqrt(bb)
    closed = (x * _coth(x) - 1.0) / (2.0 * bb)
    return np.where(small, series, closed)


def _dS_of_b(b):
    """d/db of _S_of_b."""
    b = np.asarray(b, dtype=complex)
    small = np.abs(b) < _SMALL_B
    bs = np.where(small, b, 0.0)
    series = np.zeros_like(b)
    for m, z in enumerate(_ZETAS):
        if m >= 1:
            series = series + (-1.0) ** m * m * z * bs ** (m - 1)
    bb = np.where(small, 1.0, b)
    x = np.pi * np.sqrt(bb)
    coth = _coth(x)
    csch2 = coth**2 - 1.0
    f = x * coth                       # f(b) = pi sqrt(b) coth(pi sqrt(b))
    dfdb = (np.pi / (2.0 * np.sqrt(bb))) * (coth - x * csch2)
    closed = (bb * dfdb - f + 1.0) / (2.0 * bb**2)
    return np.where(small, series, closed)


def poles(params: ModelParams, eq, count: int) -> np.ndarray:
    """First `count` poles of S(tau): tau = -pi^2 kbar j^2."""
    kb = kappa_bar(params, eq)
    j = np.arange(1, count + 1, dtype=float)
    return -np.pi**2 * kb * j**2


def _check_poles(params: ModelParams, eq, tau, tol: float = POLE_TOL):
    kb = kappa_bar(params, eq)
    t = np.atleast_1d(np.asarray(tau, dtype=complex))
    # nearest pole index from the real part; poles are real negative
    jstar = np.sqrt(np.maximum(-t.real, 0.0) / (np.pi**2 * kb))
    for jn in (np.floor(jstar), np.ceil(jstar)):
        j = np.clip(jn, 1, None)
        dist = np.abs(t - (-np.pi**2 * kb * j**2))
        if np.any(dist < tol):
            raise PoleProximity(f"tau within {tol} of a pole of S")


def eval_S(params: ModelParams, eq, tau, *, pole_tol: float = POLE_TOL):
    """Mode sum S(tau) via the coth closed form / Taylor switch."""
    _check_poles(params, eq, tau, pole_tol)
    kb = kappa_bar(params, eq)
    b = np.asarray(tau, dtype=complex) / (np.pi**2 * kb)
    out = _S_of_b(b)
    return complex(out) if out.ndim == 0 else out


def eval_S_partial(params: ModelParams, eq, tau: complex, n_terms: int,
                   tail: str = "euler-maclaurin") -> complex:
    """Brute-force partial sum of S; the oracle for the closed form.

    The raw tail is O(1/n) (sum_{j>n} 1/j^2), far too slow to certify
    1e-8 agreement at feasible n, so by default the remainder is estimated
    by Euler-Maclaurin through the first derivative term, which leaves an
    O(1/n^5) error.  Pass tail="none" for the raw sum.
    """
    kb = kappa_bar(params, eq)
    a2 = np.pi**2 * kb
    j = np.arange(1, n_terms + 1, dtype=float)
    terms = a2 / (a2 * j**2 + tau)
    # small-to-large summation keeps the tail from washing out
    total = complex(np.sum(terms[::-1]))
    if tail == "none":
        return total
    if tail != "euler-maclaurin":
        raise ConfigError(f"unknown tail mode {tail!r}")
    # sum_{j>n} f(j) ~ int_n^inf f + f(n)/2 - f'(n)/12, f(j) = a2/(a2 j^2 + tau)
    n = float(n_terms)
    s = np.sqrt(complex(tau) / a2)
    integral = (np.pi / 2.0 - np.arctan(n / s)) / s if s != 0 else 1.0 / n
    f_n = a2 / (a2 * n**2 + tau)
    fp_n = -2.0 * a2**2 * n / (a2 * n**2 + tau) ** 2
    return total + complex(integral - 0.5 * f_n - fp_n / 12.0)


def _q_factors(params: ModelParams, eq, tau):
    g = params.gamma
    f1_const = 4.0 * np.pi / (3.0 * g)
    c_g = 8.0 * (g - 1.0) / (np.pi * g)
    quad = (params.rho_l * eq.R_star * tau**2
            + 4.0 * params.mu_l * tau / eq.R_star
            - 2.0 * params.sigma / eq.R_star**2)
    return f1_const, c_g, quad


def eval_Q(params: ModelParams, eq, tau, *, pole_tol: float = POLE_TOL):
    """Q(tau); vectorizes over tau."""
    tau = np.asarray(tau, dtype=complex)
    S = eval_S(params, eq, tau, pole_tol=pole_tol)
    f1c, c_g, quad = _q_factors(params, eq, tau)
    out = (f1c + c_g * S) * quad / params.RT + 4.0 * np.pi * eq.rho_star / eq.R_star
    return complex(out) if np.ndim(out) == 0 else out


def eval_Q_detailed(params: ModelParams, eq, tau: complex) -> QEvaluation:
    kb = kappa_bar(params, eq)
    b = complex(tau) / (np.pi**2 * kb)
    note = "taylor" if abs(b) < _SMALL_B else "closed-form"
    return QEvaluation(tau=complex(tau), value=eval_Q(params, eq, tau), branch_note=note)


def eval_Q_deriv(params: ModelParams, eq, tau):
    """Analytic dQ/dtau (for Newton polish)."""
    tau = np.asarray(tau, dtype=complex)
    _check_poles(params, eq, tau)
    kb = kappa_bar(params, eq)
    b = tau / (np.pi**2 * kb)
    S = _S_of_b(b)
    dS = _dS_of_b(b) / (np.pi**2 * kb)
    f1c, c_g, quad = _q_factors(params, eq, tau)
    dquad = 2.0 * params.rho_l * eq.R_star * tau + 4.0 * params.mu_l / eq.R_star
    out = (c_g * dS * quad + (f1c + c_g * S) * dquad) / params.RT
    return complex(out) if np.ndim(out) == 0 else out


def Q0_closed(params: ModelParams, eq) -> float:
    """Q(0) = (4 pi/(3 R* RT)) (3 p_inf_star + 4 sigma / R*)."""
    return (4.0 * np.pi / (3.0 * eq.R_star * params.RT)) \
        * (3.0 * params.p_inf_star + 4.0 * params.sigma / eq.R_star)


# --- argument-principle machinery ------------------------------------------

def _rect_path(re_lo, re_hi, im_lo, im_hi, n_per_edge):
    edges = []
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi)]
    for a, b in zip(corners, corners[1:] + corners[:1]):
        t = np.linspace(0.0, 1.0, n_per_edge, endpoint=False)
        edges.append(a + (b - a) * t)
    return np.concatenate(edges)


def winding_count(params: ModelParams, eq, box, *, n_per_edge: int = 64,
                  max_refine: int = 52) -> int:
    """Zeros minus poles of Q inside `box` = (re_lo, re_hi, im_lo, im_hi).

    Phase increments along the boundary are accumulated with adaptive
    bisection of any segment whose phase jump exceeds pi/2; segments that
    cannot be resolved (contour through a zero/pole) raise WindingInconclusive.
    """
    re_lo, re_hi, im_lo, im_hi = box
    pts = _rect_path(re_lo, re_hi, im_lo, im_hi, n_per_edge)
    pts = np.append(pts, pts[0])
    vals = eval_Q(params, eq, pts)
    if np.any(np.abs(vals) == 0.0):
        raise WindingInconclusive("contour passes through a zero of Q")
    total = 0.0
    for i in range(len(pts) - 1):
        total += _phase_delta(params, eq, pts[i], pts[i + 1],
                              vals[i], vals[i + 1], max_refine)
    w = total / (2.0 * np.pi)
    w_round = int(np.rint(w))
    if abs(w - w_round) > 1e-6:
        raise WindingInconclusive(f"non-integer winding {w}")
    return w_round


def _phase_delta(params, eq, z0, z1, q0, q1, depth):
    d = np.angle(q1 / q0)
    if abs(d) <= 0.5 * np.pi:
        return d
    if depth == 0:
        raise WindingInconclusive(
            f"phase jump unresolved on segment [{z0}, {z1}]")
    zm = 0.5 * (z0 + z1)
    qm = eval_Q(params, eq, zm)
    if abs(qm) == 0.0:
        raise WindingInconclusive("contour hits a zero of Q")
    return (_phase_delta(params, eq, z0, zm, q0, qm, depth - 1)
            + _phase_delta(params, eq, zm, z1, qm, q1, depth - 1))


def _poles_inside(params, eq, box) -> int:
    re_lo, re_hi, im_lo, im_hi = box
    if im_lo >= 0.0 or im_hi <= 0.0:
        return 0
    kb = kappa_bar(params, eq)
    # -pi^2 kb j^2 in (re_lo, re_hi)
    if re_hi <= 0.0:
        j_min = np.sqrt(-re_hi / (np.pi**2 * kb))
    else:
        j_min = 0.0
    if re_lo >= 0.0:
        return 0
    j_max = np.sqrt(-re_lo / (np.pi**2 * kb))
    lo = int(np.floor(j_min)) + 1 if j_min > 0 else 1
    hi = int(np.floor(j_max))
    return max(0, hi - lo + 1)


def _nudge_away_from_poles(params, eq, x: float, margin: float) -> float:
    """Shift a real abscissa so vertical contour edges clear the pole line."""
    kb = kappa_bar(params, eq)
    if x >= 0.0:
        return x
    j = np.sqrt(-x / (np.pi**2 * kb))
    for jj in (np.floor(j), np.ceil(j)):
        if jj >= 1 and abs(x + np.pi**2 * kb * jj**2) < margin:
            x = -(np.pi**2 * kb * jj**2) - margin
    return x


def default_box(params: ModelParams, eq, J: int):
    """Search box of the spectrum report: Re in [-10 pi^2 kbar J^2, 1]."""
    kb = kappa_bar(params, eq)
    lim = 10.0 * np.pi**2 * kb * J**2
    return (-lim, 1.0, -lim, lim)


def _real_axis_roots(params, eq, re_lo, re_hi, *, pole_margin, tol,
                     samples_per_segment: int = 192) -> list[float]:
    """Roots of Q on the real axis, bracketed between consecutive poles.

    Q is real there (conjugate symmetry), blows up at every pole of S, and
    is smooth on each inter-pole segment, so a dense sample plus brentq on
    each sign change finds every axis root.
    """
    from scipy.optimize import brentq

    kb = kappa_bar(params, eq)
    step = np.pi**2 * kb
    cuts = [re_hi]
    j = 1
    while -step * j**2 > re_lo:
        pj = -step * j**2
        if pj < re_hi:
            cuts.extend([pj + pole_margin, pj - pole_margin])
        j += 1
    cuts.append(re_lo)
    cuts = sorted({c for c in cuts if re_lo <= c <= re_hi}, reverse=True)

    def q_real(x):
        return eval_Q(params, eq, complex(x, 0.0)).real

    roots = []
    for hi, lo in zip(cuts[0::2], cuts[1::2]):
        if hi - lo <= 0:
            continue
        xs = np.linspace(lo, hi, samples_per_segment)
        vals = np.real(eval_Q(params, eq, xs.astype(complex)))
        sgn = np.sign(vals)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            r = brentq(q_real, xs[i], xs[i + 1], xtol=1e-14, rtol=8.9e-16)
            r = _newton(params, eq, complex(r, 0.0), tol)
            if r is not None:
                roots.append(float(r.real))
    return roots


def find_roots(params: ModelParams, eq, box, *, max_roots: int = 256,
               pole_margin: float = 1e-3, tol: float = 1e-10,
               min_box: float = 1e-6, max_splits: int = 4000,
               axis_eps: float = 1e-4) -> np.ndarray:
    """All roots of Q in `box`, each polished by Newton to |Q| <= tol.

    The real axis (where both the poles of S and the strongly damped real
    roots live) is swept by 1-D bracketing; the open upper half plane is
    searched by work-list subdivision on the winding number, with each
    isolated zero polished by Newton.  Conjugate symmetry mirrors the upper
    roots into the lower half.  Conjugate pairs with |Im tau| < axis_eps
    would be missed; no such near-axis pairs arise for coercive parameters.
    """
    re_lo, re_hi, im_lo, im_hi = box
    re_lo = _nudge_away_from_poles(params, eq, re_lo, pole_margin)
    re_hi = _nudge_away_from_poles(params, eq, re_hi, pole_margin)
    roots: list[complex] = []
    if im_lo < 0.0 < im_hi:
        roots.extend(complex(r, 0.0) for r in _real_axis_roots(
            params, eq, re_lo, re_hi, pole_margin=pole_margin, tol=tol))

    work = []
    if im_hi > axis_eps:
        work.append((re_lo, re_hi, max(axis_eps, im_lo), im_hi))
    splits = 0
    upper: list[complex] = []
    while work:
        b = work.pop()
        if len(upper) >= max_roots:
            break
        z = winding_count(params, eq, b)  # no poles off the axis
        if z == 0:
            continue
        blo, bhi, bil, bih = b
        size = max(bhi - blo, bih - bil)
        if z == 1 and size < 0.5:
            r = _newton(params, eq, complex(0.5 * (blo + bhi), 0.5 * (bil + bih)), tol)
            if r is not None and blo - 1e-9 <= r.real <= bhi + 1e-9 \
                    and bil - 1e-9 <= r.imag <= bih + 1e-9:
                upper.append(r)
                continue
        if size < min_box:
            raise WindingInconclusive(f"cannot isolate {z} zeros in box {b}")
        splits += 1
        if splits > max_splits:
            raise WindingInconclusive("subdivision budget exhausted")
        if (bhi - blo) >= (bih - bil):
            mid = _nudge_away_from_poles(params, eq, 0.5 * (blo + bhi), pole_margin)
            if not (blo < mid < bhi):
                mid = 0.5 * (blo + bhi)
            work.append((blo, mid, bil, bih))
            work.append((mid, bhi, bil, bih))
        else:
            mid = 0.5 * (bil + bih)
            work.append((blo, bhi, bil, mid))
            work.append((blo, bhi, mid, bih))

    found = list(roots)
    for r in upper:
        found.append(r)
        if im_lo <= -r.imag:
            found.append(r.conjugate())
    # dedupe within 1e-8
    out: list[complex] = []
    for r in sorted(found, key=lambda z: (z.real, z.imag)):
        if all(abs(r - s) > 1e-8 for s in out):
            out.append(r)
    return np.array(out, dtype=complex)


def _q_scale(params, eq, z) -> float:
    """Magnitude of the terms Q is assembled from; its roundoff floor."""
    S = eval_S(params, eq, z)
    f1c, c_g, quad = _q_factors(params, eq, np.asarray(z, dtype=complex))
    return float(abs((f1c + c_g * S) * quad) / params.RT
                 + 4.0 * np.pi * eq.rho_star / eq.R_star)


def _newton(params, eq, z0: complex, tol: float, max_iter: int = 60):
    eps = np.finfo(float).eps

    def _floor(z, dq) -> float:
        # |Q| cannot drop below its roundoff floor: evaluation noise plus
        # the x-quantization |Q'| |z| eps of the argument itself
        return 8 * eps * (_q_scale(params, eq, z) + abs(dq) * abs(z))

    z = z0
    dq = None
    for _ in range(max_iter):
        try:
            q = eval_Q(params, eq, z)
        except PoleProximity:
            z = z + 10 * POLE_TOL
            continue
        dq = eval_Q_deriv(params, eq, z)
        if abs(q) <= max(tol, _floor(z, dq)):
            return z
        if dq == 0:
            return None
        z = z - q / dq
    q = eval_Q(params, eq, z)
    return z if abs(q) <= max(tol, _floor(z, dq or 0.0)) else None


def beta_bound(params: ModelParams, eq) -> BetaBound:
    """Explicit negative upper bound for Re of the Q-roots."""
    g = params.gamma
    R, rho = eq.R_star, eq.rho_star
    kb = kappa_bar(params, eq)
    pR = params.p_inf_star * R
    denom = 2.0 * pR + 6.0 * params.sigma
    if denom <= 0.0 or (3.0 * pR + 6.0 * params.sigma) <= 0.0:
        raise ConfigError("beta bound requires 2 p_inf R* + 6 sigma > 0")
    ratio = (3.0 * pR + 6.0 * params.sigma) / denom
    inner = (1.0 - 1.0 / g) / (ratio - 1.0 / g)
    term1 = (1.0 - np.sqrt(inner)) * np.pi**2 * kb

    term2 = np.sqrt(params.RT * rho / (params.rho_l * R**2))

    delta = (4.0 * params.mu_l / R) ** 2 - 8.0 * params.rho_l * params.RT * rho
    visc = 2.0 * params.mu_l / (params.rho_l * R**2)
    if delta <= 0.0:
        term3 = visc + (params.RT * rho / (np.pi**4 * kb * params.rho_l * R**2)) \
            * (1.0 - 1.0 / g) * (np.pi**4 / 90.0)
    else:
        term3 = visc - np.sqrt(delta) / (2.0 * params.rho_l * R)

    B = term2 / (np.pi**2 * kb)
    beta = min(term1, term2, term3)
    return BetaBound(beta=float(beta), term1=float(term1), term2=float(term2),
                     term3=float(term3), delta=float(delta), B=float(B))
