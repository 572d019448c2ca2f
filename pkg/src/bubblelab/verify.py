"""Acceptance battery: every desk-scale criterion as one runnable check.

All checks run on the canonical parameter set (gamma=1.4, c_v=1, kappa=1,
rho_l=1, mu_l=0, sigma=0.1, p_inf_star=1, R_g T_inf = 1, M = 8 pi/5, so
R*=1, rho*=1.2, kbar=25/42).  Each check returns a CheckResult; the runner
prints one pass/fail line per criterion and exits nonzero on any failure.

The long-horizon checks (limit selection, decay rate, forcing robustness)
integrate to T ~ 340 at J=8 because the slowest spectral pair decays at
only |Re tau| ~ 0.055; the T=30, J=16 trajectory carries the conservation
and dissipation checks as stated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .basis import ModeTables, RadialGrid, phi
from .dispersion import Q0_closed, beta_bound, find_roots, winding_count
from .dynamics import (initial_fd, initial_w, mass_w, simulate_fd,
                       simulate_w, WSystem)
from .energy import coercivity_probe, random_mass_preserving_perturbation
from .equilibria import mass_of, solve_equilibrium
from .linearized import (assemble_L, cokernel_residual, eigenvalues,
                         eigenvalues_tail_closed, kernel_eigenvalue_count,
                         kernel_vectors, spectral_abscissa)
from .manifold import h_of_alpha, taylor_check
from .model import (ForcingKind, ModelParams, PressureForcing,
                    canonical_params, kappa_bar)
from .observe import fit_decay

__all__ = ["CheckResult", "run_battery", "CRITERIA", "canonical_setup"]

# output times before this are excluded from the pointwise dissipation test:
# 4th-order differencing on the dt_out grid cannot resolve components
# decaying faster than ~1/dt_out, which exist only in the initial transient
DISSIPATION_BURN_IN = 0.5


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: str
    seconds: float = 0.0


@dataclass
class _Shared:
    """Lazily computed artifacts shared between criteria."""

    params: ModelParams
    eq: object
    tol: float = 1e-8
    cache: dict = field(default_factory=dict)

    def canonical_initial(self, J: int):
        eq = self.eq
        R0 = eq.R_star * 1.003

        def rho0(r):
            y = np.asarray(r, dtype=float) / R0
            return eq.rho_star + 0.004 + 0.005 * phi(1, y) - 0.002 * phi(2, y)

        return rho0, R0, 0.004

    def w_trajectory_T30(self):
        if "w30" not in self.cache:
            rho0, R0, Rdot0 = self.canonical_initial(16)
            w0 = initial_w(self.params, self.eq, rho0, R0, Rdot0, 16)
            self.cache["w30"] = simulate_w(self.params, self.eq, w0, 30.0,
                                           tol=self.tol, dt_out=0.02)
        return self.cache["w30"]

    def w_diag_T30(self):
        if "w30diag" not in self.cache:
            from .diagnostics import trajectory_diagnostics

            self.cache["w30diag"] = trajectory_diagnostics(
                self.w_trajectory_T30(), with_dist=False)
        return self.cache["w30diag"]

    def long_run(self, forcing=None, key="long"):
        if key not in self.cache:
            rho0, R0, Rdot0 = self.canonical_initial(8)
            w0 = initial_w(self.params, self.eq, rho0, R0, Rdot0, 8)
            self.cache[key] = simulate_w(
                self.params, self.eq, w0, 340.0, tol=self.tol, dt_out=0.1,
                im_switch=30.0, im_dt=0.02, forcing=forcing)
        return self.cache[key]


def canonical_setup(tol: float = 1e-8) -> _Shared:
    params = canonical_params()
    eq = solve_equilibrium(params, 8 * np.pi / 5)
    return _Shared(params=params, eq=eq, tol=tol)


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------

def check_equilibrium(sh: _Shared) -> CheckResult:
    params = sh.params
    worst_res, worst_rt = 0.0, 0.0
    for M in np.geomspace(1e-3, 1e3, 30):
        eq = solve_equilibrium(params, M)
        res = params.p_inf_star * eq.R_star**3 + 2 * params.sigma * eq.R_star**2 \
            - 3 * params.RT * M / (4 * np.pi)
        scale = params.p_inf_star * eq.R_star**3 \
            + abs(2 * params.sigma) * eq.R_star**2 + 3 * params.RT * M / (4 * np.pi)
        worst_res = max(worst_res, abs(res) / scale)
        worst_rt = max(worst_rt, abs(mass_of(eq.R_star, eq.rho_star) - M) / M)
    ok = worst_res <= 1e-12 and worst_rt <= 1e-12
    return CheckResult("equilibrium", ok,
                       f"cubic residual {worst_res:.2e} (<=1e-12), "
                       f"mass round trip {worst_rt:.2e} (<=1e-12)")


def check_kernel(sh: _Shared) -> CheckResult:
    params, eq = sh.params, sh.eq
    worst_kernel = 0.0
    deficits, comps = [], []
    for J in (1, 4, 16, 64):
        L = assemble_L(params, eq, J)
        kv = kernel_vectors(params, eq, J)
        worst_kernel = max(worst_kernel, float(np.max(np.abs(L.matrix @ kv.b))))
        cr = cokernel_residual(params, L, kv)
        deficits.append(cr.deficit)
        comps.append(cr.compensated)
    kv = kernel_vectors(params, eq, 16)
    norm_err = abs(kv.K * float(kv.b_dagger @ kv.b) - 1.0)
    q0_err = abs(float(kv.b_dagger @ kv.b) - Q0_closed(params, eq))
    ok = (worst_kernel <= 1e-12
          and all(d2 < d1 for d1, d2 in zip(deficits, deficits[1:]))
          and max(comps) <= 1e-10
          and norm_err <= 1e-12 and q0_err <= 1e-10)
    return CheckResult(
        "kernel-exactness", ok,
        f"||L b|| {worst_kernel:.1e} (<=1e-12); cokernel deficit "
        f"{'>'.join(f'{d:.2e}' for d in deficits)} decreasing, compensated "
        f"{max(comps):.1e} (<=1e-10); K<bd,b>-1 {norm_err:.1e}; "
        f"<bd,b>-Q(0) {q0_err:.1e}")


def check_spectrum(sh: _Shared) -> CheckResult:
    params, eq = sh.params, sh.eq
    bb = beta_bound(params, eq)
    eigs16 = eigenvalues(assemble_L(params, eq, 16))
    n_kernel = kernel_eigenvalue_count(eigs16)
    absc = spectral_abscissa(eigs16)
    beta_ok = abs(bb.beta - 0.0064) <= 1e-12
    kb = kappa_bar(params, eq)
    box = (-1.05 * kb * (16 * np.pi) ** 2, 1.0, -20.0, 20.0)
    roots = find_roots(params, eq, box)
    ev64 = eigenvalues_tail_closed(params, eq, 64)
    mismatch = max(float(np.min(np.abs(ev64 - r))) for r in roots)
    raw64 = eigenvalues(assemble_L(params, eq, 64))
    mismatch_raw = max(float(np.min(np.abs(raw64 - r))) for r in roots)
    winding = winding_count(params, eq, (0.0, 50.0, -50.0, 50.0))
    ok = (n_kernel == 1 and absc <= -bb.beta and beta_ok
          and mismatch <= 1e-3 and winding == 0)
    return CheckResult(
        "spectrum", ok,
        f"one kernel eig ({n_kernel}); abscissa {absc:.4f} <= -beta "
        f"(beta={bb.beta:.5f}); root/eig mismatch {mismatch:.2e} (<=1e-3, "
        f"raw truncation {mismatch_raw:.2e}); winding(Re>=0) = {winding}")


def check_conservation_dissipation(sh: _Shared) -> CheckResult:
    d = sh.w_diag_T30()
    m = d["mass"]
    drift = float(np.max(np.abs(m - m[0])) / m[0])
    sel = d["t"] >= DISSIPATION_BURN_IN
    res = np.abs(d["residual"][sel])
    band = 1e-6 * np.abs(d["diss_rhs"][sel]) + 1e-10
    n_bad = int(np.sum(res > band))
    dE = np.diff(d["E_total"])
    e_inc = float(dE.max())
    ok = drift <= 1e-8 and n_bad == 0 and e_inc <= 10 * sh.tol
    return CheckResult(
        "conservation-dissipation", ok,
        f"mass drift {drift:.1e} (<=1e-8); dissipation residual "
        f"max |res|-band margin {float(np.max(res - band)):.1e} "
        f"({n_bad} violations, t>={DISSIPATION_BURN_IN}); "
        f"max energy increase {e_inc:.1e} (<=10 tol)")


def check_limit_selection(sh: _Shared) -> CheckResult:
    traj = sh.long_run()
    params, eq = sh.params, sh.eq
    M0 = mass_w(params, eq, traj.states[0])
    eq_inf = solve_equilibrium(params, M0)
    tabs = ModeTables(traj.resolution, RadialGrid.gauss(192))
    wT = traj.states[-1]
    rho_T = eq.rho_star + wT[0] + tabs.synth(wT[3:])
    R_err = abs(eq.R_star + wT[1] - eq_inf.R_star) / eq_inf.R_star
    rho_err = float(np.max(np.abs(rho_T - eq_inf.rho_star)) / eq_inf.rho_star)
    mass_changed = abs(M0 - eq.mass) / eq.mass
    ok = R_err <= 1e-6 and rho_err <= 1e-6 and mass_changed > 1e-4
    return CheckResult(
        "limit-selection", ok,
        f"|R-R*[M0]|/R {R_err:.1e}, sup|rho-rho*[M0]|/rho {rho_err:.1e} "
        f"(<=1e-6); initial mass differs from reference by {mass_changed:.1e}")


def check_exponential_decay(sh: _Shared) -> CheckResult:
    traj = sh.long_run()
    params, eq = sh.params, sh.eq
    M0 = mass_w(params, eq, traj.states[0])
    eq_inf = solve_equilibrium(params, M0)
    w_inf = np.zeros(traj.resolution + 3)
    w_inf[0] = eq_inf.rho_star - eq.rho_star
    w_inf[1] = eq_inf.R_star - eq.R_star
    dist = np.linalg.norm(traj.states - w_inf, axis=1)
    fit = fit_decay(traj.times, dist)
    ev = eigenvalues_tail_closed(params, eq, traj.resolution)
    absc = abs(spectral_abscissa(ev))
    bb = beta_bound(params, eq)
    ratio = fit.rate / absc
    ok = abs(ratio - 1.0) <= 0.10 and fit.rate >= bb.beta
    return CheckResult(
        "exponential-decay", ok,
        f"fitted rate {fit.rate:.5f} vs |abscissa| {absc:.5f} "
        f"(ratio {ratio:.3f}, within 10%); rate >= beta={bb.beta:.4f}; "
        f"window {fit.window[0]:.0f}..{fit.window[1]:.0f}, r2={fit.r_squared:.3f}")


def _dual_gap(sh: _Shared, J: int, N: int, T: float,
              fd_tol: float | None = None) -> float:
    params, eq = sh.params, sh.eq
    rho0, R0, Rdot0 = sh.canonical_initial(J)
    w0 = initial_w(params, eq, rho0, R0, Rdot0, J)
    tw = simulate_w(params, eq, w0, T, tol=sh.tol, dt_out=0.02)
    g0 = initial_fd(rho0, R0, Rdot0, N)
    tf = simulate_fd(params, eq, g0, T,
                     tol=sh.tol if fd_tol is None else fd_tol, dt_out=0.02)
    Rw = eq.R_star + tw.states[:, 1]
    Rf = tf.states[:, -2]
    return float(np.max(np.abs(Rw - Rf)))


def check_dual_solver(sh: _Shared) -> CheckResult:
    gap = _dual_gap(sh, 16, 256, 20.0)
    # direction checks at a tight BDF tolerance so spatial error dominates
    gap_base5 = _dual_gap(sh, 16, 128, 5.0, fd_tol=1e-11)
    gap_fineN = _dual_gap(sh, 16, 256, 5.0, fd_tol=1e-11)
    gap_fineJ = _dual_gap(sh, 32, 128, 5.0, fd_tol=1e-11)
    ok = (gap <= 1e-4 and gap_fineN < gap_base5
          and gap_fineJ <= gap_base5 + 1e-9)
    return CheckResult(
        "dual-solver", ok,
        f"max|R_w - R_fd| {gap:.2e} (<=1e-4) at (J=16,N=256,T=20); "
        f"refining N 128->256: {gap_base5:.2e} -> {gap_fineN:.2e}; "
        f"refining J 16->32: {gap_base5:.2e} -> {gap_fineJ:.2e}")


def check_coercivity(sh: _Shared, seed: int = 1234) -> CheckResult:
    params, eq = sh.params, sh.eq
    grid = RadialGrid.gauss(256)
    rng = np.random.default_rng(seed)
    gaps, thetas = [], []
    for _ in range(100):
        vr, rd = random_mass_preserving_perturbation(rng, 1e-3)
        pr = coercivity_probe(params, eq, vr, rd, grid)
        gaps.append(pr.energy_gap)
        thetas.append(pr.theta_estimate)
    ratios = []
    for _ in range(20):
        vr, rd = random_mass_preserving_perturbation(rng, 1e-4)
        pr = coercivity_probe(params, eq, vr, rd, grid)
        ratios.append(pr.energy_gap / pr.quadratic_form)
    worst_ratio = max(abs(r - 1.0) for r in ratios)
    ok = min(gaps) > 0 and min(thetas) > 0 and worst_ratio <= 0.05
    return CheckResult(
        "coercivity", ok,
        f"100 probes at 1e-3: min gap {min(gaps):.2e} > 0, min theta "
        f"{min(thetas):.3f} > 0; gap/quadratic-form at 1e-4 within "
        f"{worst_ratio:.1e} of 1 (<=0.05)")


def check_center_manifold(sh: _Shared) -> CheckResult:
    params, eq = sh.params, sh.eq
    system = WSystem(params, eq, 16)
    worst_rhs = 0.0
    worst_consistency = 0.0
    for alpha in np.linspace(-0.1, 0.1, 20):
        mp = h_of_alpha(params, eq, float(alpha), J=16)
        worst_rhs = max(worst_rhs, float(np.max(np.abs(system.rhs(0.0, mp.w)))))
        M = 4 * np.pi / 3 * mp.rho_ss * mp.R_ss**3
        eqM = solve_equilibrium(params, M)
        worst_consistency = max(worst_consistency,
                                abs(eqM.R_star - mp.R_ss),
                                abs(eqM.rho_star - mp.rho_ss))
    # R**'(0) = -1/2 and R**''(0) = 2 R**_2 = 1/(4 R*)
    d1, d2 = taylor_check(params, eq)
    taylor_err = max(abs(d1 + 0.5), abs(d2 - 1.0 / (4.0 * eq.R_star)))
    ok = worst_rhs <= 1e-10 and taylor_err <= 1e-6 and worst_consistency <= 1e-10
    return CheckResult(
        "center-manifold", ok,
        f"rhs residual {worst_rhs:.1e} (<=1e-10) at 20 chart points; Taylor "
        f"(R**', R**'') err {taylor_err:.1e} (<=1e-6); manifold/equilibria "
        f"consistency {worst_consistency:.1e} (<=1e-10)")


def check_forcing(sh: _Shared) -> CheckResult:
    params, eq = sh.params, sh.eq
    forcing = PressureForcing(ForcingKind.DECAYING_PERTURBATION,
                              amplitude=0.01, rate=1.0)
    traj = sh.long_run(forcing=forcing, key="long_forced")
    M0 = mass_w(params, eq, traj.states[0])
    eq_inf = solve_equilibrium(params, M0)
    tabs = ModeTables(traj.resolution, RadialGrid.gauss(192))
    wT = traj.states[-1]
    rho_T = eq.rho_star + wT[0] + tabs.synth(wT[3:])
    R_err = abs(eq.R_star + wT[1] - eq_inf.R_star) / eq_inf.R_star
    rho_err = float(np.max(np.abs(rho_T - eq_inf.rho_star)) / eq_inf.rho_star)
    # dissipation residual with the (4 pi/3) R^3 dp_inf/dt term, on [burn, 30]
    from .diagnostics import trajectory_diagnostics

    rho0, R0, Rdot0 = sh.canonical_initial(16)
    w0 = initial_w(params, eq, rho0, R0, Rdot0, 16)
    short = simulate_w(params, eq, w0, 30.0, tol=sh.tol, dt_out=0.02,
                       forcing=forcing)
    d = trajectory_diagnostics(short, with_dist=False)
    sel = d["t"] >= DISSIPATION_BURN_IN
    res = np.abs(d["residual"][sel])
    band = 1e-6 * np.abs(d["diss_rhs"][sel]) + 1e-10
    n_bad = int(np.sum(res > band))
    mass_drift = float(np.max(np.abs(d["mass"] - d["mass"][0])) / d["mass"][0])
    ok = R_err <= 1e-5 and rho_err <= 1e-5 and n_bad == 0 and mass_drift <= 1e-8
    return CheckResult(
        "forcing-robustness", ok,
        f"forced run: R err {R_err:.1e}, rho err {rho_err:.1e} (<=1e-5); "
        f"dissipation residual with dp_inf term: {n_bad} violations; "
        f"mass drift {mass_drift:.1e}")


CRITERIA = (
    check_equilibrium,
    check_kernel,
    check_spectrum,
    check_conservation_dissipation,
    check_limit_selection,
    check_exponential_decay,
    check_dual_solver,
    check_coercivity,
    check_center_manifold,
    check_forcing,
)


def run_battery(tol: float = 1e-8, *, printer=print) -> list[CheckResult]:
    sh = canonical_setup(tol)
    results = []
    for fn in CRITERIA:
        t0 = time.time()
        try:
            result = fn(sh)
        except Exception as exc:  # a crash is a failed criterion, not a crash
            result = CheckResult(fn.__name__.removeprefix("check_"), False,
                                 f"raised {type(exc).__name__}: {exc}")
        result.seconds = time.time() - t0
        results.append(result)
        status = "PASS" if result.passed else "FAIL"
        printer(f"[{status}] {result.name:26s} ({result.seconds:5.1f}s) "
                f"{result.details}")
    n_fail = sum(not r.passed for r in results)
    printer(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return results
