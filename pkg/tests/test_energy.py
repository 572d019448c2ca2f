import numpy as np
import pytest

from bubblelab.basis import ModeTables, RadialGrid, phi
from bubblelab.diagnostics import trajectory_diagnostics
from bubblelab.dynamics import GridState, initial_w, simulate_w
from bubblelab.energy import (coercivity_probe, dissipation_rate_fd,
                              dissipation_rate_w,
                              random_mass_preserving_perturbation,
                              total_energy_fd, total_energy_w)
from bubblelab.equilibria import solve_equilibrium
from bubblelab.errors import MassNotPreserved
from bubblelab.model import canonical_params


@pytest.fixture(scope="module")
def setup():
    p = canonical_params()
    return p, solve_equilibrium(p, 8 * np.pi / 5)


def test_equilibrium_energy_closed_form(setup):
    # FE = (4 pi c_v/(3 R_g)) p* R*^3 - c_v T_inf M log p* + c_v g T_inf V rho log rho
    #    = 4 pi (1 + 0.4 log 1.2) for the canonical split (R_g T_inf = 1)
    p, eq = setup
    g = GridState(np.full(257, eq.rho_star), eq.R_star, 0.0)
    e = total_energy_fd(p, g, p.p_inf_star)
    assert e.FE == pytest.approx(4 * np.pi * (1 + 0.4 * np.log(1.2)), rel=1e-12)
    assert e.U_gl == pytest.approx(0.4 * np.pi, rel=1e-14)
    assert e.PV == pytest.approx(4 * np.pi / 3, rel=1e-14)
    assert e.KE_l == 0.0
    assert e.total == e.FE + e.KE_l + e.U_gl + e.PV


def test_kinetic_energy_increment(setup):
    p, eq = setup
    g0 = GridState(np.full(257, eq.rho_star), eq.R_star, 0.0)
    g1 = GridState(np.full(257, eq.rho_star), eq.R_star, 0.1)
    d = total_energy_fd(p, g1, p.p_inf_star).total \
        - total_energy_fd(p, g0, p.p_inf_star).total
    assert d == pytest.approx(2 * np.pi * p.rho_l * eq.R_star**3 * 0.01, rel=1e-12)


def test_sigma_changes_only_surface_term(setup):
    p, eq = setup
    p2 = canonical_params(sigma=0.2)
    g = GridState(np.full(257, eq.rho_star), eq.R_star, 0.05)
    e1 = total_energy_fd(p, g, p.p_inf_star)
    e2 = total_energy_fd(p2, g, p.p_inf_star)
    assert e2.U_gl - e1.U_gl == pytest.approx(4 * np.pi * 0.1 * eq.R_star**2,
                                              rel=1e-12)
    assert e2.FE == pytest.approx(e1.FE, rel=1e-14)
    assert e2.KE_l == pytest.approx(e1.KE_l, rel=1e-14)
    assert e2.PV == pytest.approx(e1.PV, rel=1e-14)


def test_energy_w_matches_fd_on_same_profile(setup):
    p, eq = setup
    tabs = ModeTables(8, RadialGrid.gauss(256))
    wv = np.zeros(11)
    wv[0], wv[1], wv[2] = 0.01, -0.004, 0.02
    wv[3], wv[4] = 0.006, -0.002
    e_w = total_energy_w(p, eq, wv, p.p_inf_star, tabs).total

    R0 = eq.R_star + wv[1]

    def rho0(r):
        y = np.asarray(r) / R0
        return eq.rho_star + wv[0] + 0.006 * phi(1, y) - 0.002 * phi(2, y)

    g = GridState(rho0(R0 * np.linspace(0, 1, 2049)), R0, wv[2])
    e_fd = total_energy_fd(p, g, p.p_inf_star).total
    assert e_w == pytest.approx(e_fd, rel=1e-9)


def test_dissipation_zero_at_equilibrium(setup):
    p, eq = setup
    g = GridState(np.full(257, eq.rho_star), eq.R_star, 0.0)
    assert dissipation_rate_fd(p, g) == pytest.approx(0.0, abs=1e-20)


def test_dissipation_uniform_viscous(setup):
    p, eq = setup
    pv = canonical_params(mu_l=0.3)
    g = GridState(np.full(257, eq.rho_star), eq.R_star, 0.05)
    expected = -16 * np.pi * 0.3 * eq.R_star * 0.05**2
    assert dissipation_rate_fd(pv, g) == pytest.approx(expected, rel=1e-13)


def test_dissipation_forcing_term(setup):
    p, eq = setup
    g = GridState(np.full(257, eq.rho_star), 2.0, 0.0)
    base = dissipation_rate_fd(p, g, 0.0)
    forced = dissipation_rate_fd(p, g, 0.25)
    assert forced - base == pytest.approx(4 * np.pi / 3 * 8 * 0.25, rel=1e-13)


def test_dissipation_residual_along_trajectory(setup):
    # |dE/dt - diss| <= 1e-6 |diss| + 1e-10 after the differencing burn-in
    p, eq = setup
    R0 = eq.R_star * 1.003

    def rho0(r):
        y = np.asarray(r) / R0
        return eq.rho_star + 0.004 + 0.005 * phi(1, y) - 0.002 * phi(2, y)

    w0 = initial_w(p, eq, rho0, R0, 0.004, 12)
    traj = simulate_w(p, eq, w0, 10.0, tol=1e-8, dt_out=0.02)
    d = trajectory_diagnostics(traj, with_dist=False)
    sel = d["t"] >= 0.5
    res = np.abs(d["residual"][sel])
    band = 1e-6 * np.abs(d["diss_rhs"][sel]) + 1e-10
    assert np.all(res <= band)
    # diss itself is nonpositive under constant forcing
    assert np.max(d["diss_rhs"]) <= 1e-20


def test_coercivity_zero_perturbation(setup):
    p, eq = setup
    grid = RadialGrid.gauss(128)
    pr = coercivity_probe(p, eq, lambda y: 0.0 * np.asarray(y), 0.0, grid)
    assert pr.energy_gap == pytest.approx(0.0, abs=1e-14)


def test_coercivity_random_probes(setup):
    p, eq = setup
    grid = RadialGrid.gauss(192)
    rng = np.random.default_rng(77)
    thetas = []
    for _ in range(100):
        vr, rd = random_mass_preserving_perturbation(rng, 1e-3)
        pr = coercivity_probe(p, eq, vr, rd, grid)
        assert pr.energy_gap > 0
        thetas.append(pr.theta_estimate)
    assert min(thetas) > 0
    # the reported Theta-hat (median estimator) is stable (+-20%) under
    # doubling the sample
    assert np.median(thetas) == pytest.approx(np.median(thetas[:50]), rel=0.2)


def test_coercivity_ratio_to_one(setup):
    p, eq = setup
    grid = RadialGrid.gauss(192)
    rng = np.random.default_rng(78)
    for size, tol in ((1e-2, 0.05), (1e-3, 0.005), (1e-4, 0.0005)):
        vr, rd = random_mass_preserving_perturbation(rng, size)
        pr = coercivity_probe(p, eq, vr, rd, grid)
        assert pr.energy_gap / pr.quadratic_form == pytest.approx(1.0, abs=tol)


def test_coercivity_gap_exceeds_displayed_bound(setup):
    p, eq = setup
    grid = RadialGrid.gauss(192)
    rng = np.random.default_rng(79)
    for _ in range(20):
        vr, rd = random_mass_preserving_perturbation(rng, 1e-3)
        pr = coercivity_probe(p, eq, vr, rd, grid)
        assert pr.energy_gap >= pr.quadratic_bound * (1 - 1e-6)


def test_coercivity_sign_symmetry_cubic(setup):
    # gap(+vrho) - gap(-vrho) is cubic in the size
    p, eq = setup
    grid = RadialGrid.gauss(192)
    rng = np.random.default_rng(80)
    vr, rd = random_mass_preserving_perturbation(rng, 1.0)
    ratios = []
    for size in (1e-2, 5e-3):
        plus = coercivity_probe(p, eq, lambda y: size * vr(y), 0.0, grid)
        minus = coercivity_probe(p, eq, lambda y: -size * vr(y), 0.0, grid)
        ratios.append(abs(plus.energy_gap - minus.energy_gap) / size**3)
    assert ratios[0] == pytest.approx(ratios[1], rel=0.25)


def test_mass_not_preserved_guard(setup):
    p, eq = setup
    grid = RadialGrid.gauss(128)
    with pytest.raises(MassNotPreserved):
        # bypass the internal radius solve by feeding an inconsistent tol
        coercivity_probe(p, eq, lambda y: 0.01 + 0.0 * np.asarray(y), 0.0,
                         grid, mass_tol=-1.0)
