import numpy as np
import pytest
from scipy.integrate import quad

from bubblelab.basis import (
    ModeTables,
    RadialGrid,
    coupling_integral,
    coupling_matrix,
    dphi,
    dphi_boundary,
    gamma_k,
    lambda_cap_j,
    lambda_j,
    lap_phi,
    phi,
    project,
    sum_gamma_sq_closed,
    synthesize,
)
from bubblelab.equilibria import solve_equilibrium
from bubblelab.errors import NonDirichlet
from bubblelab.model import canonical_params


@pytest.fixture(scope="module")
def grid():
    return RadialGrid.gauss(512)


@pytest.fixture(scope="module")
def canonical():
    p = canonical_params()
    return p, solve_equilibrium(p, 8 * np.pi / 5)


def test_phi_boundary_and_limit():
    assert phi(1, 1.0) == pytest.approx(0.0, abs=1e-14)
    assert phi(1, 0.0) == pytest.approx(np.pi / np.sqrt(2 * np.pi), rel=1e-13)
    assert phi(1, 1e-9) == pytest.approx(np.pi / np.sqrt(2 * np.pi), rel=1e-12)
    assert phi(2, 0.25) == pytest.approx(4.0 / np.sqrt(2 * np.pi), rel=1e-13)


def test_lambda_values():
    assert lambda_j(1) == pytest.approx(np.pi**2, rel=1e-15)
    assert lambda_j(2) == pytest.approx(4 * np.pi**2, rel=1e-15)
    assert lambda_j(3) == pytest.approx(9 * np.pi**2, rel=1e-15)


def test_orthonormality(grid):
    # |int phi_j phi_k - delta_jk| <= 1e-10 for j,k <= 20
    tabs = ModeTables(20, grid)
    G = tabs.Phi @ (tabs.Wvol[:, None] * tabs.Phi.T)
    assert np.max(np.abs(G - np.eye(20))) < 1e-10


def test_eigenrelation_on_grid():
    ys = np.linspace(1e-3, 1.0, 1111)
    for j in [1, 2, 5, 12, 20]:
        resid = np.abs(lap_phi(j, ys) + lambda_j(j) * phi(j, ys))
        assert resid.max() < 1e-8


def test_derivative_series_matches_closed_form():
    # central differences away from 0; leading-order series at the origin
    for j in [1, 3, 17]:
        for y in [1e-3, 0.03 / j, 0.09 / j, 0.5, 1.0]:
            h = 1e-6
            fd = (phi(j, y + h) - phi(j, y - h)) / (2 * h)
            assert dphi(j, y) == pytest.approx(fd, rel=2e-4, abs=1e-8)
        lead = -((j * np.pi) ** 3) * 1e-8 / (3 * np.sqrt(2 * np.pi))
        assert dphi(j, 1e-8) == pytest.approx(lead, rel=1e-10)


def test_boundary_derivative_finite_difference():
    # d/dy phi_j (1) = sqrt(pi/2) (-1)^j j to 1e-10, 4th-order central stencil
    for j in range(1, 21):
        h = 1e-3 / j
        ys = 1.0 + h * np.array([-2.0, -1.0, 1.0, 2.0])
        vals = phi(j, ys)
        fd = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        expected = dphi_boundary(j)
        assert fd == pytest.approx(expected, abs=1e-10 * max(1.0, abs(expected)) * 10)
        assert expected == pytest.approx(np.sqrt(np.pi / 2) * (-1) ** j * j, rel=1e-15)


def test_gamma_values(canonical):
    p, _ = canonical
    g1 = 2 * np.sqrt(2) * 0.4 / (np.sqrt(np.pi) * 1.4)
    assert gamma_k(p, 1) == pytest.approx(g1, rel=1e-13)
    assert gamma_k(p, 2) == pytest.approx(-g1 / 2, rel=1e-13)
    # quadrature oracle: Gamma_k = ((g-1)/g) * 4pi int_0^1 phi_k y^2 dy
    for k in [1, 2, 3, 7]:
        val, _ = quad(lambda y, k=k: phi(k, y) * y**2, 0, 1, limit=200)
        assert gamma_k(p, k) == pytest.approx(0.4 / 1.4 * 4 * np.pi * val, rel=1e-9)


def test_gamma_vanishes_as_gamma_to_one():
    from bubblelab.model import ModelParams

    p = ModelParams.from_gamma(kappa_g=1.0, gamma=1.0 + 1e-9, c_v=1.0, sigma=0.1,
                               mu_l=0.0, rho_l=1.0, T_inf=2.5, p_inf_star=1.0)
    assert abs(gamma_k(p, 1)) < 2e-9
    assert abs(gamma_k(p, 5)) < 2e-9


def test_lambda_cap_values(canonical):
    p, eq = canonical
    kb = 25.0 / 42.0
    l1 = (eq.R_star * kb / eq.rho_star) * np.sqrt(np.pi / 2)
    assert lambda_cap_j(p, eq, 1) == pytest.approx(l1, rel=1e-13)
    assert lambda_cap_j(p, eq, 2) == pytest.approx(-2 * l1, rel=1e-13)


def test_gamma_lambda_product_identity(canonical):
    # Gamma_j Lambda_j = 2 (gamma-1) kbar R* / (gamma rho*) for j = 1..20
    p, eq = canonical
    kb = 25.0 / 42.0
    expected = 2 * 0.4 * kb * eq.R_star / (1.4 * eq.rho_star)
    for j in range(1, 21):
        assert gamma_k(p, j) * lambda_cap_j(p, eq, j) == pytest.approx(expected, rel=1e-12)


def test_sum_gamma_sq_partial_sums(canonical):
    p, _ = canonical
    closed = sum_gamma_sq_closed(p)
    g1_sq = gamma_k(p, 1) ** 2
    for J in [10, 100, 1000]:
        partial = sum(gamma_k(p, j) ** 2 for j in range(1, J + 1))
        tail_bound = g1_sq / J
        assert 0 < closed - partial <= tail_bound
    assert closed == pytest.approx(4 * np.pi * 0.4**2 / (3 * 1.4**2), rel=1e-14)


def test_coupling_integral_closed_forms(grid):
    assert coupling_integral(1, 1) == pytest.approx(-1.5, rel=1e-15)
    assert coupling_integral(1, 2) == pytest.approx(-4.0 / 3.0, rel=1e-15)
    assert coupling_integral(2, 1) == pytest.approx(4.0 / 3.0, rel=1e-15)
    # quadrature oracle on the volume integral int y phi_k' phi_j dx
    for (j, k) in [(1, 1), (1, 2), (2, 1), (3, 5), (4, 4)]:
        vals = grid.integrate(grid.y * dphi(k, grid.y) * phi(j, grid.y))
        assert coupling_integral(j, k) == pytest.approx(vals, abs=1e-11)
    A = coupling_matrix(6)
    for k in range(1, 7):
        for j in range(1, 7):
            assert A[k - 1, j - 1] == pytest.approx(coupling_integral(j, k), rel=1e-14)


def test_project_recovers_unit_mode(grid):
    c = project(lambda y: phi(3, y), 8, grid)
    expected = np.zeros(8)
    expected[2] = 1.0
    assert np.max(np.abs(c - expected)) < 1e-10


def test_project_zero_field(grid):
    c = project(lambda y: 0.0 * y, 6, grid)
    assert np.max(np.abs(c)) == 0.0


def test_project_rejects_non_dirichlet(grid):
    with pytest.raises(NonDirichlet):
        project(lambda y: np.cos(np.pi * y / 2) + 0.5, 4, grid)


def test_round_trip_spectral_convergence(grid):
    # smooth Dirichlet field: errors fall faster than J^-2
    u = lambda y: np.sin(np.pi * y) ** 2 * (1 - y) * (0.3 + y**2)
    errs = []
    for J in [4, 8, 16, 32]:
        c = project(u, J, grid)
        resid = u(grid.y) - synthesize(c, grid.y)
        errs.append(np.sqrt(grid.integrate(resid**2)))
    errs = np.array(errs)
    rates = np.log2(errs[:-1] / errs[1:])
    assert np.all(rates > 2.0)


def test_synthesize_matches_tables(grid):
    tabs = ModeTables(5, grid)
    rng = np.random.default_rng(7)
    c = rng.standard_normal(5)
    assert np.allclose(synthesize(c, grid.y), tabs.synth(c), atol=1e-13)
