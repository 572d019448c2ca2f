import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bubblelab.dynamics import WSystem
from bubblelab.equilibria import solve_equilibrium
from bubblelab.errors import ChartExceeded
from bubblelab.manifold import (J_alpha, R_double_star, h_of_alpha,
                                rho_double_star, taylor_check,
                                trivial_dynamics_bracket)
from bubblelab.model import canonical_params


@pytest.fixture(scope="module")
def setup():
    p = canonical_params()
    return p, solve_equilibrium(p, 8 * np.pi / 5)


def test_base_point(setup):
    p, eq = setup
    mp = h_of_alpha(p, eq, 0.0)
    assert mp.R_ss == pytest.approx(eq.R_star, rel=1e-14)
    assert mp.rho_ss == pytest.approx(eq.rho_star, rel=1e-14)
    assert np.max(np.abs(mp.w)) <= 1e-14


def test_chart_point_closed_form(setup):
    # alpha = 0.2: R** = (-0.2 + sqrt(4.04))/2, rho** = 1 + 0.2/R**
    p, eq = setup
    mp = h_of_alpha(p, eq, 0.2)
    assert mp.R_ss == pytest.approx(0.9049875621120890, rel=1e-13)
    assert mp.rho_ss == pytest.approx(1.2209975124224178, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(min_value=-0.9, max_value=0.9))
def test_quadratic_relation(alpha):
    p = canonical_params()
    eq = solve_equilibrium(p, 8 * np.pi / 5)
    Rss = R_double_star(eq, alpha)
    assert Rss > 0
    assert Rss**2 + alpha * Rss - eq.R_star**2 == pytest.approx(0.0, abs=1e-12)
    # pressure relation of the embedded equilibrium
    rss = rho_double_star(p, eq, alpha)
    assert p.RT * rss == pytest.approx(p.p_inf_star + 2 * p.sigma / Rss,
                                       rel=1e-12)


def test_every_chart_point_is_fixed(setup):
    p, eq = setup
    system = WSystem(p, eq, 16)
    for alpha in np.linspace(-0.1, 0.1, 20):
        w = h_of_alpha(p, eq, float(alpha), J=16).w
        assert np.max(np.abs(system.rhs(0.0, w))) <= 1e-10


def test_manifold_equals_equilibria(setup):
    p, eq = setup
    for alpha in (-0.3, -0.05, 0.02, 0.25):
        mp = h_of_alpha(p, eq, alpha)
        M = 4 * np.pi / 3 * mp.rho_ss * mp.R_ss**3
        eqM = solve_equilibrium(p, M)
        assert abs(eqM.R_star - mp.R_ss) <= 1e-10
        assert abs(eqM.rho_star - mp.rho_ss) <= 1e-10


def test_taylor_coefficients(setup):
    p, eq = setup
    d1, d2 = taylor_check(p, eq)
    assert d1 == pytest.approx(-0.5, abs=1e-6)
    assert d2 == pytest.approx(1.0 / (4.0 * eq.R_star), abs=1e-6)


def test_taylor_coefficients_r_star_2():
    # R* = 2 gives R**''(0) = 1/8 (= 2 * R**_2 with R**_2 = 1/(8 R*))
    p = canonical_params()
    eq2 = solve_equilibrium(p, 4 * np.pi / 3 * 1.1 * 8.0)
    assert eq2.R_star == pytest.approx(2.0, rel=1e-12)
    d1, d2 = taylor_check(p, eq2)
    assert d1 == pytest.approx(-0.5, abs=1e-6)
    assert d2 == pytest.approx(0.125, abs=1e-6)


def test_tangency_to_kernel(setup):
    # d/d alpha of h(alpha b) = dw/d alpha - b lies along b with slope
    # R**'(0) = -1/2, so dw/d alpha = b/2 at alpha = 0
    p, eq = setup
    from bubblelab.linearized import kernel_vectors

    kv = kernel_vectors(p, eq, 8)
    h = 1e-6
    dw = (h_of_alpha(p, eq, h, J=8).w - h_of_alpha(p, eq, -h, J=8).w) / (2 * h)
    assert np.max(np.abs((dw - kv.b) - (-0.5) * kv.b)) <= 1e-8


def test_J_vanishes_at_origin(setup):
    p, eq = setup
    assert J_alpha(p, eq, 0.0) == pytest.approx(0.0, abs=1e-15)
    # first-order vanishing: J(alpha)/alpha approaches a finite limit
    r1 = J_alpha(p, eq, 1e-2) / 1e-2
    r2 = J_alpha(p, eq, 1e-3) / 1e-3
    assert r1 == pytest.approx(r2, rel=0.01)


def test_trivial_dynamics_bracket(setup):
    p, eq = setup
    for alpha in np.linspace(-0.1 * eq.R_star, 0.1 * eq.R_star, 21):
        assert trivial_dynamics_bracket(p, eq, float(alpha)) >= 0.5


def test_chart_bound(setup):
    p, eq = setup
    with pytest.raises(ChartExceeded):
        h_of_alpha(p, eq, eq.R_star)
    with pytest.raises(ChartExceeded):
        J_alpha(p, eq, -1.5 * eq.R_star)
