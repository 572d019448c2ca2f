import numpy as np
import pytest

from bubblelab.dispersion import Q0_closed
from bubblelab.equilibria import solve_equilibrium
from bubblelab.linearized import (assemble_L, cokernel_residual, eigenvalues,
                                  eigenvalues_tail_closed, generalized_matrices,
                                  kernel_eigenvalue_count, kernel_vectors,
                                  project_kernel, project_stable,
                                  spectral_abscissa)
from bubblelab.model import canonical_params, kappa_bar


@pytest.fixture(scope="module")
def setup():
    p = canonical_params()
    return p, solve_equilibrium(p, 8 * np.pi / 5)


def test_kernel_exact_at_all_truncations(setup):
    p, eq = setup
    for J in (1, 4, 16, 64):
        L = assemble_L(p, eq, J)
        kv = kernel_vectors(p, eq, J)
        assert np.max(np.abs(L.matrix @ kv.b)) <= 1e-12
        # tail closure must keep the kernel exact too
        Lc = assemble_L(p, eq, J, tail_closure=True)
        assert np.max(np.abs(Lc.matrix @ kv.b)) <= 1e-12


def test_row_layout(setup):
    p, eq = setup
    L = assemble_L(p, eq, 4).matrix
    # row 2 is d(R)/dt = Rdot
    expected = np.zeros(7)
    expected[2] = 1.0
    assert np.array_equal(L[1], expected)
    # L[3,1] in 1-based notation: R_g T_inf / (rho_l R*) = 1 canonically
    assert L[2, 0] == pytest.approx(1.0, rel=1e-14)
    assert L[2, 1] == pytest.approx(0.2, rel=1e-14)  # 2 sigma/(rho_l R*^3)
    assert L[2, 2] == pytest.approx(0.0, abs=1e-14)  # mu_l = 0
    # diagonal of the mode block: -Gamma_k Lambda_k coeff - kbar lambda_k
    kb = kappa_bar(p, eq)
    Lfull = assemble_L(p, eq, 4)
    for k in range(4):
        expect = -Lfull.Gam[k] * Lfull.Lam[k] * Lfull.coeff - kb * Lfull.lam[k]
        assert L[3 + k, 3 + k] == pytest.approx(expect, rel=1e-14)


def test_rdot_row_applied_to_state(setup):
    p, eq = setup
    L = assemble_L(p, eq, 8).matrix
    rng = np.random.default_rng(5)
    w = rng.standard_normal(11)
    assert (L @ w)[1] == pytest.approx(w[2], rel=1e-14)


def test_cokernel_residual_decay(setup):
    p, eq = setup
    deficits = {}
    for J in (4, 16, 64):
        L = assemble_L(p, eq, J)
        kv = kernel_vectors(p, eq, J)
        cr = cokernel_residual(p, L, kv)
        deficits[J] = cr.deficit
        assert cr.compensated <= 1e-10
    # ~1/J: ratio for a 4x refinement sits in the loose bracket [2, 6]
    assert 2.0 <= deficits[4] / deficits[16] <= 6.0
    assert 2.0 <= deficits[16] / deficits[64] <= 6.0
    # Richardson extrapolation of deficit*J is consistent with a finite
    # limit, so deficit -> 0
    assert deficits[64] < 0.1 * deficits[4]


def test_normalizer_and_q0(setup):
    p, eq = setup
    kv = kernel_vectors(p, eq, 16)
    assert kv.K * float(kv.b_dagger @ kv.b) == pytest.approx(1.0, abs=1e-12)
    assert float(kv.b_dagger @ kv.b) == pytest.approx(Q0_closed(p, eq), abs=1e-10)


def test_spectrum_structure(setup):
    p, eq = setup
    eigs = eigenvalues(assemble_L(p, eq, 16))
    assert kernel_eigenvalue_count(eigs) == 1
    nonzero = eigs[np.abs(eigs) > 1e-8]
    assert np.all(nonzero.real < 0)
    assert spectral_abscissa(eigs) == pytest.approx(-0.0562, abs=2e-3)


def test_deep_eigenvalues_approach_diffusive_rates(setup):
    p, eq = setup
    kb = kappa_bar(p, eq)
    eigs = eigenvalues(assemble_L(p, eq, 24))
    rel = []
    for j in (4, 10, 16):
        target = -kb * (j * np.pi) ** 2
        tau = eigs[np.argmin(np.abs(eigs - target))]
        rel.append(abs(tau + kb * (j * np.pi) ** 2) / (kb * (j * np.pi) ** 2))
    # relative offset shrinks as j grows (Gershgorin-style dominance)
    assert rel[0] > rel[1] > rel[2]
    assert rel[2] < 0.01


def test_projections(setup):
    p, eq = setup
    kv = kernel_vectors(p, eq, 12)
    rng = np.random.default_rng(11)
    w = rng.standard_normal(15)
    q1 = project_kernel(kv, w)
    q2 = project_stable(kv, w)
    assert np.max(np.abs(project_kernel(kv, q1) - q1)) <= 1e-12
    assert np.max(np.abs(project_kernel(kv, q2))) <= 1e-12
    assert np.max(np.abs(q1 + q2 - w)) <= 1e-14


def test_generalized_pencil_matches_L(setup):
    p, eq = setup
    for closure in (False, True):
        A, B = generalized_matrices(p, eq, 12, tail_closure=closure)
        L = assemble_L(p, eq, 12, tail_closure=closure)
        assert np.max(np.abs(np.linalg.solve(A, B) - L.matrix)) < 1e-12


def test_tail_closed_eigs_converge_faster(setup):
    p, eq = setup
    # reference: oscillatory pair from a large closed truncation
    ref = eigenvalues_tail_closed(p, eq, 256)
    pair_ref = ref[np.argmax(np.where(np.abs(ref.imag) > 0.5, ref.real, -np.inf))]
    for J, tol in ((16, 3e-4), (64, 6e-6)):
        ev = eigenvalues_tail_closed(p, eq, J)
        pair = ev[np.argmin(np.abs(ev - pair_ref))]
        assert abs(pair - pair_ref) < tol
    raw = eigenvalues(assemble_L(p, eq, 64))
    pair_raw = raw[np.argmin(np.abs(raw - pair_ref))]
    assert abs(pair_raw - pair_ref) > 1e-3  # raw truncation is ~1/J
