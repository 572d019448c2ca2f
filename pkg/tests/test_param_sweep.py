"""Spectral and kernel facts away from the canonical parameter point.

The acceptance battery pins one parameter set; these checks sweep surface
tension (including zero and mildly negative), liquid viscosity (both signs
of the discriminant), and the mass, asserting the structural claims: exact
kernel, one neutral eigenvalue, everything else left of -beta, and Q-roots
matching the tail-closed eigenvalues.
"""

import numpy as np
import pytest

from bubblelab.dispersion import beta_bound, find_roots, winding_count
from bubblelab.equilibria import solve_equilibrium
from bubblelab.linearized import (assemble_L, eigenvalues,
                                  eigenvalues_tail_closed,
                                  kernel_eigenvalue_count, kernel_vectors,
                                  spectral_abscissa)
from bubblelab.model import ModelParams, canonical_params, kappa_bar

SWEEP = [
    dict(sigma=0.0, mu_l=0.0, mass=8 * np.pi / 5),
    dict(sigma=-0.05, mu_l=0.0, mass=8 * np.pi / 5),
    dict(sigma=0.3, mu_l=0.0, mass=2.0),
    dict(sigma=0.1, mu_l=0.5, mass=8 * np.pi / 5),   # delta < 0
    dict(sigma=0.1, mu_l=3.0, mass=8 * np.pi / 5),   # delta > 0
    dict(sigma=0.1, mu_l=0.0, mass=25.0),
    dict(sigma=0.05, mu_l=0.2, mass=0.4),
]


def make(case):
    p = canonical_params(mu_l=case["mu_l"], sigma=case["sigma"])
    eq = solve_equilibrium(p, case["mass"])
    return p, eq


@pytest.mark.parametrize("case", SWEEP, ids=lambda c: f"s{c['sigma']}_m{c['mu_l']}_M{c['mass']:.3g}")
def test_kernel_and_spectrum_structure(case):
    p, eq = make(case)
    L = assemble_L(p, eq, 16)
    kv = kernel_vectors(p, eq, 16)
    assert np.max(np.abs(L.matrix @ kv.b)) <= 1e-12 * max(
        1.0, np.max(np.abs(L.matrix)))
    eigs = eigenvalues(L)
    assert kernel_eigenvalue_count(eigs) == 1
    bb = beta_bound(p, eq)
    assert bb.beta > 0
    assert spectral_abscissa(eigs) <= -bb.beta * (1 - 1e-9)


@pytest.mark.parametrize("case", SWEEP[:5], ids=lambda c: f"s{c['sigma']}_m{c['mu_l']}")
def test_q_roots_match_closed_eigs(case):
    p, eq = make(case)
    kb = kappa_bar(p, eq)
    box = (-1.05 * kb * (4 * np.pi) ** 2 - 5.0, 1.0, -25.0, 25.0)
    roots = find_roots(p, eq, box)
    assert len(roots) >= 1
    bb = beta_bound(p, eq)
    assert all(r.real <= -bb.beta * (1 - 1e-9) for r in roots)
    ev = eigenvalues_tail_closed(p, eq, 64)
    mismatch = max(float(np.min(np.abs(ev - r))) for r in roots)
    assert mismatch <= 1e-3
    assert winding_count(p, eq, (0.0, 30.0, -30.0, 30.0)) == 0


def test_viscous_pair_damped_faster():
    # raising mu_l moves the oscillatory pair deeper into the left half plane
    res = []
    for mu in (0.0, 0.2, 0.5):
        p = canonical_params(mu_l=mu)
        eq = solve_equilibrium(p, 8 * np.pi / 5)
        eigs = eigenvalues_tail_closed(p, eq, 32)
        pair = eigs[np.abs(eigs.imag) > 0.5]
        if len(pair) == 0:  # overdamped
            res.append(-np.inf)
        else:
            res.append(float(np.max(pair.real)))
    assert res[0] > res[1] > res[2]
