import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from boundlab import criteria
from boundlab.bell import (BellBasis, PhaseSpaceSymmetry, SimplexState, apply_symmetry, bell_projector,
                           coefficients_of, enclosure_contains, enumerate_subgroups, kernel_contains,
                           kernel_contains_coeffs, kernel_vertices, omega, subgroup_state, weyl_operator)
from boundlab.errors import InputError


@pytest.mark.parametrize("d", range(2, 8))
def test_weyl_unitary_and_composition(d):
    w = omega(d)
    for k in range(d):
        for l in range(d):
            W = weyl_operator(k, l, d)
            assert np.allclose(W.conj().T @ W, np.eye(d), atol=1e-12)
    A, B = weyl_operator(1, 2, d), weyl_operator(2, 1, d)
    assert np.allclose(A @ B, w ** (2 * 2) * weyl_operator(3 % d, 3 % d, d), atol=1e-12)
    # commutation phase
    assert np.allclose(A @ B, w ** (2 * 2 - 1 * 1) * B @ A, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_random_basis_is_orthonormal(d):
    basis = BellBasis.random(d, seed=5)
    V = basis.vectors()
    assert np.allclose(V.conj() @ V.T, np.eye(d * d), atol=1e-12)
    assert not basis.is_standard
    assert BellBasis.standard(d).is_standard


def test_coefficients_roundtrip(rng):
    for d in (2, 3):
        basis = BellBasis.random(d, 3)
        c = rng.dirichlet(np.ones(d * d)).reshape(d, d)
        assert np.allclose(coefficients_of(SimplexState(basis, c).to_dense(), basis), c)


def test_simplex_state_rejects_bad_coeffs():
    with pytest.raises(Exception):
        SimplexState.standard(np.full((2, 2), 0.3))
    with pytest.raises(Exception):
        SimplexState.standard(np.array([[1.2, -0.2], [0, 0]]))


@pytest.mark.parametrize("d,count", [(2, 3), (3, 4), (4, 7)])
def test_subgroup_counts(d, count):
    assert len(enumerate_subgroups(d)) == count


def test_kernel_vertices_d3():
    V = kernel_vertices(3)
    assert V.shape == (9, 12)
    assert np.allclose(V.sum(axis=0), 1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_subgroup_states_separable_and_in_kernel(d):
    for S in enumerate_subgroups(d):
        s = subgroup_state(S, d)
        assert kernel_contains(s).contained
        assert not criteria.ppt_check(s.to_dense()).fired


def test_kernel_rejects_pure_bell_state():
    c = np.zeros((3, 3))
    c[0, 0] = 1
    s = SimplexState.standard(c)
    assert not kernel_contains(s).contained
    assert not enclosure_contains(s)
    mm = SimplexState.standard(np.full((3, 3), 1 / 9))
    cert = kernel_contains(mm)
    assert cert.contained and np.allclose(cert.vertices @ cert.weights, mm.coeffs.ravel())


def test_kernel_requires_standard_basis():
    with pytest.raises(InputError):
        kernel_contains(SimplexState(BellBasis.random(3, 1), np.full((3, 3), 1 / 9)))


def test_kernel_lp_matches_scipy(rng):
    V = kernel_vertices(3)
    for _ in range(200):
        c = rng.dirichlet(np.full(9, 0.7))
        ref = linprog(np.zeros(V.shape[1]), A_eq=V, b_eq=c, bounds=(0, None), method="highs").status == 0
        assert kernel_contains_coeffs(c, 3).contained == ref


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(PhaseSpaceSymmetry.KINDS), st.integers(0, 2), st.integers(0, 2))
def test_symmetries_preserve_criteria(seed, kind, p, q):
    c = np.random.default_rng(seed).dirichlet(np.ones(9)).reshape(3, 3)
    s = SimplexState.standard(c)
    t = apply_symmetry(PhaseSpaceSymmetry(kind, 3, p, q), s)
    assert np.isclose(t.coeffs.sum(), 1)
    for check in (criteria.ppt_check, criteria.realignment_check):
        assert check(s.to_dense()).score == pytest.approx(check(t.to_dense()).score, abs=1e-9)
    assert kernel_contains(s).contained == kernel_contains(t).contained


def test_bell_projector_is_rank_one():
    P = bell_projector(1, 2, BellBasis.standard(3)).entries
    assert np.allclose(P @ P, P)
    assert np.isclose(np.trace(P), 1)
