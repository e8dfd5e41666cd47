import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundlab.errors import InputError, ValidationError
from boundlab.linalg import (DenseState, HermitianOperator, entanglement_entropy, fidelity, maximally_mixed,
                             partial_trace, partial_transpose, partial_transpose_array, product_state, random_pure,
                             random_separable, random_state, realign, relative_entropy, schmidt_decompose,
                             trace_norm, von_neumann_entropy)

seeds = st.integers(0, 2**32 - 1)
dims2 = st.tuples(st.integers(2, 4), st.integers(2, 4))


def test_dense_state_validation():
    with pytest.raises(ValidationError):
        DenseState((2,), np.diag([0.5, 0.6]))
    with pytest.raises(ValidationError):
        DenseState((2,), np.diag([1.5, -0.5]))
    with pytest.raises((InputError, ValidationError)):
        DenseState((2,), np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(InputError):
        DenseState((2, 2), np.eye(3) / 3)


@settings(max_examples=30, deadline=None)
@given(seeds, dims2)
def test_partial_transpose_involution_and_spectrum(seed, dims):
    rng = np.random.default_rng(seed)
    rho = random_state(dims[0] * dims[1], rng, dims)
    a = partial_transpose_array(rho.entries, dims)
    assert np.allclose(partial_transpose_array(a, dims), rho.entries)
    # transposing both halves is a full transpose
    assert np.allclose(partial_transpose_array(a, dims, 0), rho.entries.T)
    assert np.isclose(np.trace(a), 1)


@settings(max_examples=30, deadline=None)
@given(seeds, dims2)
def test_partial_trace_of_product(seed, dims):
    rng = np.random.default_rng(seed)
    A, B = random_state(dims[0], rng), random_state(dims[1], rng)
    rho = product_state(A, B)
    assert np.allclose(partial_trace(rho, [0]).entries, A.entries)
    assert np.allclose(partial_trace(rho, [1]).entries, B.entries)


def test_partial_trace_three_parties(rng):
    s = [random_state(d, rng) for d in (2, 3, 2)]
    rho = product_state(*s)
    assert np.allclose(partial_trace(rho, [0, 2]).entries, np.kron(s[0].entries, s[2].entries))


def test_realign_product_norm(rng):
    A, B = random_state(3, rng), random_state(3, rng)
    expected = np.linalg.norm(A.entries) * np.linalg.norm(B.entries)
    assert trace_norm(realign(product_state(A, B))) == pytest.approx(expected)


@settings(max_examples=25, deadline=None)
@given(seeds, dims2)
def test_schmidt_roundtrip(seed, dims):
    rng = np.random.default_rng(seed)
    psi = random_pure(dims[0] * dims[1], rng)
    sd = schmidt_decompose(psi, dims)
    assert np.allclose(sd.reconstruct(), psi)
    assert np.isclose(np.sum(sd.coefficients ** 2), 1)


def test_entropies(rng):
    d = 3
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    assert entanglement_entropy(phi, (d, d)) == pytest.approx(np.log2(d))
    assert von_neumann_entropy(maximally_mixed((2, 2))) == pytest.approx(2.0)
    prod = np.kron(random_pure(2, rng), random_pure(2, rng))
    assert entanglement_entropy(prod, (2, 2)) == pytest.approx(0.0, abs=1e-9)


def test_relative_entropy_and_fidelity(rng):
    rho = random_state(4, rng)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-9)
    assert fidelity(rho, rho) == pytest.approx(1.0)
    pure = DenseState.from_vector(np.array([1, 0]), (2,))
    other = DenseState.from_vector(np.array([0, 1]), (2,))
    assert relative_entropy(pure, other) == np.inf
    assert fidelity(pure, other) == pytest.approx(0.0, abs=1e-12)


def test_random_separable_is_ppt(rng):
    for _ in range(20):
        rho = random_separable(2, 3, rng)
        assert np.linalg.eigvalsh(partial_transpose(rho).entries)[0] > -1e-12


def test_hermitian_operator_expectation(rng):
    H = HermitianOperator((2,), np.diag([1.0, -1.0]))
    assert H.expectation(DenseState((2,), np.diag([0.25, 0.75]))) == pytest.approx(-0.5)


def test_realign_reference_values():
    d = 3
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    assert trace_norm(realign(DenseState.from_vector(phi, (d, d)))) == pytest.approx(d)
    assert trace_norm(realign(maximally_mixed((d, d)))) == pytest.approx(1 / d)
    prod = DenseState.from_vector(np.kron([0.6, 0.8j, 0], [1, 1, 1]) / np.sqrt(3), (d, d))
    assert trace_norm(realign(prod)) == pytest.approx(1.0)
