import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redfield_pairs.algebra import (
    SIGMA,
    BlochVector,
    ConvergenceError,
    NotHermitianError,
    bloch_compose,
    bloch_decompose,
    check_hermitian,
    herm_eigh,
    herm_eigvals,
    is_density_matrix,
    min_eigenvalue,
    pair_coords,
    pair_from_coords,
    partial_trace,
    pauli,
    tensor,
)

from conftest import random_density, random_hermitian


def test_pauli_algebra():
    for i in range(1, 4):
        assert np.allclose(pauli(i) @ pauli(i), np.eye(2))
    assert np.allclose(pauli(1) @ pauli(2), 1j * pauli(3))
    assert np.allclose(pauli(0), np.eye(2))


@pytest.mark.parametrize("bad", [-1, 4, 1.0, "x"])
def test_pauli_index_error(bad):
    with pytest.raises(IndexError):
        pauli(bad)


def test_sigma_is_read_only():
    with pytest.raises(ValueError):
        SIGMA[0, 0, 0] = 2


def test_bloch_of_known_states():
    assert bloch_decompose(np.eye(2) / 2) == BlochVector(0.5, 0, 0, 0)
    assert bloch_decompose(np.diag([1, 0])) == BlochVector(0.5, 0, 0, 0.5)
    plus = np.full((2, 2), 0.5)
    assert np.allclose(bloch_decompose(plus).as_array(), [0.5, 0.5, 0, 0])


def test_bloch_round_trip(rng):
    for _ in range(20):
        rho = random_density(2, rng)
        v = bloch_decompose(rho)
        assert abs(v.eta0 - 0.5) < 1e-15
        assert np.linalg.norm(v.spatial) <= 0.5 + 1e-12
        assert np.allclose(v.to_matrix(), rho, atol=1e-14)


def test_bloch_vector_from_array():
    assert BlochVector.from_array([0.1, 0.2, 0.3]).eta0 == 0.5
    with pytest.raises(ValueError):
        BlochVector.from_array([1, 2])
    with pytest.raises(ValueError):
        bloch_compose([1, 2, 3])


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        bloch_decompose(np.array([[1, 1], [0, 0]]))
    with pytest.raises(NotHermitianError):
        check_hermitian(np.array([[0, 1j], [1j, 0]]))


def test_is_density_matrix_allows_negative_spectrum():
    # positivity may fail under the dynamics studied here, so it is not part of the check
    assert is_density_matrix(np.diag([1.2, -0.2]))
    assert not is_density_matrix(np.diag([1.0, 0.5]))


def test_tensor_is_kron(rng):
    a, b = random_hermitian(2, rng), random_hermitian(2, rng)
    assert np.array_equal(tensor(a, b), np.kron(a, b))
    with pytest.raises(ValueError):
        tensor(np.eye(3), np.eye(2))


def test_partial_trace_of_product(rng):
    a, b = random_density(2, rng), random_density(2, rng)
    rho = tensor(a, b)
    assert np.allclose(partial_trace(rho, 1), a, atol=1e-15)
    assert np.allclose(partial_trace(rho, 2), b, atol=1e-15)
    with pytest.raises(ValueError):
        partial_trace(rho, 3)


def test_partial_trace_of_bell_state():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(phi, phi)
    assert np.allclose(partial_trace(rho, 1), np.eye(2) / 2)
    assert np.allclose(partial_trace(rho, 2), np.eye(2) / 2)


def test_pair_coords_round_trip(rng):
    for _ in range(10):
        rho = random_density(4, rng)
        t = pair_coords(rho)
        assert t.dtype == float
        assert abs(t[0, 0] - 0.25) < 1e-15
        assert np.allclose(pair_from_coords(t), rho, atol=1e-14)
    # single-site marginals sit in the first row and column
    a, b = random_density(2, rng), random_density(2, rng)
    t = pair_coords(np.kron(a, b))
    assert np.allclose(t, np.outer(bloch_decompose(a).as_array(), bloch_decompose(b).as_array()))


@pytest.mark.parametrize("dim", [2, 3, 4, 8, 16])
def test_jacobi_against_lapack(dim, rng):
    for _ in range(5):
        m = random_hermitian(dim, rng)
        assert np.allclose(herm_eigvals(m), np.linalg.eigvalsh(m), atol=1e-12)


@pytest.mark.parametrize("dim", [3, 4, 8])
def test_jacobi_eigenvectors(dim, rng):
    m = random_hermitian(dim, rng)
    vals, vecs = herm_eigh(m)
    assert np.allclose(m @ vecs, vecs * vals, atol=1e-12)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(dim), atol=1e-12)


def test_jacobi_degenerate_and_diagonal():
    assert np.allclose(herm_eigvals(np.eye(4)), 1)
    assert np.allclose(herm_eigvals(np.diag([3.0, -1.0, 2.0, 0.0])), [-1, 0, 2, 3])
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(herm_eigvals(np.outer(singlet, singlet)), [0, 0, 0, 1], atol=1e-15)


def test_jacobi_reports_non_convergence(rng):
    with pytest.raises(ConvergenceError):
        herm_eigvals(random_hermitian(6, rng), max_sweeps=0)


def test_min_eigenvalue_sees_negativity():
    assert min_eigenvalue(np.diag([0.5, 0.6, -0.1, 0.0])) == pytest.approx(-0.1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=16, max_size=16), st.lists(st.floats(-10, 10), min_size=16, max_size=16))
def test_jacobi_property(re, im):
    g = np.array(re).reshape(4, 4) + 1j * np.array(im).reshape(4, 4)
    m = (g + g.conj().T) / 2
    scale = max(1.0, np.linalg.norm(m))
    assert np.allclose(herm_eigvals(m), np.linalg.eigvalsh(m), atol=1e-12 * scale)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_bloch_property(v):
    eta = np.array([0.5, *v])
    assert np.allclose(bloch_decompose(bloch_compose(eta)).as_array(), eta, atol=1e-15)
