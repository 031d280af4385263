import math

import numpy as np
import pytest
from scipy.linalg import expm

from redfield_pairs.algebra import bloch_compose, bloch_decompose, herm_eigvals, pair_coords, partial_trace
from redfield_pairs.generators import GeneratorParams, apply_L, apply_product_generator, bloch_generator_matrix
from redfield_pairs.propagation import (
    OverdampedWarning,
    TraceDriftError,
    bloch_map_matrix,
    evolve_singlet_closed_form,
    local_map,
    make_product,
    make_singlet,
    make_theta,
    make_werner,
    product_map,
    propagate_bloch_analytic,
    propagate_numeric,
    singlet_coefficients,
    singlet_eigenvalues_closed_form,
    superoperator,
)

from conftest import random_density

CASES = [
    GeneratorParams(0.1, 0.3, 1.0),
    GeneratorParams(0.5, 0.2, 1.0),
    GeneratorParams(0.01, 0.005, 0.505),
    GeneratorParams(0.0, 0.5, 1.0),
    GeneratorParams(0.4, 1.2, 1.0),  # overdamped
    GeneratorParams(0.0, 1.0, 1.0),  # Omega = 0
]


def expm_oracle(t, gp):
    out = np.eye(4)
    out[1:, 1:] = expm(bloch_generator_matrix(gp) * t)
    return out


@pytest.mark.parametrize("gp", CASES)
def test_bloch_map_against_expm(gp):
    for t in (0.0, 0.05, 1.0, 3.7, 10.0):
        assert np.allclose(bloch_map_matrix(t, gp), expm_oracle(t, gp), atol=1e-12, rtol=1e-12)


def test_near_critical_series_branch():
    gp = GeneratorParams(0.0, 1.0, math.sqrt(1 + 1e-14))
    assert np.allclose(bloch_map_matrix(2.0, gp), expm_oracle(2.0, gp), atol=1e-12)


def test_bloch_map_identity_and_semigroup():
    gp = CASES[0]
    assert np.array_equal(bloch_map_matrix(0.0, gp), np.eye(4))
    assert np.allclose(bloch_map_matrix(1.3, gp) @ bloch_map_matrix(0.4, gp), bloch_map_matrix(1.7, gp))
    assert np.allclose(bloch_map_matrix(-0.5, gp) @ bloch_map_matrix(0.5, gp), np.eye(4))


def test_analytic_propagation():
    v = propagate_bloch_analytic(bloch_decompose(np.diag([1.0, 0.0])), 2.0, CASES[0])
    assert v.eta0 == 0.5
    with pytest.raises(ValueError):
        propagate_bloch_analytic(v, -1.0, CASES[0])


def test_no_dissipation_is_rotation():
    gp = GeneratorParams(0.0, 0.0, 1.0)
    m = bloch_map_matrix(0.9, gp)[1:, 1:]
    assert np.allclose(m @ m.T, np.eye(3))


@pytest.mark.parametrize("gp", CASES[:3])
def test_rk4_matches_analytic(gp):
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    times = np.linspace(0, 10, 101)
    res = propagate_numeric(rho0, lambda r: apply_L(r, gp), dt=1e-2, times=times)
    eta0 = bloch_decompose(rho0).as_array()
    for t, s in zip(times, res.states):
        assert np.max(np.abs(bloch_decompose(s).as_array() - bloch_map_matrix(t, gp) @ eta0)) < 1e-8


def test_time_dependent_path_agrees_with_autonomous():
    gp = CASES[0]
    rho0 = make_singlet().rho
    a = propagate_numeric(rho0, lambda r: apply_product_generator(r, gp), t=2.0, dt=1e-2)
    b = propagate_numeric(rho0, lambda t, r: apply_product_generator(r, gp), t=2.0, dt=1e-2, time_dependent=True)
    assert np.allclose(a.states, b.states, atol=1e-12)
    assert np.allclose(a.states[-1], product_map(rho0, 2.0, gp), atol=1e-10)


def test_trace_drift_is_reported():
    def leaky(r):
        return -0.1 * r

    with pytest.raises(TraceDriftError):
        propagate_numeric(np.eye(2) / 2, leaky, t=1.0)


def test_superoperator_rejects_non_hermitian_maps():
    with pytest.raises(ValueError):
        superoperator(lambda r: 1j * r, 2)


def test_bad_arguments():
    with pytest.raises(ValueError):
        propagate_numeric(np.eye(2) / 2, lambda r: 0 * r, t=1.0, dt=0)
    with pytest.raises(ValueError):
        propagate_numeric(np.eye(2) / 2, lambda r: 0 * r, times=[1.0, 0.5])
    with pytest.raises(ValueError):
        propagate_numeric(np.eye(3) / 3, lambda r: 0 * r, t=1.0)


def test_product_map_against_superoperator_exponential(rng):
    gp = CASES[0]
    s = superoperator(lambda r: apply_product_generator(r, gp), 4)
    rho = random_density(4, rng)
    x = pair_coords(rho).ravel()
    t = 1.7
    ref = (expm(s * t) @ x).reshape(4, 4)
    assert np.allclose(pair_coords(product_map(rho, t, gp)), ref, atol=1e-12)


def test_local_map_preserves_products(rng):
    gp = CASES[1]
    a, b = random_density(2, rng), random_density(2, rng)
    out = product_map(np.kron(a, b), 0.8, gp)
    pm = bloch_map_matrix(0.8, gp)
    a_t = bloch_compose(pm @ bloch_decompose(a).as_array())
    b_t = bloch_compose(pm @ bloch_decompose(b).as_array())
    assert np.allclose(out, np.kron(a_t, b_t), atol=1e-14)
    assert np.allclose(partial_trace(out, 1), a_t, atol=1e-14)


def test_local_map_identity(rng):
    rho = random_density(4, rng)
    assert np.allclose(local_map(rho, np.eye(4), np.eye(4)), rho)


def test_states():
    singlet = make_singlet().rho
    assert np.allclose(herm_eigvals(singlet), [0, 0, 0, 1], atol=1e-15)
    assert np.allclose(make_theta(math.pi / 4).rho, singlet)
    assert np.allclose(partial_trace(singlet, 1), np.eye(2) / 2)
    assert np.allclose(make_werner(0).rho, np.eye(4) / 4)
    assert np.allclose(herm_eigvals(make_werner(-1 / 3).rho)[0], 0, atol=1e-15)
    with pytest.raises(ValueError):
        make_werner(1.1)
    with pytest.raises(ValueError):
        make_theta(-0.1)
    prod = make_product(np.diag([1.0, 0.0]), np.eye(2) / 2)
    assert prod.rho.shape == (4, 4) and prod.label == "product"


def test_theta_state_marginal():
    # marginal of cos|+-> - sin|-+> is (1 + cos(2 theta) sigma_1) / 2
    th = 0.3
    m = partial_trace(make_theta(th).rho, 1)
    assert np.allclose(bloch_decompose(m).as_array(), [0.5, 0.5 * math.cos(2 * th), 0, 0])


@pytest.mark.parametrize("gp", CASES[:4])
def test_singlet_closed_form(gp):
    for t in (0.0, 0.2, 1.0, 5.0):
        ref = product_map(make_singlet().rho, t, gp)
        assert np.allclose(evolve_singlet_closed_form(t, gp), ref, atol=1e-14)
        assert np.allclose(singlet_eigenvalues_closed_form(t, gp), herm_eigvals(ref), atol=1e-12)


def test_printed_off_diagonal_differs_from_dynamics():
    gp = CASES[0]
    t = 0.7
    ref = product_map(make_singlet().rho, t, gp)
    assert not np.allclose(evolve_singlet_closed_form(t, gp, printed_c=True), ref, atol=1e-6)
    c_ok = singlet_coefficients(t, gp)[4]
    c_printed = singlet_coefficients(t, gp, printed_c=True)[4]
    assert c_ok != c_printed


def test_overdamped_singlet_warns():
    with pytest.warns(OverdampedWarning):
        singlet_coefficients(1.0, CASES[4])
