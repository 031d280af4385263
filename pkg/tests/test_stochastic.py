import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from redfield_pairs.algebra import SIGMA, herm_eigvals
from redfield_pairs.generators import PhysicalParams, markov_params
from redfield_pairs.propagation import make_singlet
from redfield_pairs.stochastic import (
    EnsembleResult,
    NoisePath,
    compare_coords,
    correlated_pair_paths,
    ensemble_average,
    markov_coords,
    markov_gap_report,
    ou_path,
    redfield_coords,
    step_unitary,
    trajectory_evolve,
)

GROUND = np.diag([1.0, 0.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def quiet_ensemble(*args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ensemble_average(*args, **kwargs)


def test_zero_coupling_path_is_zero():
    path = ou_path(0.0, 1.0, 0.01, 1.0, seed=1)
    assert np.all(path.values == 0)
    assert len(path.values) == 101 and path.times[-1] == pytest.approx(1.0)


def test_path_is_reproducible():
    a = ou_path(0.5, 1.0, 0.01, 2.0, seed=3)
    b = ou_path(0.5, 1.0, 0.01, 2.0, seed=3)
    c = ou_path(0.5, 1.0, 0.01, 2.0, seed=4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_path_argument_checks():
    with pytest.raises(ValueError):
        ou_path(1.0, 1.0, 1.0, 10.0, seed=0)
    with pytest.raises(ValueError):
        ou_path(1.0, 1.0, 0.3, 1.0, seed=0)
    with pytest.raises(ValueError):
        correlated_pair_paths(0.1, 0.2, 1.0, 1.0, 0.01, 1.0, seed=0)


def test_ou_recursion():
    # the recursion is the exact transition of the process
    g2, mu, dt = 0.7, 2.0, 0.05
    path = ou_path(g2, mu, dt, 1.0, seed=11)
    xi = np.random.default_rng(11).standard_normal(len(path.values))
    a = math.exp(-mu * dt)
    v = [math.sqrt(g2) * xi[0]]
    for k in range(1, len(xi)):
        v.append(a * v[-1] + math.sqrt(g2) * math.sqrt(1 - a * a) * xi[k])
    assert np.allclose(path.values, v, atol=1e-14)


def test_ou_stationary_variance():
    g2, mu, dt = 0.5, 1.0, 0.1
    v = ou_path(g2, mu, dt, 1e4, seed=5).values
    n = len(v)
    a = math.exp(-mu * dt)
    # variance of the sample second moment of an AR(1) series
    sigma = g2 * math.sqrt(2 * (1 + a * a) / (1 - a * a) / n)
    assert abs(np.mean(v * v) - g2) < 3 * sigma


def test_ou_autocovariance_at_correlation_time():
    g2, mu, dt = 0.5, 1.0, 0.05
    lag = int(round(1 / (mu * dt)))
    seeds = np.random.SeedSequence(9).spawn(4000)
    prods = np.array([(lambda v: v[0] * v[lag])(ou_path(g2, mu, dt, 1.0, s).values) for s in seeds])
    se = prods.std(ddof=1) / math.sqrt(len(prods))
    assert abs(prods.mean() - g2 / math.e) < 3 * se


def test_pair_paths_covariances():
    g2, f2, mu, nu, dt = 0.5, 0.1, 1.0, 2.0, 0.05
    seeds = np.random.SeedSequence(21).spawn(4000)
    cross, auto = [], []
    for s in seeds:
        a, b = correlated_pair_paths(g2, f2, mu, nu, dt, 0.1, s)
        cross.append(a.values[0] * b.values[0])
        auto.append(a.values[0] ** 2)
        assert a.tag == "shared-component"
    for data, target in ((np.array(cross), f2), (np.array(auto), g2 + f2)):
        se = data.std(ddof=1) / math.sqrt(len(data))
        assert abs(data.mean() - target) < 3 * se


def test_pair_paths_independent_without_cross_term():
    a, b = correlated_pair_paths(0.5, 0.0, 1.0, 1.0, 0.01, 1.0, seed=2)
    assert a.tag == "on-site-only"
    assert not np.array_equal(a.values, b.values)


def test_step_unitary_against_expm():
    for v in (0.0, 0.3, -2.0):
        h = 0.5 * 1.3 * SIGMA[1] + v * SIGMA[3]
        assert np.allclose(step_unitary(v, 1.3, 0.07), expm(-1j * 0.07 * h), atol=1e-14)


def test_zero_noise_free_precession():
    path = NoisePath(0.01, np.zeros(201), None, "on-site-only")
    out = trajectory_evolve(PLUS, path, 1.0)
    assert np.allclose(out, PLUS, atol=1e-14)
    out = trajectory_evolve(GROUND, path, 1.0)
    ref = expm(-1j * 2.0 * 0.5 * SIGMA[1])
    assert np.allclose(out[-1], ref @ GROUND @ ref.conj().T, atol=1e-12)


def test_constant_field_matches_closed_form():
    c, w0, dt = 0.4, 1.0, 0.01
    path = NoisePath(dt, np.full(501, c), None, "on-site-only")
    out = trajectory_evolve(GROUND, path, w0)
    h = w0 / 2 * SIGMA[1] + c * SIGMA[3]
    for k in (100, 500):
        u = expm(-1j * k * dt * h)
        assert np.allclose(out[k], u @ GROUND @ u.conj().T, atol=1e-10)


def test_trajectory_is_unitary():
    path = ou_path(0.5, 1.0, 0.01, 5.0, seed=1)
    for rho in trajectory_evolve(GROUND, path, 1.0):
        assert abs(np.trace(rho @ rho).real - 1) < 1e-12
        assert abs(np.trace(rho) - 1) < 1e-13
    pair = correlated_pair_paths(0.5, 0.1, 1.0, 2.0, 0.01, 2.0, seed=1)
    out = trajectory_evolve(make_singlet().rho, pair, 1.0)
    assert min(herm_eigvals(r)[0] for r in out[::20]) > -1e-12


def test_trajectory_grid_checks():
    a = NoisePath(0.01, np.zeros(11), None, "on-site-only")
    b = NoisePath(0.01, np.zeros(12), None, "on-site-only")
    with pytest.raises(ValueError):
        trajectory_evolve(make_singlet().rho, (a, b), 1.0)
    with pytest.raises(ValueError):
        trajectory_evolve(GROUND, (a, a), 1.0)
    with pytest.raises(ValueError):
        trajectory_evolve(make_singlet().rho, a, 1.0)


def test_single_trajectory_ensemble_is_the_trajectory():
    p = PhysicalParams(g2=0.05, mu=1.0, omega0=1.0)
    ens = quiet_ensemble(GROUND, 1, p, 17, 4.0, dt=0.02, n_out=201)
    child = np.random.SeedSequence(17).spawn(1)[0]
    traj = trajectory_evolve(GROUND, ou_path(p.g2, p.mu, 0.02, 4.0, child), p.omega0)
    assert np.allclose(ens.mean_state, traj, atol=1e-13)
    assert np.all(np.isnan(ens.stderr))


def test_single_pair_trajectory_ensemble():
    p = PhysicalParams(g2=0.05, mu=1.0, omega0=1.0, f2=0.01, nu=2.0)
    rho = make_singlet().rho
    ens = quiet_ensemble(rho, 1, p, 5, 2.0, dt=0.02, n_out=101)
    child = np.random.SeedSequence(5).spawn(1)[0]
    paths = correlated_pair_paths(p.g2, p.f2, p.mu, p.nu, 0.02, 2.0, child)
    assert np.allclose(ens.mean_state, trajectory_evolve(rho, paths, p.omega0), atol=1e-13)


def test_ensemble_is_deterministic_and_physical():
    p = PhysicalParams(g2=0.05, mu=1.0, omega0=1.0)
    a = ensemble_average(GROUND, 300, p, 123, 10.0, batch=128)
    b = ensemble_average(GROUND, 300, p, 123, 10.0, batch=128)
    assert np.array_equal(a.mean_coords, b.mean_coords)
    assert np.array_equal(a.stderr, b.stderr)
    for rho in a.mean_state:
        assert np.trace(rho) == 1
        assert herm_eigvals(rho)[0] >= -1e-15


def test_pair_ensemble_is_positive():
    p = PhysicalParams(g2=0.2, mu=1.0, omega0=1.0, f2=0.02, nu=2.0)
    ens = ensemble_average(make_singlet().rho, 100, p, 1, 4.0, n_out=11)
    assert ens.mean_coords.shape == (11, 15)
    for rho in ens.mean_state:
        assert herm_eigvals(rho)[0] >= -1e-14


def test_small_ensembles_warn():
    with pytest.warns(UserWarning):
        ensemble_average(GROUND, 10, PhysicalParams(g2=0.01, mu=1.0), 0, 1.0)


def test_zero_noise_ensemble_matches_coherent_markov_solution():
    p = PhysicalParams(g2=0.0, mu=1.0, omega0=1.0)
    gp = markov_params(p)
    assert gp.alpha == 0 and gp.beta == 0
    ens = ensemble_average(GROUND, 100, p, 0, 20.0, n_out=41)
    rep = markov_gap_report(ens, gp)
    assert np.max(np.abs(rep.deviation)) < 1e-10
    # stderr is pure rounding here, so only the deviation is meaningful
    assert rep.systematic_gap == 0


def test_gap_statistics_calibration():
    # a synthetic ensemble: exact Markov solution plus noise of the declared size
    p = PhysicalParams(g2=0.01, mu=1.0, omega0=1.0)
    gp = markov_params(p)
    times = np.linspace(0, 50, 41)
    exact = markov_coords(GROUND, times, gp)
    rng = np.random.default_rng(0)
    se = np.full_like(exact, 2e-3)
    se[0] = 0
    noisy = exact + se * rng.standard_normal(exact.shape)
    states = np.einsum("tk,kij->tij", np.concatenate([np.full((41, 1), 0.5), noisy], axis=1), SIGMA)
    ens = EnsembleResult(times, states, noisy, se, 1000, 0, p)
    rep = markov_gap_report(ens, gp, GROUND)
    assert rep.max_ratio < 4
    assert np.mean(rep.ratio[1:] < 3) > 0.95
    assert rep.systematic_gap < 5e-4


def test_gap_grid_mismatch():
    p = PhysicalParams(g2=0.01, mu=1.0, omega0=1.0)
    ens = ensemble_average(GROUND, 100, p, 0, 1.0, n_out=5)
    with pytest.raises(ValueError):
        compare_coords(ens, np.zeros((4, 3)))


def test_ensemble_tracks_finite_memory_redfield():
    p = PhysicalParams(g2=0.01, mu=1.0, omega0=1.0)
    ens = ensemble_average(GROUND, 2000, p, 2024, 20.0, n_out=21)
    rep = compare_coords(ens, redfield_coords(GROUND, ens.times, p))
    assert rep.max_ratio < 4.5
