"""Monte Carlo check of the Markovian master equation.

Each qubit precesses under ``H = omega0/2 sigma_1 + V(t) sigma_3`` with
``V`` an Ornstein-Uhlenbeck field.  Trajectories are exactly unitary (the
field is held constant over each step and the 2x2 exponential is taken in
closed form), so the ensemble mean is a genuine density matrix; comparing it
to the Markovian solution measures how good the weak-coupling description is.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .algebra import SIGMA, bloch_decompose, check_hermitian, pair_coords, pair_from_coords
from .generators import GeneratorParams, PhysicalParams
from .propagation import bloch_map_matrix


@dataclass(frozen=True)
class NoisePath:
    dt: float
    values: np.ndarray
    seed: object
    tag: str

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.values))


def default_dt(mu: float, omega0: float) -> float:
    return min(1 / (50 * mu), 1 / (50 * omega0))


def _n_steps(dt: float, t_max: float) -> int:
    n = int(round(t_max / dt))
    if n < 1 or abs(n * dt - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError(f"t_max={t_max} is not a whole number of steps dt={dt}")
    return n


def _ou_from_normals(xi: np.ndarray, g2: float, mu: float, dt: float) -> np.ndarray:
    """Exact OU recursion along the last axis, started from the stationary law."""
    a = math.exp(-mu * dt)
    g = math.sqrt(g2)
    b = g * math.sqrt(1 - a * a)
    v0 = g * xi[..., :1]
    rest = lfilter([b], [1.0, -a], xi[..., 1:], axis=-1, zi=a * v0)[0]
    return np.concatenate([v0, rest], axis=-1)


def ou_path(g2: float, mu: float, dt: float, t_max: float, seed) -> NoisePath:
    """Stationary OU path with covariance ``g2 exp(-mu |tau|)`` on ``[0, t_max]``.

    ``V_{k+1} = e^{-mu dt} V_k + g sqrt(1 - e^{-2 mu dt}) xi_k``, with ``V_0``
    drawn from the stationary distribution.  ``seed`` is anything accepted by
    :func:`numpy.random.default_rng`.
    """
    if dt >= 1 / mu:
        raise ValueError("dt must be small compared with the correlation time 1/mu")
    n = _n_steps(dt, t_max)
    xi = np.random.default_rng(seed).standard_normal(n + 1)
    return NoisePath(dt, _ou_from_normals(xi, g2, mu, dt), seed, "on-site-only")


def correlated_pair_paths(g2, f2, mu, nu, dt, t_max, seed) -> tuple[NoisePath, NoisePath]:
    """Two fields sharing a common OU component.

    ``V^A = Y^A + X`` with independent ``Y^A`` (covariance ``g2 e^{-mu|tau|}``)
    and shared ``X`` (covariance ``f2 e^{-nu|tau|}``).  The cross-covariance is
    exactly ``f2 e^{-nu|tau|}``; the auto-covariance picks up the extra
    ``f2 e^{-nu|tau|}``, negligible in the regime ``f2 << g2``.
    """
    if f2 > g2:
        raise ValueError("cross-correlation strength f2 must not exceed g2")
    if dt >= 1 / mu or (f2 > 0 and dt >= 1 / nu):
        raise ValueError("dt must be small compared with the correlation times")
    n = _n_steps(dt, t_max)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    k1, k2, kx = ss.spawn(3)
    y1 = _ou_from_normals(np.random.default_rng(k1).standard_normal(n + 1), g2, mu, dt)
    y2 = _ou_from_normals(np.random.default_rng(k2).standard_normal(n + 1), g2, mu, dt)
    if f2 == 0:
        return NoisePath(dt, y1, seed, "on-site-only"), NoisePath(dt, y2, seed, "on-site-only")
    x = _ou_from_normals(np.random.default_rng(kx).standard_normal(n + 1), f2, nu, dt)
    return NoisePath(dt, y1 + x, seed, "shared-component"), NoisePath(dt, y2 + x, seed, "shared-component")


def step_unitary(v: float, omega0: float, dt: float) -> np.ndarray:
    """``exp(-i dt (omega0/2 sigma_1 + v sigma_3))`` in closed form."""
    hx = omega0 / 2
    norm = math.hypot(hx, v)
    c = math.cos(norm * dt)
    s = math.sin(norm * dt) / norm
    return c * SIGMA[0] - 1j * s * (hx * SIGMA[1] + v * SIGMA[3])


def trajectory_evolve(rho0, paths, omega0: float) -> np.ndarray:
    """Unitary evolution of one noise realization, states at every path sample.

    ``paths`` is a single :class:`NoisePath` for a 2x2 ``rho0`` or a pair of
    paths on a common grid for a 4x4 ``rho0``.  Step ``k`` uses the field
    value at its left end.
    """
    rho = check_hermitian(rho0)
    if rho.shape == (2, 2):
        if not isinstance(paths, NoisePath):
            raise ValueError("a single-qubit state needs exactly one noise path")
        fields = [paths]
    elif rho.shape == (4, 4):
        fields = [paths] if isinstance(paths, NoisePath) else list(paths)
        if len(fields) != 2:
            raise ValueError("a pair state needs two noise paths")
        if fields[0].dt != fields[1].dt or len(fields[0].values) != len(fields[1].values):
            raise ValueError("noise paths are on different grids")
    else:
        raise ValueError("rho0 must be 2x2 or 4x4")
    dt = fields[0].dt
    n = len(fields[0].values)
    out = np.empty((n,) + rho.shape, dtype=complex)
    out[0] = rho
    for k in range(n - 1):
        u = step_unitary(fields[0].values[k], omega0, dt)
        if len(fields) == 2:
            u = np.kron(u, step_unitary(fields[1].values[k], omega0, dt))
        rho = u @ rho @ u.conj().T
        out[k + 1] = rho
    return out


# -- vectorized ensemble ---------------------------------------------------------


def _rotations(v: np.ndarray, omega0: float, dt: float) -> np.ndarray:
    """SO(3) images of the step unitaries for a batch of field values.

    Conjugation by ``exp(-i dt h.sigma)`` rotates the Bloch vector by
    ``2|h| dt`` about ``h``.
    """
    hx = omega0 / 2
    norm = np.hypot(hx, v)
    nx = hx / norm
    nz = v / norm
    ang = 2 * norm * dt
    c = np.cos(ang)
    s = np.sin(ang)
    one_c = 1 - c
    r = np.empty(v.shape + (3, 3))
    r[..., 0, 0] = c + nx * nx * one_c
    r[..., 0, 1] = -nz * s
    r[..., 0, 2] = nx * nz * one_c
    r[..., 1, 0] = nz * s
    r[..., 1, 1] = c
    r[..., 1, 2] = -nx * s
    r[..., 2, 0] = nx * nz * one_c
    r[..., 2, 1] = nx * s
    r[..., 2, 2] = c + nz * nz * one_c
    return r


@dataclass(frozen=True)
class EnsembleResult:
    """Noise-averaged state on the output grid.

    ``mean_coords`` and ``stderr`` hold the Pauli coordinates other than the
    trace part: ``(eta1, eta2, eta3)`` for one qubit, the 15 non-trivial
    ``T[mu, nu]`` (row-major, ``(0, 0)`` dropped) for a pair.
    """

    times: np.ndarray
    mean_state: np.ndarray
    mean_coords: np.ndarray
    stderr: np.ndarray
    n_traj: int
    seed: object
    params: PhysicalParams


def _initial_coords(rho0: np.ndarray) -> np.ndarray:
    if rho0.shape == (2, 2):
        return bloch_decompose(rho0).as_array()
    return pair_coords(rho0)


def _output_steps(n: int, n_out: int) -> np.ndarray:
    idx = np.unique(np.round(np.linspace(0, n, n_out)).astype(int))
    return idx


def ensemble_average(
    rho0,
    n_traj: int,
    params: PhysicalParams,
    seed,
    t_max: float,
    dt: float | None = None,
    n_out: int = 21,
    batch: int = 500,
) -> EnsembleResult:
    """Average ``n_traj`` unitary trajectories over OU noise.

    Trajectory ``k`` uses the ``k``-th child of ``SeedSequence(seed)``, so its
    noise is exactly :func:`ou_path` (one qubit) or
    :func:`correlated_pair_paths` (pairs) with that child seed.  Sums are
    accumulated in trajectory order, which makes the result bitwise
    reproducible.
    """
    rho0 = check_hermitian(rho0)
    if rho0.shape not in ((2, 2), (4, 4)):
        raise ValueError("rho0 must be 2x2 or 4x4")
    if n_traj < 1:
        raise ValueError("n_traj must be positive")
    if n_traj < 100:
        warnings.warn("fewer than 100 trajectories: standard errors are unreliable", stacklevel=2)
    p = params
    dt = default_dt(p.mu, p.omega0) if dt is None else dt
    if dt >= 1 / p.mu:
        raise ValueError("dt must be small compared with 1/mu")
    n = _n_steps(dt, t_max)
    out_steps = _output_steps(n, n_out)
    out_pos = {int(s): i for i, s in enumerate(out_steps)}
    pair = rho0.shape == (4, 4)
    x0 = _initial_coords(rho0)
    ncomp = 15 if pair else 3
    total = np.zeros((len(out_steps), ncomp))
    total_sq = np.zeros((len(out_steps), ncomp))
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(n_traj)

    for start in range(0, n_traj, batch):
        kids = children[start:start + batch]
        m = len(kids)
        if pair:
            paths = [correlated_pair_paths(p.g2, p.f2, p.mu, p.nu, dt, t_max, k) for k in kids]
            v1 = np.array([a.values for a, _ in paths])
            v2 = np.array([b.values for _, b in paths])
            x = np.broadcast_to(x0, (m, 4, 4)).copy()
        else:
            xi = np.array([np.random.default_rng(k).standard_normal(n + 1) for k in kids])
            v1 = _ou_from_normals(xi, p.g2, p.mu, dt)
            x = np.broadcast_to(x0[1:], (m, 3)).copy()
        for step in range(n + 1):
            i = out_pos.get(step)
            if i is not None:
                flat = x.reshape(m, -1)[:, 1:] if pair else x
                total[i] += flat.sum(axis=0)
                total_sq[i] += (flat * flat).sum(axis=0)
            if step == n:
                break
            r1 = _rotations(v1[:, step], p.omega0, dt)
            if pair:
                r2 = _rotations(v2[:, step], p.omega0, dt)
                x[:, 1:, :] = np.einsum("bij,bjk->bik", r1, x[:, 1:, :])
                x[:, :, 1:] = np.einsum("bij,bkj->bik", x[:, :, 1:], r2)
            else:
                x = np.einsum("bij,bj->bi", r1, x)

    mean = total / n_traj
    if n_traj > 1:
        var = np.maximum(total_sq - n_traj * mean * mean, 0.0) / (n_traj - 1)
        stderr = np.sqrt(var / n_traj)
    else:
        stderr = np.full_like(mean, np.nan)
    times = out_steps * dt
    if pair:
        coords = np.concatenate([np.full((len(times), 1), 0.25), mean], axis=1).reshape(-1, 4, 4)
        states = np.array([pair_from_coords(c) for c in coords])
    else:
        states = np.einsum("tk,kij->tij", np.concatenate([np.full((len(times), 1), 0.5), mean], axis=1), SIGMA)
    return EnsembleResult(times, states, mean, stderr, n_traj, seed, p)


# -- comparison with the master equation -----------------------------------------


def markov_coords(rho0, times, gp: GeneratorParams) -> np.ndarray:
    """Markovian prediction on the same coordinates as :class:`EnsembleResult`."""
    rho0 = check_hermitian(rho0)
    x0 = _initial_coords(rho0)
    out = []
    for t in times:
        pm = bloch_map_matrix(float(t), gp)
        if rho0.shape == (2, 2):
            out.append((pm @ x0)[1:])
        else:
            out.append((pm @ x0 @ pm.T).ravel()[1:])
    return np.array(out)


@dataclass(frozen=True)
class GapReport:
    times: np.ndarray
    deviation: np.ndarray
    ratio: np.ndarray
    max_ratio: float
    systematic_gap: float


def _gap(times, mean, stderr, reference) -> GapReport:
    dev = mean - reference
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(stderr > 0, np.abs(dev) / stderr, np.where(np.abs(dev) <= 1e-12, 0.0, np.inf))
    later = times > 0
    excess = dev[later] ** 2 - np.nan_to_num(stderr[later]) ** 2
    systematic = math.sqrt(max(float(np.mean(excess)), 0.0)) if excess.size else 0.0
    return GapReport(times, dev, ratio, float(np.max(ratio)), systematic)


def markov_gap_report(ens: EnsembleResult, gp: GeneratorParams, rho0=None) -> GapReport:
    """Deviation of the ensemble mean from the Markovian solution, in standard errors.

    ``systematic_gap`` is the RMS deviation over ``t > 0`` with the expected
    statistical contribution subtracted in quadrature.
    """
    if rho0 is None:
        rho0 = ens.mean_state[0]
        if ens.times[0] != 0:
            raise ValueError("ensemble grid must start at t = 0 unless rho0 is given")
    ref = markov_coords(rho0, ens.times, gp)
    if ref.shape != ens.mean_coords.shape:
        raise ValueError("ensemble and Markovian grids do not match")
    return _gap(ens.times, ens.mean_coords, ens.stderr, ref)


def compare_coords(ens: EnsembleResult, reference: np.ndarray) -> GapReport:
    """Same statistics as :func:`markov_gap_report` against an arbitrary reference."""
    reference = np.asarray(reference)
    if reference.shape != ens.mean_coords.shape:
        raise ValueError("reference does not match the ensemble grid")
    return _gap(ens.times, ens.mean_coords, ens.stderr, reference)


@dataclass(frozen=True)
class WeakCouplingRow:
    g2: float
    t_max: float
    max_ratio: float
    systematic_gap: float


def weak_coupling_table(
    g2_values,
    mu: float,
    omega0: float,
    n_traj: int,
    seed,
    alpha_t: float = 0.5,
    n_out: int = 21,
    rho0=None,
) -> list[WeakCouplingRow]:
    """Markov gap for a sequence of coupling strengths at fixed ``alpha * t_max``.

    Holding ``alpha t`` fixed compares the runs at the same stage of the
    relaxation, so the systematic gap should shrink with ``g2``.
    """
    from .generators import markov_params

    rho0 = np.diag([1.0, 0.0]).astype(complex) if rho0 is None else rho0
    rows = []
    for g2 in g2_values:
        p = PhysicalParams(g2=g2, mu=mu, omega0=omega0)
        gp = markov_params(p)
        dt = default_dt(mu, omega0)
        t_max = dt * round(alpha_t / gp.alpha / dt)
        ens = ensemble_average(rho0, n_traj, p, seed, t_max, dt=dt, n_out=n_out)
        rep = markov_gap_report(ens, gp)
        rows.append(WeakCouplingRow(g2, t_max, rep.max_ratio, rep.systematic_gap))
    return rows


def redfield_coords(rho0, times, params: PhysicalParams, dt: float = 0.02) -> np.ndarray:
    """Time-dependent (finite-memory) Redfield prediction on the ensemble coordinates.

    Uses the closed-form ``C(t)`` instead of its ``t -> inf`` limit, so the
    initial slip that the Markovian generator misses is included.
    """
    from .generators import general_master_rhs, redfield_coefficients
    from .propagation import propagate_numeric

    rho0 = check_hermitian(rho0)

    def rhs(t, rho):
        return general_master_rhs(rho, redfield_coefficients(params, t), params.omega0)

    res = propagate_numeric(rho0, rhs, dt=dt, times=times, time_dependent=True)
    return np.array([_initial_coords(s)[1:] if s.shape == (2, 2) else pair_coords(s).ravel()[1:] for s in res.states])
