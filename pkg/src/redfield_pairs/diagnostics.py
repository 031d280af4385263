"""Positivity diagnostics for the factorized pair dynamics.

The central quantity is the eigenvalue of the evolved pair state along
``w = (1, 0, 0, -1)/sqrt(2)``, which vanishes at ``t = 0`` for the singlet and
becomes negative as soon as ``t > 0`` whenever ``beta != 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import (
    BlochVector,
    bloch_compose,
    check_hermitian,
    herm_eigh,
    herm_eigvals,
)
from .generators import GeneratorParams
from .propagation import (
    _osc,
    _product_map_any_t,
    bloch_map_matrix,
    local_map,
    make_singlet,
    make_theta,
    make_werner,
    product_map,
)

POSITIVITY_TOL = 1e-10
WITNESS = np.array([1.0, 0.0, 0.0, -1.0]) / math.sqrt(2)
WITNESS_RESIDUAL_TOL = 1e-9


class UndefinedEntropyError(ValueError):
    """Entropy requested for a matrix with significantly negative spectrum."""


# -- closed forms ---------------------------------------------------------------


def _bracket(t, gp: GeneratorParams):
    c, s = _osc(t, gp.Omega2)
    # cos^2 + (2 omega^2 - Omega^2) sin^2/Omega^2, with s = sin/Omega
    return c * c + (2 * gp.omega**2 - gp.Omega2) * s * s


def lambda_closed_form(t, gp: GeneratorParams):
    """Witness eigenvalue of the evolved singlet as a function of time."""
    t = np.asarray(t, dtype=float)
    a = gp.alpha
    val = (1 + np.exp(-4 * a * t) - 2 * np.exp(-2 * a * t) * _bracket(t, gp)) / 4
    return float(val) if val.ndim == 0 else val


def werner_lambda(t, p: float, gp: GeneratorParams):
    """Witness eigenvalue of an evolved Werner state; closed form needs ``alpha == 0``."""
    if gp.alpha != 0:
        raise ValueError("closed-form Werner eigenvalue requires alpha = 0; use werner_lambda_numeric")
    val = (1 + p * (1 - 2 * _bracket(np.asarray(t, dtype=float), gp))) / 4
    return float(val) if np.ndim(val) == 0 else val


def werner_lambda_numeric(t: float, p: float, gp: GeneratorParams) -> float:
    rho = product_map(make_werner(p).rho, t, gp)
    return float(np.real(WITNESS @ rho @ WITNESS))


def lambda_curvature_at_zero(gp: GeneratorParams, theta: float | None = None) -> float:
    """Second derivative at ``t = 0`` of the eigenvalue branch that starts at O(t^2).

    ``theta=None`` is the singlet (``-8 beta^2``); otherwise the partially
    entangled state ``cos(theta)|+-> - sin(theta)|-+>``.
    """
    if theta is None:
        return -8 * gp.beta**2
    c2 = math.cos(2 * theta) ** 2
    s2 = math.sin(2 * theta) ** 2
    return 2 * (gp.alpha**2 * c2 - 4 * gp.beta**2 * s2)


def theta_threshold(gp: GeneratorParams) -> float | None:
    """Smallest mixing angle with negative initial curvature.

    Returns ``None`` when ``beta == 0``: the curvature ``2 alpha^2 cos^2 2theta``
    is then never negative and no violation is possible.
    """
    if gp.beta == 0:
        return None
    return 0.5 * math.atan(gp.alpha / (2 * abs(gp.beta)))


def werner_threshold(gp: GeneratorParams) -> float:
    """Werner weight above which the witness eigenvalue dips below zero (``alpha == 0``)."""
    if gp.alpha != 0:
        raise ValueError("the Werner threshold is derived for alpha = 0")
    if gp.Omega2 <= 0:
        raise ValueError("the Werner threshold needs real, non-zero Omega")
    w2, b2 = gp.omega**2, gp.beta**2
    return (w2 - b2) / (w2 + 3 * b2)


# -- measurements on states -----------------------------------------------------


class WitnessEigenvalue(NamedTuple):
    value: float
    on_witness: bool
    residual: float


def lambda_from_state(rho_t) -> WitnessEigenvalue:
    """Eigenvalue of ``rho_t`` along ``(1, 0, 0, -1)/sqrt(2)``.

    When that vector is an eigenvector (residual below 1e-9) the projection is
    returned with ``on_witness=True``; otherwise the minimum eigenvalue with
    ``on_witness=False``.
    """
    rho = check_hermitian(rho_t)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 pair state")
    lam = float(np.real(WITNESS @ rho @ WITNESS))
    residual = float(np.linalg.norm(rho @ WITNESS - lam * WITNESS))
    if residual < WITNESS_RESIDUAL_TOL:
        return WitnessEigenvalue(lam, True, residual)
    return WitnessEigenvalue(float(herm_eigvals(rho)[0]), False, residual)


def small_branch_eigenvalue(rho_t) -> float:
    """Eigenvalue closest to zero.

    For a pure initial state at short times the kernel splits into two
    branches linear in ``t`` and one quadratic in ``t``; this picks the
    quadratic one, whose curvature is :func:`lambda_curvature_at_zero`.
    """
    ev = herm_eigvals(rho_t)
    return float(ev[np.argmin(np.abs(ev))])


def lambda_curvature_fd(gp: GeneratorParams, theta: float | None = None, h: float = 1e-4) -> float:
    """Central finite-difference curvature at ``t = 0`` (uses the backward map at ``-h``)."""
    rho0 = make_singlet().rho if theta is None else make_theta(theta).rho
    if theta is None:
        def branch(t):
            return float(np.real(WITNESS @ _product_map_any_t(rho0, t, gp) @ WITNESS))
    else:
        def branch(t):
            return small_branch_eigenvalue(_product_map_any_t(rho0, t, gp))
    return (branch(h) - 2 * branch(0.0) + branch(-h)) / (h * h)


@dataclass(frozen=True)
class ThresholdReport:
    predicted: float
    measured: float
    resolution: float

    @property
    def agreement(self) -> float:
        return abs(self.predicted - self.measured)

    @property
    def within_resolution(self) -> bool:
        return self.agreement <= self.resolution


def scan_theta_threshold(gp: GeneratorParams, step: float = 1e-3, h: float = 1e-4) -> ThresholdReport:
    """Locate the sign flip of the measured curvature on a uniform theta grid.

    The measured threshold is the first grid angle with negative curvature.
    """
    predicted = theta_threshold(gp)
    if predicted is None:
        raise ValueError("beta = 0: curvature never turns negative")
    grid = np.arange(0.0, math.pi / 4 + step / 2, step)
    measured = math.nan
    for th in grid:
        if lambda_curvature_fd(gp, float(th), h) < 0:
            measured = float(th)
            break
    return ThresholdReport(predicted, measured, step)


def min_werner_lambda(p: float, gp: GeneratorParams, n_grid: int = 2001, t_max: float | None = None) -> float:
    """Minimum over time of the Werner witness eigenvalue.

    For ``alpha == 0`` the closed form is minimized over one period (grid
    search refined by a bounded scalar minimization); otherwise the numeric
    path is scanned on ``[0, t_max]``.
    """
    if gp.alpha == 0:
        period = math.pi / (2 * gp.Omega)
        ts = np.linspace(0.0, period, n_grid)
        vals = werner_lambda(ts, p, gp)
        k = int(np.argmin(vals))
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, n_grid - 1)]
        res = minimize_scalar(lambda x: werner_lambda(x, p, gp), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        return float(min(vals[k], res.fun))
    if t_max is None:
        raise ValueError("t_max is required when alpha != 0")
    ts = np.linspace(0.0, t_max, n_grid)
    return float(min(werner_lambda_numeric(t, p, gp) for t in ts))


def scan_werner_threshold(gp: GeneratorParams, step: float = 1e-3) -> ThresholdReport:
    """First ``p`` on a grid over ``[0, 1]`` whose minimum witness eigenvalue is negative."""
    predicted = werner_threshold(gp)
    grid = np.arange(0.0, 1.0 + step / 2, step)
    measured = math.nan
    for p in grid:
        if min_werner_lambda(float(p), gp) < -POSITIVITY_TOL:
            measured = float(p)
            break
    return ThresholdReport(predicted, measured, step)


# -- complete positivity ----------------------------------------------------------


def choi_matrix(t: float, gp: GeneratorParams) -> np.ndarray:
    """``(id (x) gamma_t)`` applied to ``|Phi><Phi|``, ``|Phi> = (|00> + |11>)/sqrt(2)``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    phi = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    return local_map(np.outer(phi, phi).astype(complex), np.eye(4), bloch_map_matrix(t, gp))


def choi_min_eigenvalue(t: float, gp: GeneratorParams) -> float:
    return float(herm_eigvals(choi_matrix(t, gp))[0])


# -- admissibility scans ----------------------------------------------------------


@dataclass(frozen=True)
class PositivityReport:
    time_grid: np.ndarray
    min_eigenvalue: np.ndarray
    first_negative_time: float | None
    witness_eigenvector: np.ndarray | None
    tol: float = POSITIVITY_TOL

    @property
    def admissible(self) -> bool:
        return self.first_negative_time is None

    @property
    def most_negative(self) -> float:
        return float(np.min(self.min_eigenvalue))


def _as_state(state) -> np.ndarray:
    if isinstance(state, BlochVector):
        return bloch_compose(state)
    return check_hermitian(state)


def _evolver(rho0: np.ndarray, gp: GeneratorParams):
    if rho0.shape == (2, 2):
        from .algebra import bloch_decompose

        eta = bloch_decompose(rho0).as_array()
        return lambda t: bloch_compose(bloch_map_matrix(t, gp) @ eta)
    if rho0.shape == (4, 4):
        return lambda t: product_map(rho0, t, gp)
    raise ValueError("state must be 2x2 or 4x4")


def _refine_crossing(f, lo: float, hi: float, tol: float, xtol: float = 1e-8) -> float:
    # f(lo) >= -tol, f(hi) < -tol
    while hi - lo > xtol:
        mid = (lo + hi) / 2
        if f(mid) < -tol:
            hi = mid
        else:
            lo = mid
    return hi


def admissible_scan(state, gp: GeneratorParams, t_max: float, n_grid: int, tol: float = POSITIVITY_TOL) -> PositivityReport:
    """Minimum eigenvalue of the evolved state on ``linspace(0, t_max, n_grid)``.

    2x2 states evolve with ``gamma_t``, 4x4 states with ``gamma_t (x) gamma_t``.
    The first negative time is refined by bisection to 1e-8.
    """
    if n_grid < 2 or t_max <= 0:
        raise ValueError("need t_max > 0 and at least two grid points")
    rho0 = _as_state(state)
    evolve = _evolver(rho0, gp)
    grid = np.linspace(0.0, t_max, n_grid)
    mins = np.empty(n_grid)
    worst_vec = None
    worst = math.inf
    for k, t in enumerate(grid):
        vals, vecs = herm_eigh(evolve(t))
        mins[k] = vals[0]
        if vals[0] < worst:
            worst = vals[0]
            worst_vec = vecs[:, 0]
    first = None
    neg = np.nonzero(mins < -tol)[0]
    if len(neg):
        k = int(neg[0])
        if k == 0:
            first = 0.0
        else:
            def f(t):
                return float(herm_eigvals(evolve(t))[0])
            first = _refine_crossing(f, float(grid[k - 1]), float(grid[k]), tol)
    return PositivityReport(grid, mins, first, worst_vec if worst < -tol else None, tol)


def first_negative_time(rho0, gp: GeneratorParams, t_max: float, n_grid: int = 1001, tol: float = POSITIVITY_TOL):
    return admissible_scan(rho0, gp, t_max, n_grid, tol).first_negative_time


# -- entropy --------------------------------------------------------------------


def entropy(rho, tol: float = POSITIVITY_TOL) -> float:
    """von Neumann entropy ``-Tr rho ln rho``; undefined on non-positive matrices."""
    ev = herm_eigvals(rho)
    if ev[0] < -tol:
        raise UndefinedEntropyError(f"entropy undefined on non-positive state (min eigenvalue {ev[0]:.3e})")
    ev = ev[ev > 0]
    return float(-np.sum(ev * np.log(ev)))


def purity(rho) -> float:
    rho = check_hermitian(rho)
    return float(np.real(np.trace(rho @ rho)))
