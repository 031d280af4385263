"""Finite-time evolution of single qubits and factorized qubit pairs."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (
    SIGMA,
    BlochVector,
    check_hermitian,
    pair_coords,
    pair_from_coords,
)
from .generators import GeneratorParams

OMEGA_EPS = 1e-6
TRACE_DRIFT_TOL = 1e-8


class TraceDriftError(RuntimeError):
    """Numerical integration lost trace beyond tolerance."""


class OverdampedWarning(UserWarning):
    """Closed forms evaluated with imaginary Omega (hyperbolic continuation)."""


def _osc(t, omega2: float):
    """``cos(2 Omega t)`` and ``sin(2 Omega t) / Omega`` for either sign of ``Omega^2``.

    Both are entire functions of ``Omega^2``; near zero a power series in
    ``Omega^2 t^2`` replaces the removable singularity.
    """
    t = np.asarray(t, dtype=float)
    if abs(omega2) < OMEGA_EPS**2:
        z = -4 * omega2 * t * t
        c = np.zeros_like(t)
        s = np.zeros_like(t)
        term_c = np.ones_like(t)
        term_s = np.ones_like(t)
        for n in range(7):
            c = c + term_c
            s = s + term_s
            term_c = term_c * z / ((2 * n + 1) * (2 * n + 2))
            term_s = term_s * z / ((2 * n + 2) * (2 * n + 3))
        return c, 2 * t * s
    if omega2 > 0:
        w = math.sqrt(omega2)
        return np.cos(2 * w * t), np.sin(2 * w * t) / w
    k = math.sqrt(-omega2)
    return np.cosh(2 * k * t), np.sinh(2 * k * t) / k


def bloch_map_matrix(t: float, gp: GeneratorParams) -> np.ndarray:
    """4x4 real matrix of ``gamma_t`` on ``(eta0, eta1, eta2, eta3)``.

    Valid for any real ``t``; negative times give the inverse map, which the
    finite-difference diagnostics use.
    """
    a, b, w = gp.alpha, gp.beta, gp.omega
    c, s = _osc(t, gp.Omega2)
    c, s = float(c), float(s)
    e = math.exp(-a * t)
    p = np.zeros((4, 4))
    p[0, 0] = 1.0
    p[1, 1] = e * e
    p[2, 2] = e * (c - a / 2 * s)
    p[2, 3] = -e * (w + b) * s
    p[3, 2] = e * (w - b) * s
    p[3, 3] = e * (c + a / 2 * s)
    return p


def propagate_bloch_analytic(v, t: float, gp: GeneratorParams) -> BlochVector:
    """Exact single-qubit evolution ``eta(t) = gamma_t[eta]`` in Bloch coordinates."""
    if t < 0:
        raise ValueError("t must be non-negative")
    eta = v.as_array() if isinstance(v, BlochVector) else BlochVector.from_array(v).as_array()
    return BlochVector(*map(float, bloch_map_matrix(t, gp) @ eta))


def local_map(rho, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Apply Bloch maps ``p1`` and ``p2`` to the two tensor factors of ``rho``."""
    t = pair_coords(rho)
    return pair_from_coords(p1 @ t @ p2.T)


def product_map(rho, t: float, gp: GeneratorParams) -> np.ndarray:
    """``Gamma_t[rho] = (gamma_t (x) gamma_t)[rho]`` via the Pauli (x) Pauli expansion."""
    rho = check_hermitian(rho)
    if rho.shape != (4, 4):
        raise ValueError("product_map acts on 4x4 matrices")
    p = bloch_map_matrix(t, gp)
    return local_map(rho, p, p)


def _product_map_any_t(rho, t: float, gp: GeneratorParams) -> np.ndarray:
    p = bloch_map_matrix(t, gp)
    return local_map(rho, p, p)


# -- numerical integration ----------------------------------------------------


@dataclass(frozen=True)
class PropagatorResult:
    """States at sorted output times, with the method that produced them."""

    times: np.ndarray
    states: np.ndarray
    method: str

    def __len__(self):
        return len(self.times)


def _basis(dim: int) -> np.ndarray:
    if dim == 2:
        return SIGMA
    return np.array([np.kron(a, b) for a in SIGMA for b in SIGMA])


def superoperator(rhs: Callable, dim: int) -> np.ndarray:
    """Real matrix of a Hermiticity-preserving linear map on Pauli coordinates.

    Coordinates ``x`` satisfy ``rho = sum_k x_k B_k`` with ``B`` the Pauli
    (or Pauli (x) Pauli) basis, so ``x_0 = Tr(rho) / dim``.
    """
    basis = _basis(dim)
    images = np.array([rhs(b) for b in basis])
    m = np.einsum("kji,lij->kl", basis, images) / dim
    if np.max(np.abs(m.imag)) > 1e-12:
        raise ValueError("generator does not preserve Hermiticity")
    return m.real


def _rk4_step_matrix(m: np.ndarray, h: float) -> np.ndarray:
    # classical RK4 applied to x' = M x collapses to this Taylor polynomial
    k = h * m
    eye = np.eye(len(m))
    return eye + k @ (eye + k @ (eye / 2 + k @ (eye / 6 + k / 24)))


def _output_grid(t: float, times):
    if times is None:
        times = [0.0, t]
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-empty sorted list of non-negative values")
    return times


def propagate_numeric(
    rho,
    rhs: Callable,
    t: float | None = None,
    dt: float = 1e-3,
    *,
    times=None,
    time_dependent: bool = False,
) -> PropagatorResult:
    """Fixed-step classical RK4 integration of ``d rho/dt = rhs(rho)``.

    Parameters
    ----------
    rho : array_like
        Initial 2x2 or 4x4 Hermitian, unit-trace matrix.
    rhs : callable
        ``rhs(rho)`` for a time-independent generator, or ``rhs(t, rho)``
        when ``time_dependent`` is set.
    t : float, optional
        Final time; ignored if ``times`` is given.
    dt : float
        Maximum step.  Each output interval is split into equal steps no
        longer than ``dt``.
    times : array_like, optional
        Sorted output times (integration starts at 0).

    Autonomous generators are integrated on real Pauli coordinates, which
    keeps Hermiticity exact; time-dependent ones step the matrix directly and
    re-symmetrize after every step.  Trace is monitored, never renormalized.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    rho = check_hermitian(rho)
    dim = rho.shape[0]
    if dim not in (2, 4):
        raise ValueError("rho must be 2x2 or 4x4")
    times = _output_grid(t, times)
    tr0 = np.trace(rho).real
    out = np.empty((len(times), dim, dim), dtype=complex)

    if not time_dependent:
        m = superoperator(rhs, dim)
        basis = _basis(dim)
        x = np.einsum("kji,ij->k", basis, rho).real / dim
        cache: dict[float, np.ndarray] = {}
        now = 0.0
        for n, target in enumerate(times):
            span = target - now
            if span > 0:
                steps = max(1, math.ceil(span / dt - 1e-9))
                h = span / steps
                if h not in cache:
                    cache[h] = _rk4_step_matrix(m, h)
                step = cache[h]
                for _ in range(steps):
                    x = step @ x
                _check_trace(x[0] * dim, tr0, target)
                now = target
            out[n] = np.einsum("k,kij->ij", x, basis)
        return PropagatorResult(times, out, "rk4")

    state = rho.copy()
    now = 0.0
    for n, target in enumerate(times):
        span = target - now
        if span > 0:
            steps = max(1, math.ceil(span / dt - 1e-9))
            h = span / steps
            for k in range(steps):
                s = now + k * h
                k1 = rhs(s, state)
                k2 = rhs(s + h / 2, state + h / 2 * k1)
                k3 = rhs(s + h / 2, state + h / 2 * k2)
                k4 = rhs(s + h, state + h * k3)
                state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                state = (state + state.conj().T) / 2
            _check_trace(np.trace(state).real, tr0, target)
            now = target
        out[n] = state
    return PropagatorResult(times, out, "rk4")


def _check_trace(tr: float, tr0: float, t: float) -> None:
    if not np.isfinite(tr):
        raise FloatingPointError(f"non-finite state at t={t}")
    if abs(tr - tr0) > TRACE_DRIFT_TOL:
        raise TraceDriftError(f"trace drifted by {tr - tr0:.3e} at t={t}")


# -- initial states -----------------------------------------------------------

KET_PLUS = np.array([1.0, 1.0]) / math.sqrt(2)
KET_MINUS = np.array([1.0, -1.0]) / math.sqrt(2)


@dataclass(frozen=True)
class PairState:
    rho: np.ndarray
    label: str
    param: float | None = None


def _pure(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def make_theta(theta: float) -> PairState:
    """``|psi_theta> = cos(theta)|+->  - sin(theta)|-+>`` with ``|+-> = |+> (x) |->``."""
    if not 0 <= theta <= math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    v = math.cos(theta) * np.kron(KET_PLUS, KET_MINUS) - math.sin(theta) * np.kron(KET_MINUS, KET_PLUS)
    return PairState(_pure(v), "theta", theta)


def make_singlet() -> PairState:
    v = (np.kron(KET_PLUS, KET_MINUS) - np.kron(KET_MINUS, KET_PLUS)) / math.sqrt(2)
    return PairState(_pure(v), "singlet")


def make_werner(p: float) -> PairState:
    """``p * singlet + (1 - p)/4 * identity`` for ``-1/3 <= p <= 1``."""
    if not -1 / 3 - 1e-15 <= p <= 1 + 1e-15:
        raise ValueError("Werner weight p must lie in [-1/3, 1]")
    rho = p * make_singlet().rho + (1 - p) / 4 * np.eye(4)
    return PairState(rho, "werner", p)


def make_product(a, b) -> PairState:
    a = a.to_matrix() if isinstance(a, BlochVector) else np.asarray(a, dtype=complex)
    b = b.to_matrix() if isinstance(b, BlochVector) else np.asarray(b, dtype=complex)
    return PairState(np.kron(a, b), "product")


# -- closed form for the evolved singlet -------------------------------------


def singlet_coefficients(t, gp: GeneratorParams, printed_c: bool = False):
    """``A+, A-, B+, B-, C`` defining the evolved singlet matrix.

    The off-diagonal entry is
    ``C = -i e^{-2 alpha t} sin(2 Omega t) [2 beta cos(2 Omega t)/Omega
    + alpha omega sin(2 Omega t)/Omega^2]``, which is what ``gamma_t (x) gamma_t``
    yields.  ``printed_c=True`` returns the historically quoted variant
    ``+i e^{-2 alpha t} sin(2 Omega t)[2 beta cos/Omega - alpha omega sin/Omega^2]``
    for comparison; it does not match the actual dynamics.
    """
    a, b, w = gp.alpha, gp.beta, gp.omega
    if gp.overdamped:
        warnings.warn("imaginary Omega: using hyperbolic continuation", OverdampedWarning, stacklevel=2)
    t = np.asarray(t, dtype=float)
    c, s = _osc(t, gp.Omega2)
    e2 = np.exp(-2 * a * t)
    e4 = np.exp(-4 * a * t)
    plus_bracket = (c + a / 2 * s) ** 2 + (w - b) ** 2 * s * s
    minus_bracket = (c - a / 2 * s) ** 2 + (w + b) ** 2 * s * s
    a_plus = 1 + e2 * plus_bracket
    a_minus = 1 - e2 * plus_bracket
    b_plus = -e4 + e2 * minus_bracket
    b_minus = -e4 - e2 * minus_bracket
    if printed_c:
        cc = 1j * e2 * (2 * b * s * c - a * w * s * s)
    else:
        cc = -1j * e2 * (2 * b * s * c + a * w * s * s)
    return a_plus, a_minus, b_plus, b_minus, cc


def evolve_singlet_closed_form(t: float, gp: GeneratorParams, printed_c: bool = False) -> np.ndarray:
    """Closed-form ``Gamma_t[singlet]`` as a 4x4 matrix."""
    if t < 0:
        raise ValueError("t must be non-negative")
    ap, am, bp, bm, c = (complex(x) for x in singlet_coefficients(t, gp, printed_c))
    return (
        np.array(
            [
                [am, c, c, bp],
                [-c, ap, bm, -c],
                [-c, bm, ap, -c],
                [bp, c, c, am],
            ]
        )
        / 4
    )


def singlet_eigenvalues_closed_form(t, gp: GeneratorParams) -> np.ndarray:
    """The four eigenvalues of the evolved singlet in closed form, ascending."""
    ap, am, bp, bm, c = singlet_coefficients(t, gp)
    root = np.sqrt(np.real((ap - am + bm - bp) ** 2 - 16 * c * c))
    ev = [
        (ap - bm) / 4,
        (am - bp) / 4,
        (ap + am + bp + bm + root) / 8,
        (ap + am + bp + bm - root) / 8,
    ]
    return np.sort(np.real(np.array(ev, dtype=complex)), axis=0)
