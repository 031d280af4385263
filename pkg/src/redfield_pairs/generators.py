"""Master-equation generators for one and two qubits in a fluctuating field.

The microscopic model couples each qubit's ``sigma_3`` to a Gaussian field
with exponential correlations, ``<V^A(t) V^A(s)> = g2 exp(-mu|t-s|)`` on site
and ``f2 exp(-nu|t-s|)`` across sites.  After the weak-coupling and Markov
approximations the single-qubit generator is

    L[eta] = -i[omega sigma_1, eta] + alpha (sigma_3 eta sigma_3 - eta)
             - beta (sigma_2 eta sigma_3 + sigma_3 eta sigma_2)

and the pair generator adds a cross term weighted by ``gamma`` and ``delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import SIGMA, check_hermitian

_I2 = SIGMA[0]
S1, S2, S3 = SIGMA[1], SIGMA[2], SIGMA[3]

# site operators sigma_i^(A) on the pair space, indexed [A-1][i]
SITE = np.array([[np.kron(s, _I2) for s in SIGMA], [np.kron(_I2, s) for s in SIGMA]])
SITE.setflags(write=False)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0

DELTA_VARIANTS = ("printed", "nu")


@dataclass(frozen=True)
class PhysicalParams:
    """Microscopic noise constants.

    ``g2`` and ``f2`` are the on-site and cross-site field variances, ``mu``
    and ``nu`` the corresponding correlation decay rates, ``omega0`` the bare
    level splitting.
    """

    g2: float
    mu: float
    omega0: float = 1.0
    f2: float = 0.0
    nu: float = 1.0

    def __post_init__(self):
        if self.g2 < 0 or self.f2 < 0:
            raise ValueError("g2 and f2 must be non-negative")
        if self.mu <= 0 or self.nu <= 0 or self.omega0 <= 0:
            raise ValueError("mu, nu and omega0 must be positive")

    def is_subdominant(self, ratio: float = 0.1) -> bool:
        """True when the cross correlations are weak and fast (f2 << g2, mu << nu)."""
        return self.f2 <= ratio * self.g2 and self.mu <= ratio * self.nu


@dataclass(frozen=True)
class GeneratorParams:
    """Constants of the Markovian generator.

    Built either from :func:`markov_params` or directly (independent-parameter
    mode), in which case ``alpha`` and ``beta`` need not come from any
    correlation function and ``alpha`` may vanish.
    """

    alpha: float
    beta: float
    omega: float
    gamma: float = 0.0
    delta: float = 0.0
    omega0: float | None = None
    derived: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    @property
    def Omega2(self) -> float:
        return self.omega**2 - self.beta**2 - self.alpha**2 / 4

    @property
    def Omega(self) -> float:
        """``sqrt(omega^2 - beta^2 - alpha^2/4)``; NaN in the overdamped regime."""
        w2 = self.Omega2
        return math.sqrt(w2) if w2 >= 0 else math.nan

    @property
    def overdamped(self) -> bool:
        return self.Omega2 < 0

    def with_(self, **changes) -> "GeneratorParams":
        from dataclasses import replace

        return replace(self, **changes)


def markov_params(p: PhysicalParams, delta_variant: str = "printed") -> GeneratorParams:
    """Markov-limit generator constants for exponential correlations.

    ``delta_variant="printed"`` uses ``f2 omega0 / (omega0^2 + mu^2)``;
    ``"nu"`` uses ``omega0^2 + nu^2`` in the denominator, which is what the
    cross-site Redfield coefficients actually produce.
    """
    if delta_variant not in DELTA_VARIANTS:
        raise ValueError(f"delta_variant must be one of {DELTA_VARIANTS}")
    w0 = p.omega0
    dmu = w0**2 + p.mu**2
    dnu = w0**2 + p.nu**2
    # grouped as in redfield_coefficients so the t -> inf limits agree bitwise
    alpha = 2 * (p.g2 * (p.mu / dmu))
    beta = p.g2 * (w0 / dmu)
    gamma = 2 * (p.f2 * (p.nu / dnu))
    delta = p.f2 * (w0 / (dmu if delta_variant == "printed" else dnu))
    return GeneratorParams(alpha, beta, w0 / 2 + beta, gamma, delta, omega0=w0, derived=True)


def rotation_matrix(t: float, omega0: float) -> np.ndarray:
    """Orthogonal 3x3 matrix ``U`` with ``e^{-itH0} sigma_i e^{itH0} = sum_j U_ij sigma_j``."""
    c = math.cos(omega0 * t)
    s = math.sin(omega0 * t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def correlation_matrices(p: PhysicalParams, lag: float) -> np.ndarray:
    """Field covariance ``W[A, B, i, j](lag) = <V_i^A(lag) V_j^B(0)>``.

    Only the third field component is non-zero.
    """
    w = np.zeros((2, 2, 3, 3))
    onsite = p.g2 * math.exp(-p.mu * abs(lag))
    cross = p.f2 * math.exp(-p.nu * abs(lag))
    w[0, 0, 2, 2] = w[1, 1, 2, 2] = onsite
    w[0, 1, 2, 2] = w[1, 0, 2, 2] = cross
    return w


@dataclass(frozen=True)
class RedfieldCoefficients:
    """``C[A, B, i, j]``, the memory integrals of the field correlations.

    Indices are zero-based: ``C[0, 0]`` is the on-site block of qubit 1.
    """

    C: np.ndarray
    t: float

    def block(self, a: int, b: int) -> np.ndarray:
        """One-based block accessor, ``block(1, 2) == C^(12)``."""
        return self.C[a - 1, b - 1]

    @property
    def symmetric(self) -> np.ndarray:
        """Symmetric parts of the two on-site blocks, shape (2, 3, 3)."""
        d = np.array([self.C[0, 0], self.C[1, 1]])
        return (d + d.transpose(0, 2, 1)) / 2

    @property
    def antisymmetric(self) -> np.ndarray:
        d = np.array([self.C[0, 0], self.C[1, 1]])
        return (d - d.transpose(0, 2, 1)) / 2


def _exp_cos_sin_integrals(rate: float, w0: float, t: float) -> tuple[float, float]:
    """``int_0^t e^{-rate s} cos(w0 s) ds`` and the matching sine integral."""
    den = rate**2 + w0**2
    if math.isinf(t):
        return rate / den, w0 / den
    e = math.exp(-rate * t)
    c = math.cos(w0 * t)
    s = math.sin(w0 * t)
    return (rate - e * (rate * c - w0 * s)) / den, (w0 - e * (rate * s + w0 * c)) / den


def redfield_coefficients(p: PhysicalParams, t: float = math.inf) -> RedfieldCoefficients:
    """Closed-form ``C_ij^(AB)(t) = sum_k int_0^t W_ik^(AB)(s) U_kj(s) ds``.

    ``t=inf`` gives the Markov limit, where ``C_33 = alpha/2`` and
    ``C_32 = -beta`` on site.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    ic, is_ = _exp_cos_sin_integrals(p.mu, p.omega0, t)
    jc, js = _exp_cos_sin_integrals(p.nu, p.omega0, t)
    c = np.zeros((2, 2, 3, 3))
    for a, b, strength, cos_int, sin_int in (
        (0, 0, p.g2, ic, is_),
        (1, 1, p.g2, ic, is_),
        (0, 1, p.f2, jc, js),
        (1, 0, p.f2, jc, js),
    ):
        # U_31 = 0, U_32 = -sin, U_33 = cos
        c[a, b, 2, 1] = -strength * sin_int
        c[a, b, 2, 2] = strength * cos_int
    return RedfieldCoefficients(c, t)


# -- single-qubit generator ---------------------------------------------------


def _apply_L_raw(eta: np.ndarray, gp: GeneratorParams) -> np.ndarray:
    h = gp.omega * S1
    out = -1j * (h @ eta - eta @ h)
    if gp.alpha:
        out += gp.alpha * (S3 @ eta @ S3 - eta)
    if gp.beta:
        out -= gp.beta * (S2 @ eta @ S3 + S3 @ eta @ S2)
    return out


def apply_L(eta, gp: GeneratorParams) -> np.ndarray:
    """Single-qubit Markovian generator ``L = L0 + L1`` applied to ``eta``."""
    eta = check_hermitian(eta)
    if eta.shape != (2, 2):
        raise ValueError("apply_L acts on 2x2 matrices")
    return _apply_L_raw(eta, gp)


def bloch_generator_matrix(gp: GeneratorParams) -> np.ndarray:
    """``L`` in Bloch coordinates: ``d(eta1, eta2, eta3)/dt = M @ (eta1, eta2, eta3)``."""
    a, b, w = gp.alpha, gp.beta, gp.omega
    return np.array(
        [
            [-2 * a, 0.0, 0.0],
            [0.0, -2 * a, -2 * (w + b)],
            [0.0, 2 * (w - b), 0.0],
        ]
    )


# -- two-qubit generators -----------------------------------------------------


def _apply_L_on_site(rho: np.ndarray, gp: GeneratorParams, site: int) -> np.ndarray:
    s1, s2, s3 = SITE[site, 1], SITE[site, 2], SITE[site, 3]
    h = gp.omega * s1
    out = -1j * (h @ rho - rho @ h)
    if gp.alpha:
        out += gp.alpha * (s3 @ rho @ s3 - rho)
    if gp.beta:
        out -= gp.beta * (s2 @ rho @ s3 + s3 @ rho @ s2)
    return out


_S3S3 = np.kron(S3, S3)
_S3S2 = np.kron(S3, S2)
_S2S3 = np.kron(S2, S3)
_S3I = np.kron(S3, _I2)
_IS3 = np.kron(_I2, S3)
_S2I = np.kron(S2, _I2)
_IS2 = np.kron(_I2, S2)


def _apply_L2_raw(rho: np.ndarray, gp: GeneratorParams) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    if gp.gamma:
        out += gp.gamma * (
            _S3S3 @ rho + rho @ _S3S3 - _S3I @ rho @ _IS3 - _IS3 @ rho @ _S3I
        )
    if gp.delta:
        out -= gp.delta * (
            _S3S2 @ rho + rho @ _S3S2
            + _S2S3 @ rho + rho @ _S2S3
            - _S3I @ rho @ _IS2
            - _IS2 @ rho @ _S3I
            - _S2I @ rho @ _IS3
            - _IS3 @ rho @ _S2I
        )
    return out


def _pair_input(rho) -> np.ndarray:
    rho = check_hermitian(rho)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit matrix")
    return rho


def apply_L2(rho, gp: GeneratorParams) -> np.ndarray:
    """Cross-site dissipator weighted by ``gamma`` and ``delta``."""
    return _apply_L2_raw(_pair_input(rho), gp)


def apply_product_generator(rho, gp: GeneratorParams) -> np.ndarray:
    """Factorized generator ``(L (x) 1 + 1 (x) L)[rho]``."""
    rho = _pair_input(rho)
    return _apply_L_on_site(rho, gp, 0) + _apply_L_on_site(rho, gp, 1)


def apply_full_generator(rho, gp: GeneratorParams) -> np.ndarray:
    """Pair generator ``(L0 + L1) (x) 1 + 1 (x) (L0 + L1) - L2``."""
    rho = _pair_input(rho)
    return _apply_L_on_site(rho, gp, 0) + _apply_L_on_site(rho, gp, 1) - _apply_L2_raw(rho, gp)


def _check_coefficients(C: RedfieldCoefficients) -> np.ndarray:
    c = np.asarray(C.C)
    if c.shape != (2, 2, 3, 3):
        raise ValueError(f"coefficient array must have shape (2, 2, 3, 3), got {c.shape}")
    if np.iscomplexobj(c):
        if np.max(np.abs(c.imag)) > 1e-14:
            raise ValueError("Redfield coefficients must be real for real, stationary correlations")
        c = c.real
    return c


def _double_commutator(rho, C: RedfieldCoefficients, omega0: float, nsites: int) -> np.ndarray:
    c = _check_coefficients(C)
    if nsites == 1:
        ops = SIGMA[None, 1:]
        h0 = omega0 / 2 * SIGMA[1]
    else:
        ops = SITE[:, 1:]
        h0 = omega0 / 2 * (SITE[0, 1] + SITE[1, 1])
    out = -1j * (h0 @ rho - rho @ h0)
    for a in range(nsites):
        for b in range(nsites):
            for i in range(3):
                for j in range(3):
                    cij = c[a, b, i, j]
                    if cij == 0:
                        continue
                    si, sj = ops[a, i], ops[b, j]
                    inner = sj @ rho - rho @ sj
                    out -= cij * (si @ inner - inner @ si)
    return out


def _split_form(rho, C: RedfieldCoefficients, omega0: float, nsites: int) -> np.ndarray:
    c = _check_coefficients(C)
    sym = (c + c.transpose(0, 1, 3, 2)) / 2
    anti = (c - c.transpose(0, 1, 3, 2)) / 2
    ops = SIGMA[None, 1:] if nsites == 1 else SITE[:, 1:]
    h = sum(omega0 / 2 * ops[a, 0] for a in range(nsites))
    for a in range(nsites):
        field_ = np.einsum("ijk,ij->k", LEVI_CIVITA, anti[a, a])
        h = h + np.einsum("k,kxy->xy", field_, ops[a])
    out = -1j * (h @ rho - rho @ h)
    for a in range(nsites):
        for i in range(3):
            for j in range(3):
                sij = sym[a, a, i, j]
                if sij == 0:
                    continue
                si, sj = ops[a, i], ops[a, j]
                prod = si @ sj
                out += sij * (2 * si @ rho @ sj - prod @ rho - rho @ prod)
    if nsites == 2:
        cross = c[0, 1] + c[1, 0].T
        for i in range(3):
            for j in range(3):
                kij = cross[i, j]
                if kij == 0:
                    continue
                s1_, s2_ = ops[0, i], ops[1, j]
                a_ = rho @ s2_
                b_ = s2_ @ rho
                out += kij * ((s1_ @ a_ - a_ @ s1_) + (b_ @ s1_ - s1_ @ b_))
    return out


def general_master_rhs(rho, C: RedfieldCoefficients, omega0: float, path: str = "split") -> np.ndarray:
    """Weak-coupling master equation for arbitrary real Redfield coefficients.

    ``path="double_commutator"`` evaluates
    ``-i[H0, rho] - sum C_ij^(AB) [sigma_i^A, [sigma_j^B, rho]]`` directly;
    ``path="split"`` evaluates the same right-hand side rewritten as a
    Hamiltonian correction built from the antisymmetric on-site parts plus
    on-site and cross-site dissipators.  Accepts 2x2 (only ``C^(11)`` used)
    and 4x4 inputs.
    """
    rho = check_hermitian(rho)
    nsites = {2: 1, 4: 2}.get(rho.shape[0])
    if nsites is None:
        raise ValueError("rho must be 2x2 or 4x4")
    if path == "split":
        return _split_form(rho, C, omega0, nsites)
    if path == "double_commutator":
        return _double_commutator(rho, C, omega0, nsites)
    raise ValueError(f"unknown path {path!r}")
