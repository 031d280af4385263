"""Small dense complex algebra for one and two qubits.

Pauli basis, Bloch decomposition, Kronecker products, partial traces and a
cyclic Jacobi eigensolver for Hermitian matrices.  Two-qubit matrices use the
ordering in which the first tensor factor is the slow index, so that
``tensor(a, b) == np.kron(a, b)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA.setflags(write=False)


class NotHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi sweeps fail to diagonalize a matrix."""


def pauli(i: int) -> np.ndarray:
    """Return the Pauli matrix ``sigma_i`` (``sigma_0`` is the identity)."""
    if not isinstance(i, (int, np.integer)) or not 0 <= i <= 3:
        raise IndexError(f"Pauli index must be 0..3, got {i!r}")
    return SIGMA[i].copy()


def _as_square(m, dims=None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if dims is not None and a.shape[0] not in dims:
        raise ValueError(f"expected dimension in {dims}, got {a.shape[0]}")
    return a


def hermiticity_defect(m) -> float:
    """Largest entry of the anti-Hermitian part ``(m - m^dagger) / 2``."""
    a = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T)) / 2) if a.size else 0.0


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian."""
    a = _as_square(m)
    defect = hermiticity_defect(a)
    if not defect <= tol:
        raise NotHermitianError(f"anti-Hermitian part {defect:.3e} exceeds {tol:.0e}")
    return a


def is_density_matrix(m, tol: float = 1e-12) -> bool:
    """Hermitian with unit trace.  Positivity is deliberately not required."""
    a = np.asarray(m, dtype=complex)
    return hermiticity_defect(a) <= tol and abs(np.trace(a) - 1) <= tol


@dataclass(frozen=True)
class BlochVector:
    """Coordinates of a 2x2 Hermitian matrix along ``sigma_0 .. sigma_3``.

    A state has ``eta0 == 1/2`` and spatial norm at most ``1/2``.
    """

    eta0: float
    eta1: float
    eta2: float
    eta3: float

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        v = np.asarray(v, dtype=float)
        if v.shape == (3,):
            return cls(0.5, *map(float, v))
        if v.shape != (4,):
            raise ValueError(f"expected 3 or 4 components, got shape {v.shape}")
        return cls(*map(float, v))

    def as_array(self) -> np.ndarray:
        return np.array([self.eta0, self.eta1, self.eta2, self.eta3])

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.eta1, self.eta2, self.eta3])

    def to_matrix(self) -> np.ndarray:
        return bloch_compose(self)


def bloch_decompose(m) -> BlochVector:
    """Decompose a Hermitian 2x2 matrix as ``sum_mu eta^mu sigma_mu``.

    ``eta^mu = Tr[m sigma_mu] / 2``.
    """
    a = check_hermitian(_as_square(m, dims=(2,)))
    eta = np.einsum("ij,kji->k", a, SIGMA).real / 2
    return BlochVector(*map(float, eta))


def bloch_compose(v) -> np.ndarray:
    """Inverse of :func:`bloch_decompose`."""
    eta = v.as_array() if isinstance(v, BlochVector) else np.asarray(v, dtype=float)
    if eta.shape != (4,):
        raise ValueError(f"expected 4 Bloch components, got shape {eta.shape}")
    return np.einsum("k,kij->ij", eta.astype(complex), SIGMA)


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices (factor 1 is the slow index)."""
    a = _as_square(a, dims=(2,))
    b = _as_square(b, dims=(2,))
    return np.kron(a, b)


def partial_trace(m, keep: int) -> np.ndarray:
    """Reduce a 4x4 two-qubit matrix to subsystem ``keep`` (1 or 2)."""
    a = _as_square(m, dims=(4,)).reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ikjk->ij", a)
    if keep == 2:
        return np.einsum("kikj->ij", a)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


def pair_coords(rho) -> np.ndarray:
    """Real 4x4 array ``T`` with ``rho = sum T[mu, nu] sigma_mu (x) sigma_nu``.

    Complex input gives complex coordinates, which is what the linear
    extension of a Bloch map to non-Hermitian operators needs.
    """
    a = _as_square(rho, dims=(4,)).reshape(2, 2, 2, 2)
    t = np.einsum("ikjl,mji,nlk->mn", a, SIGMA, SIGMA) / 4
    if hermiticity_defect(rho) <= HERMITIAN_TOL:
        return t.real
    return t


def pair_from_coords(t) -> np.ndarray:
    """Inverse of :func:`pair_coords`."""
    t = np.asarray(t)
    out = np.einsum("mn,mij,nkl->ikjl", t.astype(complex), SIGMA, SIGMA)
    return out.reshape(4, 4)


def _eigvals_2x2(a: np.ndarray) -> np.ndarray:
    p = a[0, 0].real
    q = a[1, 1].real
    mean = (p + q) / 2
    rad = np.hypot((p - q) / 2, abs(a[0, 1]))
    return np.array([mean - rad, mean + rad])


def _jacobi(a: np.ndarray, want_vectors: bool, tol: float, max_sweeps: int):
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if want_vectors else None
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                d = apq.conjugate() / mag
                theta = (a[q, q].real - a[p, p].real) / (2 * mag)
                if abs(theta) > 1e100:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                # A <- G^dagger A G with G = diag-phase(d) . real rotation
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * d * colq
                a[:, q] = s * colp + c * d * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * d.conjugate() * rowq
                a[q, :] = s * rowp + c * d.conjugate() * rowq
                a[p, q] = a[q, p] = 0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - s * d * vq
                    v[:, q] = s * vp + c * d * vq
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")
    vals = np.diag(a).real
    order = np.argsort(vals, kind="stable")
    return vals[order], (v[:, order] if want_vectors else None)


def herm_eigvals(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix.

    2x2 inputs use the closed quadratic form; larger ones go through cyclic
    complex Jacobi rotations until the off-diagonal Frobenius norm drops
    below ``tol`` (relative to ``max(1, ||m||)``).
    """
    a = check_hermitian(m)
    if a.shape[0] == 1:
        return a.real.ravel().copy()
    if a.shape[0] == 2:
        return _eigvals_2x2(a)
    return _jacobi(a, False, tol, max_sweeps)[0]


def herm_eigh(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigenvalues (ascending) and unit eigenvectors (columns) of a Hermitian matrix."""
    a = check_hermitian(m)
    return _jacobi(a, True, tol, max_sweeps)


def min_eigenvalue(m) -> float:
    return float(herm_eigvals(m)[0])
