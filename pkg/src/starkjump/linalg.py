"""Dense Hermitian eigendecomposition, spectral propagators, and an
independent fixed-step Runge-Kutta integrator used as a verification oracle.

All functions are pure: inputs are never mutated, so values can be shared
freely across threads. Matrices are plain ``numpy`` arrays; the only
structured value is :class:`SpectralDecomposition`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import jacobi_eigh, rk4_evolve

HERMITICITY_ATOL = 1e-12
UNITARITY_ATOL = 1e-10
NORM_ATOL = 1e-12


def hermiticity_defect(h: np.ndarray) -> tuple[float, int, int]:
    """Worst |H[i,j] - conj(H[j,i])| together with its index pair."""
    d = np.abs(h - h.conj().T)
    i, j = np.unravel_index(int(np.argmax(d)), d.shape)
    return float(d[i, j]), int(i), int(j)


def require_hermitian(h: np.ndarray, atol: float = HERMITICITY_ATOL) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] < 2:
        raise ValueError("matrix dimension must be at least 2")
    defect, i, j = hermiticity_defect(h)
    if defect > atol:
        raise ValueError(
            f"matrix is not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = {defect:.3e} "
            f"exceeds {atol:.1e}"
        )
    return h


def unitarity_defect(u: np.ndarray) -> float:
    """Max-norm of U†U - I."""
    u = np.asarray(u)
    n = u.shape[0]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(n))))


def require_unitary(u: np.ndarray, atol: float = UNITARITY_ATOL) -> np.ndarray:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > atol:
        raise ValueError(f"matrix is not unitary: max|U†U - I| = {defect:.3e} exceeds {atol:.1e}")
    return u


def require_state(psi: np.ndarray, atol: float = NORM_ATOL) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.ndim != 1:
        raise ValueError("state must be a 1-D amplitude vector")
    norm2 = float(np.sum(np.abs(psi) ** 2))
    if abs(norm2 - 1.0) > atol:
        raise ValueError(f"state is not normalized: sum |a_n|^2 = {norm2!r}")
    return psi


def basis_state(dim: int, site: int) -> np.ndarray:
    """Unit amplitude on a single site."""
    if not 0 <= site < dim:
        raise ValueError(f"site {site} out of range for dimension {dim}")
    psi = np.zeros(dim, dtype=np.complex128)
    psi[site] = 1.0
    return psi


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (ascending) and the matching unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def spectral_range(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def eig_hermitian(h: np.ndarray) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    The sweep order is fixed, eigenvalues are sorted ascending with a stable
    sort, and each eigenvector is re-phased so its largest-magnitude
    component is real and positive; the result is therefore deterministic
    for a fixed input.
    """
    h = require_hermitian(h)
    vals, vecs = jacobi_eigh(np.ascontiguousarray(h, dtype=np.complex128))
    order = np.argsort(vals, kind="stable")
    vals = np.ascontiguousarray(vals[order])
    vecs = np.ascontiguousarray(vecs[:, order])
    n = vals.shape[0]
    pivots = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(n)]
    mags = np.abs(pivots)
    factors = np.where(mags > 0.0, np.conj(pivots) / np.where(mags > 0.0, mags, 1.0), 1.0)
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs * factors)


def propagator(spec: SpectralDecomposition, t: float) -> np.ndarray:
    """Unitary time-evolution operator exp(-iHt) from the eigendecomposition."""
    if not np.isfinite(t):
        raise ValueError("propagation time must be finite")
    q = spec.eigenvectors
    phases = np.exp(-1j * spec.eigenvalues * t)
    return (q * phases) @ q.conj().T


def apply(u: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Apply a unitary to a state; dimensions must match."""
    u = np.asarray(u)
    psi = np.asarray(psi)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if psi.shape != (u.shape[0],):
        raise ValueError(f"dimension mismatch: matrix {u.shape}, state {psi.shape}")
    return u @ psi.astype(np.complex128)


def evolve_state(spec: SpectralDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    """Spectral evolution of a single state: exp(-iHt) psi0 without forming U."""
    q = spec.eigenvectors
    coeffs = q.conj().T @ psi0.astype(np.complex128)
    return q @ (np.exp(-1j * spec.eigenvalues * t) * coeffs)


def evolve_states(spec: SpectralDecomposition, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """States at many times, one per row; vectorized over the time grid."""
    q = spec.eigenvectors
    coeffs = q.conj().T @ psi0.astype(np.complex128)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), spec.eigenvalues))
    return (phases * coeffs) @ q.T


def integrate_schrodinger(
    h: np.ndarray, psi0: np.ndarray, t_final: float, dt: float
) -> np.ndarray:
    """Classical fixed-step RK4 integration of i dpsi/dt = H psi.

    The state is renormalized only once, at the final time, so that norm
    drift over the run remains visible as an error signal.
    """
    h = require_hermitian(h)
    psi0 = require_state(psi0)
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_final < 0.0:
        raise ValueError("t_final must be non-negative")
    if dt > t_final:
        raise ValueError("dt must not exceed t_final")
    gen = np.ascontiguousarray(-1j * h.astype(np.complex128))
    n_steps = int(np.floor(t_final / dt + 1e-12))
    rem = t_final - n_steps * dt
    if rem < 1e-12 * dt:
        rem = 0.0
    psi = rk4_evolve(gen, np.ascontiguousarray(psi0, dtype=np.complex128), dt, n_steps, rem)
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2))


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-ish random unitary from a seeded QR decomposition (deterministic)."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q @ np.diag(d / np.abs(d))
