"""Hot numerical kernels: JIT-compiled fast path and a pure-numpy fallback.

The backend is selected once at import time from the ``STARKJUMP_NUMBA``
environment variable; any of ``0``, ``false``, ``off`` picks the numpy
fallback. Both paths implement the same algorithms with the same fixed
sweep/step order, so either backend satisfies the library contracts.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("STARKJUMP_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "off")

_JACOBI_MAX_SWEEPS = 100


def _pair_rotation(app: float, aqq: float, w: complex) -> tuple[float, float, complex]:
    """Rotation (c, s, phase) that annihilates the Hermitian pair element w."""
    aw = abs(w)
    phase = w / aw
    tau = (aqq - app) / (2.0 * aw)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def jacobi_eigh_numpy(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix (vectorized updates).

    Returns unsorted ``(eigenvalues, eigenvectors)``; eigenvectors are the
    columns of the accumulated unitary.
    """
    a = h.astype(np.complex128, copy=True)
    n = a.shape[0]
    q = np.eye(n, dtype=np.complex128)
    scale = float(np.sqrt((np.abs(a) ** 2).sum()))
    if scale == 0.0:
        return np.zeros(n), q
    tol = 1e-14 * scale
    for _ in range(_JACOBI_MAX_SWEEPS):
        # summing only off-diagonal squares: subtracting the diagonal from
        # the total cancels catastrophically and stalls the stop criterion
        strict_off = a - np.diag(np.diag(a))
        off = float(np.sqrt((np.abs(strict_off) ** 2).sum()))
        if off <= tol:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                w = a[p, r]
                # pivots this small cannot move the result; zeroing them
                # directly also keeps tau*tau inside the float range
                if abs(w) <= 1e-150 * max(1.0, abs(a[r, r].real - a[p, p].real)):
                    a[p, r] = 0.0
                    a[r, p] = 0.0
                    continue
                c, s, phase = _pair_rotation(a[p, p].real, a[r, r].real, w)
                pc = np.conj(phase)
                colp = a[:, p].copy()
                colr = a[:, r].copy()
                a[:, p] = c * colp - s * pc * colr
                a[:, r] = s * colp + c * pc * colr
                rowp = a[p, :].copy()
                rowr = a[r, :].copy()
                a[p, :] = c * rowp - s * phase * rowr
                a[r, :] = s * rowp + c * phase * rowr
                a[p, r] = 0.0
                a[r, p] = 0.0
                a[p, p] = a[p, p].real
                a[r, r] = a[r, r].real
                qp = q[:, p].copy()
                qr = q[:, r].copy()
                q[:, p] = c * qp - s * pc * qr
                q[:, r] = s * qp + c * pc * qr
    return np.diag(a).real.copy(), q


def rk4_evolve_numpy(
    gen: np.ndarray, psi0: np.ndarray, dt: float, n_steps: int, rem: float
) -> np.ndarray:
    """Fixed-step 4th-order Runge-Kutta integration of dpsi/dt = gen @ psi."""
    psi = psi0.astype(np.complex128, copy=True)
    for _ in range(n_steps):
        k1 = gen @ psi
        k2 = gen @ (psi + (0.5 * dt) * k1)
        k3 = gen @ (psi + (0.5 * dt) * k2)
        k4 = gen @ (psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if rem > 0.0:
        k1 = gen @ psi
        k2 = gen @ (psi + (0.5 * rem) * k1)
        k3 = gen @ (psi + (0.5 * rem) * k2)
        k4 = gen @ (psi + rem * k3)
        psi = psi + (rem / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def _jacobi_eigh_loops(h):
    # Same sweep order as jacobi_eigh_numpy, written with explicit loops so
    # numba compiles it to machine code.
    n = h.shape[0]
    a = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            a[i, j] = h[i, j]
    q = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        q[i, i] = 1.0 + 0.0j
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += abs(a[i, j]) ** 2
    scale = np.sqrt(total)
    vals = np.zeros(n)
    if scale == 0.0:
        return vals, q
    tol = 1e-14 * scale
    for _ in range(_JACOBI_MAX_SWEEPS):
        off2 = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off2 += abs(a[i, j]) ** 2
        if np.sqrt(off2) <= tol:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                w = a[p, r]
                aw = abs(w)
                if aw <= 1e-150 * max(1.0, abs(a[r, r].real - a[p, p].real)):
                    a[p, r] = 0.0
                    a[r, p] = 0.0
                    continue
                phase = w / aw
                tau = (a[r, r].real - a[p, p].real) / (2.0 * aw)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                pc = np.conj(phase)
                for k in range(n):
                    xp = a[k, p]
                    xr = a[k, r]
                    a[k, p] = c * xp - s * pc * xr
                    a[k, r] = s * xp + c * pc * xr
                for k in range(n):
                    xp = a[p, k]
                    xr = a[r, k]
                    a[p, k] = c * xp - s * phase * xr
                    a[r, k] = s * xp + c * phase * xr
                a[p, r] = 0.0
                a[r, p] = 0.0
                a[p, p] = complex(a[p, p].real, 0.0)
                a[r, r] = complex(a[r, r].real, 0.0)
                for k in range(n):
                    xp = q[k, p]
                    xr = q[k, r]
                    q[k, p] = c * xp - s * pc * xr
                    q[k, r] = s * xp + c * pc * xr
    for i in range(n):
        vals[i] = a[i, i].real
    return vals, q


def _rk4_evolve_loops(gen, psi0, dt, n_steps, rem):
    n = psi0.shape[0]
    psi = psi0.astype(np.complex128).copy()
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    steps = n_steps + (1 if rem > 0.0 else 0)
    for step in range(steps):
        hstep = dt if step < n_steps else rem
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(n):
                acc += gen[i, j] * psi[j]
            k1[i] = acc
        for i in range(n):
            tmp[i] = psi[i] + (0.5 * hstep) * k1[i]
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(n):
                acc += gen[i, j] * tmp[j]
            k2[i] = acc
        for i in range(n):
            tmp[i] = psi[i] + (0.5 * hstep) * k2[i]
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(n):
                acc += gen[i, j] * tmp[j]
            k3[i] = acc
        for i in range(n):
            tmp[i] = psi[i] + hstep * k3[i]
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(n):
                acc += gen[i, j] * tmp[j]
            k4[i] = acc
        for i in range(n):
            psi[i] = psi[i] + (hstep / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return psi


if NUMBA_ENABLED:
    from numba import njit

    jacobi_eigh_numba = njit(cache=True)(_jacobi_eigh_loops)
    rk4_evolve_numba = njit(cache=True)(_rk4_evolve_loops)
    jacobi_eigh = jacobi_eigh_numba
    rk4_evolve = rk4_evolve_numba
    BACKEND = "numba"
else:
    jacobi_eigh_numba = None
    rk4_evolve_numba = None
    jacobi_eigh = jacobi_eigh_numpy
    rk4_evolve = rk4_evolve_numpy
    BACKEND = "numpy"
