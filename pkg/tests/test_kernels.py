"""Backend equivalence: the JIT kernels and the numpy fallbacks must be
interchangeable implementations of the same algorithms."""

from __future__ import annotations

import numpy as np
import pytest

from starkjump import _kernels


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


@pytest.mark.skipif(not _kernels.NUMBA_ENABLED, reason="numba backend disabled")
def test_jacobi_backends_agree(rng):
    for n in (2, 5, 12):
        h = random_hermitian(rng, n)
        vals_a, vecs_a = _kernels.jacobi_eigh_numba(np.ascontiguousarray(h))
        vals_b, vecs_b = _kernels.jacobi_eigh_numpy(h)
        scale = max(1.0, float(np.linalg.norm(h)))
        assert np.max(np.abs(np.sort(vals_a) - np.sort(vals_b))) < 1e-12 * scale
        # both must diagonalize: Q diag Q^dagger reproduces H
        for vals, vecs in ((vals_a, vecs_a), (vals_b, vecs_b)):
            recon = (vecs * vals) @ vecs.conj().T
            assert np.max(np.abs(recon - h)) < 1e-12 * scale


@pytest.mark.skipif(not _kernels.NUMBA_ENABLED, reason="numba backend disabled")
def test_rk4_backends_agree(rng):
    h = random_hermitian(rng, 8)
    gen = np.ascontiguousarray(-1j * h)
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi /= np.linalg.norm(psi)
    psi = np.ascontiguousarray(psi)
    out_a = _kernels.rk4_evolve_numba(gen, psi, 1e-3, 2000, 0.5e-3)
    out_b = _kernels.rk4_evolve_numpy(gen, psi, 1e-3, 2000, 0.5e-3)
    assert np.max(np.abs(out_a - out_b)) < 1e-12


def test_jacobi_deterministic(rng):
    h = random_hermitian(rng, 6)
    vals1, vecs1 = _kernels.jacobi_eigh(np.ascontiguousarray(h))
    vals2, vecs2 = _kernels.jacobi_eigh(np.ascontiguousarray(h))
    assert np.array_equal(vals1, vals2)
    assert np.array_equal(vecs1, vecs2)


def test_jacobi_zero_matrix():
    vals, vecs = _kernels.jacobi_eigh_numpy(np.zeros((3, 3), dtype=complex))
    assert np.all(vals == 0.0)
    assert np.array_equal(vecs, np.eye(3))
