#!/usr/bin/env python3
"""Benchmark the JIT kernels against the pure-numpy fallbacks.

Run from the repository root:

    python benchmarks/bench_kernels.py

The same comparison can be forced package-wide by setting
``STARKJUMP_NUMBA=0`` before running anything (tests included); this script
imports both implementations directly and times them side by side.
"""

from __future__ import annotations

import time

import numpy as np

from starkjump import _kernels
from starkjump.lattice import LatticeParams, build_hamiltonian


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi():
    print("== cyclic Jacobi eigensolver ==")
    for n, reps in ((12, 200), (32, 20), (64, 4)):
        rng = np.random.default_rng(n)
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = np.ascontiguousarray((a + a.conj().T) / 2.0)

        def run_numpy():
            for _ in range(reps):
                _kernels.jacobi_eigh_numpy(h)

        def run_numba():
            for _ in range(reps):
                _kernels.jacobi_eigh_numba(h)

        t_np = timeit(run_numpy) / reps
        if _kernels.jacobi_eigh_numba is not None:
            _kernels.jacobi_eigh_numba(h)  # compile outside the timer
            t_nb = timeit(run_numba) / reps
            print(f"  dim {n:3d}: numpy {t_np * 1e3:8.3f} ms   numba {t_nb * 1e3:8.3f} ms   "
                  f"speedup {t_np / t_nb:6.1f}x")
        else:
            print(f"  dim {n:3d}: numpy {t_np * 1e3:8.3f} ms   (numba disabled)")


def bench_rk4():
    print("== RK4 Schrodinger integrator (12-site chain, dt = 1e-3) ==")
    h = build_hamiltonian(LatticeParams(12, 0.9, 0.9, 3.704, 2))
    gen = np.ascontiguousarray(-1j * h.astype(np.complex128))
    psi = np.zeros(12, dtype=np.complex128)
    psi[4] = 1.0
    for t_final in (10.0, 100.0):
        steps = int(t_final / 1e-3)
        t_np = timeit(_kernels.rk4_evolve_numpy, gen, psi, 1e-3, steps, 0.0, repeat=3)
        if _kernels.rk4_evolve_numba is not None:
            _kernels.rk4_evolve_numba(gen, psi, 1e-3, steps, 0.0)
            t_nb = timeit(_kernels.rk4_evolve_numba, gen, psi, 1e-3, steps, 0.0, repeat=3)
            print(f"  t = {t_final:6.1f} ({steps:6d} steps): numpy {t_np:7.3f} s   "
                  f"numba {t_nb:7.3f} s   speedup {t_np / t_nb:6.1f}x")
        else:
            print(f"  t = {t_final:6.1f} ({steps:6d} steps): numpy {t_np:7.3f} s   (numba disabled)")


if __name__ == "__main__":
    print(f"active backend: {_kernels.BACKEND}")
    bench_jacobi()
    bench_rk4()
