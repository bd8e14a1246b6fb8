from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

from starkjump.dynamics import (
    IntensityMap,
    NoOscillationError,
    evolve_intensity,
    extract_period,
    jump_fidelity,
    transfer_max,
)
from starkjump.lattice import LatticeParams, bs_correction, build_hamiltonian
from starkjump.linalg import eig_hermitian, propagator
from starkjump.spectrum import delta_min

FLOP_2x2 = np.array([[0.5, -0.5], [-0.5, 0.5]])


def flop_map(cycles=2.0, per_period=1024):
    period = 2.0 * math.pi
    n = int(cycles * per_period)
    grid = cycles * period * np.arange(n + 1) / n
    return evolve_intensity(FLOP_2x2, 0, grid), period


class TestEvolveIntensity:
    def test_single_time_zero(self):
        imap = evolve_intensity(FLOP_2x2, 1, np.array([0.0]))
        assert np.allclose(imap.intensities, [[0.0, 1.0]], atol=1e-12)

    def test_two_level_sine_squared(self):
        imap, _ = flop_map()
        expected = np.sin(0.5 * imap.times) ** 2
        assert np.max(np.abs(imap.site_trace(1) - expected)) < 1e-12

    def test_order_two_lattice_oscillates_between_partner_sites(self, tuned_params):
        p = tuned_params(2, 0.9)
        h = build_hamiltonian(p)
        period = delta_min(eig_hermitian(h)).period
        grid = 2.0 * period * np.arange(1025) / 1024
        imap = evolve_intensity(h, 4, grid)
        peaks = imap.intensities.max(axis=0)
        assert peaks[9] > 0.75
        bystanders = [peaks[s] for s in range(12) if s not in (4, 9)]
        assert max(bystanders) < 0.25

    def test_row_normalization(self, tuned_params):
        h = build_hamiltonian(tuned_params(1, 0.9))
        grid = np.linspace(0.0, 100.0, 257)
        imap = evolve_intensity(h, 4, grid)
        assert np.max(np.abs(imap.intensities.sum(axis=1) - 1.0)) < 1e-9

    def test_time_reversal(self, tuned_params):
        h = build_hamiltonian(tuned_params(1, 0.9))
        spec = eig_hermitian(h)
        psi0 = np.zeros(12, complex)
        psi0[4] = 1.0
        forward = propagator(spec, 37.0) @ psi0
        back = propagator(spec, -37.0) @ forward
        assert np.max(np.abs(back - psi0)) < 1e-10

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            evolve_intensity(FLOP_2x2, 0, np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            evolve_intensity(FLOP_2x2, 0, np.array([0.0, 0.2, 0.1]))
        with pytest.raises(ValueError):
            evolve_intensity(FLOP_2x2, 5, np.array([0.0]))

    def test_map_invariants_enforced(self):
        with pytest.raises(ValueError):
            IntensityMap(times=np.array([0.0]), intensities=np.array([[0.7, 0.7]]), input_site=0)


class TestExtractPeriod:
    def test_synthetic_cosine(self):
        times = np.arange(0.0, 50.0, 0.01)
        estimate = extract_period(np.cos(2.0 * math.pi * times / 5.0), times)
        assert estimate.period == pytest.approx(5.0, abs=1e-3)
        assert estimate.amplitude == pytest.approx(1.0, rel=1e-3)
        assert estimate.offset == pytest.approx(0.0, abs=1e-6)

    def test_two_level_trace(self):
        imap, period = flop_map(cycles=4.0)
        estimate = extract_period(imap.site_trace(1), imap.times)
        assert estimate.period == pytest.approx(period, abs=1e-3)
        assert estimate.fft_seed_period == pytest.approx(period, rel=0.2)

    def test_constant_trace_rejected(self):
        times = np.arange(0.0, 10.0, 0.01)
        with pytest.raises(NoOscillationError):
            extract_period(np.full_like(times, 0.25), times)

    def test_nonuniform_grid_rejected(self):
        times = np.array([0.0, 0.1, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
        with pytest.raises(ValueError):
            extract_period(np.cos(times), times)

    def test_flat_spectrum_rejected(self):
        # equal power in every bin: no bin dominates the spectral floor
        j = np.arange(256)
        trace = np.zeros(256)
        for k in range(1, 128):
            trace += np.cos(2.0 * math.pi * k * j / 256.0)
        with pytest.raises(NoOscillationError):
            extract_period(trace, j * 0.1)


class TestJumpFidelity:
    def test_perfect_flop(self):
        imap, period = flop_map(cycles=2.0, per_period=512)
        fid = jump_fidelity(imap, 0, 0, "right", period, cycles=2)
        assert fid == pytest.approx(1.0, abs=1e-9)

    def test_detuned_lattice_below_threshold(self, tuned_params):
        p = tuned_params(2, 0.9)
        delta = bs_correction(2, p.coupling, p.force)
        period = delta_min(eig_hermitian(build_hamiltonian(p))).period
        detuned = LatticeParams(12, p.coupling, p.force, p.epsilon + 5.0 * delta, 2)
        grid = 2.0 * period * np.arange(2049) / 2048
        imap = evolve_intensity(build_hamiltonian(detuned), 4, grid)
        assert jump_fidelity(imap, 4, 2, "right", period, cycles=2) < 0.2

    def test_horizon_validation(self):
        imap, period = flop_map(cycles=1.0)
        with pytest.raises(ValueError):
            jump_fidelity(imap, 0, 0, "right", period, cycles=3)

    def test_target_bounds_validation(self):
        imap, period = flop_map()
        with pytest.raises(ValueError):
            jump_fidelity(imap, 0, 1, "right", period, cycles=1)
        with pytest.raises(ValueError):
            jump_fidelity(imap, 0, 0, "sideways", period, cycles=1)


class TestTransferMax:
    def test_two_level_flop(self):
        t_star, intensity = transfer_max(FLOP_2x2, 0, 1, 2.0 * math.pi)
        assert t_star == pytest.approx(math.pi, rel=1e-5)
        assert intensity == pytest.approx(1.0, abs=1e-9)

    def test_first_order_chain_stage(self, tuned_params):
        # ~395/F transfer time with >0.95 intensity at the weak-coupling point
        p = tuned_params(1, 1.0, ratio=0.25, source=2)
        t_star, intensity = transfer_max(build_hamiltonian(p), 2, 5, 700.0)
        assert abs(t_star - 395.0) / 395.0 < 0.10
        assert intensity > 0.95

    def test_zeroth_order_stage(self, tuned_params):
        # ~31/F with >0.98 intensity
        p = tuned_params(0, 1.0, ratio=0.05, source=7, direction="left")
        t_star, intensity = transfer_max(build_hamiltonian(p), 7, 6, 60.0)
        assert abs(t_star - 31.0) / 31.0 < 0.10
        assert intensity > 0.98

    def test_boundary_warning(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            transfer_max(FLOP_2x2, 0, 1, 2.0)  # peak at pi > horizon
        assert any("horizon" in str(w.message) for w in caught)

    def test_horizon_validation(self):
        with pytest.raises(ValueError):
            transfer_max(FLOP_2x2, 0, 1, 0.0)
