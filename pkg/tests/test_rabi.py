from __future__ import annotations

import numpy as np
import pytest

from starkjump.lattice import LatticeParams, RabiParams, bare_resonance_epsilon
from starkjump.rabi import (
    FloquetBlockSpec,
    build_rabi_floquet,
    lattice_equivalence_check,
    pin_coupling_factor,
)


class TestLadderMatrix:
    def test_uncoupled_diagonal(self):
        spec = FloquetBlockSpec(RabiParams(1.0, 0.8, 0.0), k_min=-3, k_max=3, coupling_factor=1.0)
        h = build_rabi_floquet(spec)
        ks = np.arange(-3, 4)
        expected = ks * 1.0 + 0.4 * (-1.0) ** ks
        assert np.array_equal(np.diag(h), expected)
        assert np.count_nonzero(h - np.diag(np.diag(h))) == 0

    def test_tridiagonal_constant_coupling(self):
        spec = FloquetBlockSpec(RabiParams(1.0, 1.0, 0.3), k_min=-4, k_max=5, coupling_factor=0.5)
        h = build_rabi_floquet(spec)
        n = h.shape[0]
        off = h[np.arange(n - 1), np.arange(1, n)]
        assert np.allclose(np.abs(off), 0.5 * 0.3)
        for i in range(n):
            for j in range(n):
                if abs(i - j) >= 2:
                    assert h[i, j] == 0.0

    def test_resonance_matches_ladder_degeneracy(self):
        # splitting = (2m+1) * omega makes ladder energies degenerate at
        # separation 2m+1, the discrete image of the multiphoton condition
        for m in (0, 1, 2):
            omega = 0.7
            spec = FloquetBlockSpec(
                RabiParams(omega, bare_resonance_epsilon(m, omega), 0.0),
                k_min=0,
                k_max=2 * m + 3,
                coupling_factor=1.0,
            )
            d = np.diag(build_rabi_floquet(spec))
            assert d[0] == pytest.approx(d[2 * m + 1])

    def test_block_range_validation(self):
        with pytest.raises(ValueError):
            FloquetBlockSpec(RabiParams(1.0, 1.0, 0.1), k_min=2, k_max=2, coupling_factor=1.0)
        with pytest.raises(ValueError):
            FloquetBlockSpec(RabiParams(1.0, 1.0, 0.1), k_min=0, k_max=2, coupling_factor=0.3)


class TestEquivalence:
    def test_uncoupled_exact(self):
        p = LatticeParams(12, 0.0, 1.0, 1.0)
        assert lattice_equivalence_check(p, 12, 1.0) == 0.0

    def test_weak_coupling_point_exact_for_unit_factor(self):
        p = LatticeParams(12, 0.05, 1.0, 1.0)
        assert lattice_equivalence_check(p, 12, 1.0) < 1e-12

    def test_half_factor_fails(self):
        p = LatticeParams(12, 0.05, 1.0, 1.0)
        assert lattice_equivalence_check(p, 12, 0.5) > 1e-3

    def test_pinned_factor_is_unit(self):
        assert pin_coupling_factor(LatticeParams(12, 0.05, 1.0, 1.0)) == 1.0

    def test_first_order_operating_point(self):
        p = LatticeParams(12, 0.25, 1.0, 2.90625, order_m=1)
        assert lattice_equivalence_check(p, 12, 1.0) < 1e-12

    def test_window_translation_invariance(self):
        # interior windows of the ladder differ from the lattice only by a
        # uniform diagonal offset wherever the window starts on an even index
        r = RabiParams(1.0, 1.0, 0.05)
        a = build_rabi_floquet(FloquetBlockSpec(r, k_min=-4, k_max=15, coupling_factor=1.0))
        b = build_rabi_floquet(FloquetBlockSpec(r, k_min=-6, k_max=13, coupling_factor=1.0))
        wa = a[4:16, 4:16]
        wb = b[6:18, 6:18]
        diff = wa - wb
        off = diff[0, 0]
        assert np.allclose(diff, off * np.eye(12), atol=1e-12)

    def test_window_validation(self):
        p = LatticeParams(4, 0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            lattice_equivalence_check(p, 12)
        with pytest.raises(ValueError):
            lattice_equivalence_check(p, 4, margin=1)
