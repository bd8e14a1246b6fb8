from __future__ import annotations

import math

import numpy as np
import pytest

from starkjump.lattice import (
    LatticeParams,
    bare_resonance_epsilon,
    bs_correction,
    build_hamiltonian,
    shifted_resonance_epsilon,
)
from starkjump.linalg import eig_hermitian
from starkjump.spectrum import (
    GapReport,
    delta_min,
    delta_min_pair,
    locate_anticrossing,
    pair_gap_at,
)


def lattice_spec(n_sites, coupling, force, epsilon, m=None):
    return eig_hermitian(build_hamiltonian(LatticeParams(n_sites, coupling, force, epsilon, m)))


class TestDeltaMin:
    def test_two_level(self):
        report = delta_min(lattice_spec(2, 0.5, 1.0, 1.0))
        assert report.delta_min == pytest.approx(1.0, abs=1e-12)
        assert report.period == pytest.approx(2.0 * math.pi, abs=1e-10)
        assert report.mode == "global"

    def test_degenerate_pairs_excluded(self):
        report = delta_min(lattice_spec(4, 0.0, 1.0, 1.0))
        assert report.delta_min == pytest.approx(2.0, abs=1e-12)

    def test_all_degenerate_rejected(self):
        with pytest.raises(ValueError):
            delta_min(eig_hermitian(np.eye(4)))

    def test_period_gap_product(self):
        report = delta_min(lattice_spec(12, 0.18, 0.9, 0.86, 0))
        assert report.period * report.delta_min == pytest.approx(2.0 * math.pi, rel=1e-12)

    def test_report_validation(self):
        with pytest.raises(ValueError):
            GapReport(delta_min=1.0, pair_indices=(0, 1), period=1.0, mode="global")
        with pytest.raises(ValueError):
            GapReport(delta_min=1.0, pair_indices=(0, 1), period=2.0 * math.pi, mode="sideways")


class TestDeltaMinPair:
    def test_two_level_matches_global(self):
        spec = lattice_spec(2, 0.5, 1.0, 1.0)
        assert delta_min_pair(spec, 0, 1).delta_min == pytest.approx(
            delta_min(spec).delta_min, abs=1e-14
        )

    def test_cascade_point_half_period(self, tuned_params):
        # zeroth-order hop: transfer time ~ 31 / F means pair gap ~ pi / 31
        p = tuned_params(0, 1.0, ratio=0.05, source=7, direction="left")
        gap = delta_min_pair(eig_hermitian(build_hamiltonian(p)), 7, 6).delta_min
        assert math.pi / gap == pytest.approx(31.0, rel=0.1)

    def test_detuned_pair_gap_much_larger(self, tuned_params):
        p = tuned_params(2, 0.9)
        delta = bs_correction(2, p.coupling, p.force)
        resonant = delta_min_pair(eig_hermitian(build_hamiltonian(p)), 4, 9).delta_min
        detuned_spec = lattice_spec(12, p.coupling, p.force, p.epsilon + 5 * delta, 2)
        detuned = delta_min_pair(detuned_spec, 4, 9).delta_min
        assert detuned > 10.0 * resonant

    def test_site_range_validation(self):
        spec = lattice_spec(4, 0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            delta_min_pair(spec, 0, 4)

    def test_ambiguous_selection_flagged(self):
        # every eigenvector carries identical weight on sites (0, 1), so the
        # runner-up and the third candidate tie exactly
        q = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]) / 2.0
        h = q @ np.diag([0.0, 1.0, 2.0, 3.0]) @ q.T
        report = delta_min_pair(eig_hermitian(h), 0, 1)
        assert report.ambiguous

    def test_unambiguous_selection_not_flagged(self, tuned_params):
        p = tuned_params(2, 0.9)
        report = delta_min_pair(eig_hermitian(build_hamiltonian(p)), 4, 9)
        assert not report.ambiguous

    def test_period_monotone_in_gap(self):
        small = GapReport(delta_min=0.1, pair_indices=(0, 1), period=2.0 * math.pi / 0.1, mode="global")
        large = GapReport(delta_min=0.5, pair_indices=(0, 1), period=2.0 * math.pi / 0.5, mode="global")
        assert large.period < small.period


class TestLocator:
    def test_uncoupled_crossing_at_bare_value(self):
        for m in (0, 1):
            eps, gap = locate_anticrossing(m, 0.0, 1.0, 12, 4, 4 + 2 * m + 1, 0.5)
            assert eps == pytest.approx(bare_resonance_epsilon(m, 1.0), abs=1e-6)
            assert gap < 1e-6

    def test_first_order_weak_coupling_near_formula(self):
        eps, _ = locate_anticrossing(1, 0.25, 1.0, 12, 4, 7, 0.3)
        formula = shifted_resonance_epsilon(1, 0.25, 1.0)
        delta = bs_correction(1, 0.25, 1.0)
        assert abs(eps - formula) < 2.0 * delta * delta / 1.0

    def test_zeroth_order_against_grid_oracle(self):
        # independent oracle: brute-force minimization on a 1e-4 mismatch grid
        grid = np.arange(0.90, 1.02, 1e-4)
        gaps = [pair_gap_at(e, 0, 0.2, 1.0, 12, 4, 5) for e in grid]
        oracle = grid[int(np.argmin(gaps))]
        eps, _ = locate_anticrossing(0, 0.2, 1.0, 12, 4, 5, 0.4)
        assert eps == pytest.approx(oracle, abs=1e-3)
        assert abs(eps - 0.96) < 0.01

    def test_window_precondition(self):
        with pytest.raises(ValueError, match="halfwidth"):
            locate_anticrossing(1, 0.25, 1.0, 12, 4, 7, 0.1)

    def test_boundary_minimum_rejected(self):
        # sites (4, 5) resonate near the zeroth-order value, far below the
        # first-order window: the in-window gap decreases monotonically
        # toward the lower edge
        with pytest.raises(ValueError, match="boundary"):
            locate_anticrossing(1, 0.2, 1.0, 12, 4, 5, 0.5)


class TestScaling:
    def test_gap_linear_in_force(self):
        # mismatch and coupling scaled with F make H exactly F times a fixed
        # matrix, so the gap is linear in F to rounding accuracy
        ratio_eps = 4.115675
        base = delta_min(lattice_spec(12, 1.0, 1.0, ratio_eps, 2)).delta_min
        for force in (0.1, 0.3, 0.5, 0.7, 0.9):
            gap = delta_min(lattice_spec(12, force, force, ratio_eps * force, 2)).delta_min
            assert gap / force == pytest.approx(base, rel=1e-10)

    def test_order_hierarchy(self, tuned_params):
        gaps = []
        for m in (0, 1, 2):
            p = tuned_params(m, 1.0, ratio=0.2)
            gaps.append(delta_min_pair(eig_hermitian(build_hamiltonian(p)), 4, 4 + 2 * m + 1).delta_min)
        assert gaps[0] > gaps[1] > gaps[2]

    def test_global_and_pair_coincide_on_sweep_points(self, tuned_params):
        for m in (0, 1, 2, 3):
            p = tuned_params(m, 0.9)
            spec = eig_hermitian(build_hamiltonian(p))
            g = delta_min(spec).delta_min
            gp = delta_min_pair(spec, 4, 4 + 2 * m + 1).delta_min
            assert g == pytest.approx(gp, rel=1e-9)
