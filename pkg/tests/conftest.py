from __future__ import annotations

import numpy as np
import pytest

from starkjump.lattice import COUPLING_RATIOS, LatticeParams, bs_correction
from starkjump.spectrum import locate_anticrossing


def locator_window(m: int, coupling: float, force: float) -> float:
    return max(2.2 * bs_correction(m, coupling, force), 0.4 * force)


@pytest.fixture(scope="session")
def tuned_params():
    """Anticrossing-tuned LatticeParams, cached per (m, force, ratio, source, step)."""
    cache: dict[tuple, LatticeParams] = {}

    def factory(
        m: int,
        force: float,
        ratio: float | None = None,
        n_sites: int = 12,
        source: int = 4,
        direction: str = "right",
    ) -> LatticeParams:
        ratio = COUPLING_RATIOS[m] if ratio is None else ratio
        key = (m, force, ratio, n_sites, source, direction)
        if key not in cache:
            coupling = ratio * force
            step = (2 * m + 1) * (1 if direction == "right" else -1)
            eps, _ = locate_anticrossing(
                m, coupling, force, n_sites, source, source + step,
                locator_window(m, coupling, force),
            )
            cache[key] = LatticeParams(n_sites, coupling, force, eps, m)
        return cache[key]

    return factory


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
