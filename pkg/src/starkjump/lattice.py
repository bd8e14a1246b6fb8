"""Tilted binary-lattice Hamiltonian and closed-form resonance quantities.

The chain has a uniform energy tilt F per site plus a staggered on-site
mismatch: even sites (A sublattice) carry +epsilon/2, odd sites (B) carry
-epsilon/2. Site indices are 0-based throughout; the choice is recorded in
emitted metadata as ``index_origin``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

#: Coupling ratio V/F used for each resonance order in the bundled presets.
COUPLING_RATIOS = {0: 0.2, 1: 0.6, 2: 1.0, 3: 1.0}

#: Force values swept by the bundled scan presets.
SCAN_FORCES = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)

INDEX_ORIGIN = 0


@dataclass(frozen=True)
class LatticeParams:
    """Parameter bundle (n_sites, V, F, epsilon, order_m) defining the chain.

    ``order_m`` is metadata naming the intended resonance order; it does not
    enter the Hamiltonian.
    """

    n_sites: int
    coupling: float
    force: float
    epsilon: float
    order_m: int | None = None

    def __post_init__(self) -> None:
        if self.n_sites < 2:
            raise ValueError("n_sites must be at least 2")
        if self.force <= 0.0:
            raise ValueError("force must be positive")
        if self.coupling < 0.0:
            raise ValueError("coupling must be non-negative")
        if self.order_m is not None and self.order_m < 0:
            raise ValueError("order_m must be non-negative")


@dataclass(frozen=True)
class RabiParams:
    """Driven two-level parameters: drive frequency, level splitting, coupling."""

    omega: float
    splitting: float
    coupling: float

    def __post_init__(self) -> None:
        if self.omega <= 0.0:
            raise ValueError("drive frequency must be positive")
        if self.coupling < 0.0:
            raise ValueError("coupling must be non-negative")


def build_hamiltonian(p: LatticeParams) -> np.ndarray:
    """Real symmetric tridiagonal matrix of the tilted staggered chain.

    Diagonal: n*F + (epsilon/2) * (-1)^n; first off-diagonals: -V.
    """
    n = p.n_sites
    sites = np.arange(n)
    h = np.zeros((n, n))
    h[sites, sites] = sites * p.force + 0.5 * p.epsilon * (-1.0) ** sites
    h[sites[:-1], sites[1:]] = -p.coupling
    h[sites[1:], sites[:-1]] = -p.coupling
    return h


def bare_resonance_epsilon(m: int, force: float) -> float:
    """Uncorrected order-m resonance condition epsilon = (2m+1) F."""
    if force <= 0.0:
        raise ValueError("force must be positive")
    if m < 0:
        raise ValueError("order must be non-negative")
    return (2 * m + 1) * force


def bs_correction(m: int, coupling: float, force: float) -> float:
    """Counter-rotating (Bloch-Siegert) displacement of the order-m anticrossing.

    V^2/F for m = 0 and (2m+1)/(m(m+1)) * V^2/F for m >= 1.
    """
    if force <= 0.0:
        raise ValueError("force must be positive")
    if m < 0:
        raise ValueError("order must be non-negative")
    v2f = coupling * coupling / force
    if m == 0:
        return v2f
    return (2 * m + 1) / (m * (m + 1)) * v2f


def shifted_resonance_epsilon(m: int, coupling: float, force: float) -> float:
    """Perturbative location of the true anticrossing: (2m+1)F - correction."""
    return bare_resonance_epsilon(m, force) - bs_correction(m, coupling, force)


def flip_epsilon(p: LatticeParams) -> LatticeParams:
    """Same lattice with the staggered mismatch negated (sublattices exchanged)."""
    return replace(p, epsilon=-p.epsilon)


def to_rabi_params(p: LatticeParams) -> RabiParams:
    """Map lattice parameters onto the driven two-level model: F, epsilon, V."""
    return RabiParams(omega=p.force, splitting=p.epsilon, coupling=p.coupling)


def from_rabi_params(r: RabiParams, n_sites: int, order_m: int | None = None) -> LatticeParams:
    """Inverse of :func:`to_rabi_params`."""
    return LatticeParams(
        n_sites=n_sites,
        coupling=r.coupling,
        force=r.omega,
        epsilon=r.splitting,
        order_m=order_m,
    )
