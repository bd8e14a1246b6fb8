"""Resonant periodic jumps in a tilted binary lattice.

Simulation of long-range two-site oscillations in a staggered chain under a
uniform force, their counter-rotating resonance shifts, sign-flip transport
cascades, fractional-step evolution, and compilation of the resulting
unitaries to Mach-Zehnder mesh programs.
"""

from ._kernels import BACKEND, NUMBA_ENABLED
from .dynamics import (
    IntensityMap,
    NoOscillationError,
    PeriodEstimate,
    evolve_intensity,
    extract_period,
    jump_fidelity,
    transfer_max,
)
from .lattice import (
    COUPLING_RATIOS,
    SCAN_FORCES,
    LatticeParams,
    RabiParams,
    bare_resonance_epsilon,
    bs_correction,
    build_hamiltonian,
    flip_epsilon,
    from_rabi_params,
    shifted_resonance_epsilon,
    to_rabi_params,
)
from .linalg import (
    SpectralDecomposition,
    apply,
    basis_state,
    eig_hermitian,
    evolve_state,
    evolve_states,
    integrate_schrodinger,
    propagator,
    random_unitary,
)
from .mesh import (
    MeshProgram,
    MziSetting,
    mesh_decompose,
    mesh_reconstruct,
    program_error,
    program_from_json,
    program_to_json,
    quantize_program,
)
from .protocols import (
    CascadeSchedule,
    CascadeStage,
    FloquetPlan,
    alternating_sign_blocks,
    plan_cascade,
    run_cascade,
    run_floquet,
    run_floquet_blocks,
)
from .rabi import FloquetBlockSpec, build_rabi_floquet, lattice_equivalence_check, pin_coupling_factor
from .spectrum import GapReport, delta_min, delta_min_pair, locate_anticrossing

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "COUPLING_RATIOS",
    "CascadeSchedule",
    "CascadeStage",
    "FloquetBlockSpec",
    "FloquetPlan",
    "GapReport",
    "IntensityMap",
    "LatticeParams",
    "MeshProgram",
    "MziSetting",
    "NUMBA_ENABLED",
    "NoOscillationError",
    "PeriodEstimate",
    "RabiParams",
    "SCAN_FORCES",
    "SpectralDecomposition",
    "alternating_sign_blocks",
    "apply",
    "bare_resonance_epsilon",
    "basis_state",
    "bs_correction",
    "build_hamiltonian",
    "build_rabi_floquet",
    "delta_min",
    "delta_min_pair",
    "eig_hermitian",
    "evolve_intensity",
    "evolve_state",
    "evolve_states",
    "extract_period",
    "flip_epsilon",
    "from_rabi_params",
    "integrate_schrodinger",
    "jump_fidelity",
    "lattice_equivalence_check",
    "locate_anticrossing",
    "mesh_decompose",
    "mesh_reconstruct",
    "pin_coupling_factor",
    "plan_cascade",
    "program_error",
    "program_from_json",
    "program_to_json",
    "propagator",
    "quantize_program",
    "random_unitary",
    "run_cascade",
    "run_floquet",
    "run_floquet_blocks",
    "shifted_resonance_epsilon",
    "to_rabi_params",
    "transfer_max",
]
