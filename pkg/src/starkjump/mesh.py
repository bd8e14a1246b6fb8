"""Compilation of N x N unitaries to a rectangular mesh of Mach-Zehnder
interferometers, phase quantization, and reconstruction error reporting.

MZI convention used throughout: internal phase theta between two balanced
couplers and an external phase phi on the top input arm,

    T(theta, phi) = i e^{i theta/2} [[e^{i phi} sin(theta/2), cos(theta/2)],
                                     [e^{i phi} cos(theta/2), -sin(theta/2)]]

so the bar state sits at theta = pi (with phi = pi giving exactly the
identity), the cross state at theta = 0, and the balanced 50:50 point at
theta = pi/2. A unitary is realized as  U = D * T_k * ... * T_1  with D a
diagonal of output phases; ``settings`` are stored in application order
(first applied first). Intensity observables are phase-blind, so programs
are compared up to a global phase.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .linalg import require_unitary

_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class MziSetting:
    """One interferometer: grid position plus its two phases."""

    layer: int
    top_channel: int
    theta: float
    phi: float


@dataclass(frozen=True, eq=False)
class MeshProgram:
    """Ordered MZI settings and output phases realizing one unitary."""

    n_channels: int
    settings: tuple[MziSetting, ...]
    output_phases: np.ndarray
    quantization_step: float | None = None
    layout: str = "rectangular"

    def __post_init__(self) -> None:
        n = self.n_channels
        expected = n * (n - 1) // 2
        if len(self.settings) != expected:
            raise ValueError(f"expected {expected} settings for {n} channels, got {len(self.settings)}")
        for s in self.settings:
            if not 0 <= s.top_channel <= n - 2:
                raise ValueError(f"top_channel {s.top_channel} out of range")
        if np.asarray(self.output_phases).shape != (n,):
            raise ValueError("output_phases must have one entry per channel")
        if self.quantization_step is not None:
            step = self.quantization_step
            for value in self.all_phases():
                if abs(value - round(value / step) * step) > 1e-12:
                    raise ValueError("phases are not multiples of the quantization step")

    def all_phases(self) -> list[float]:
        out: list[float] = []
        for s in self.settings:
            out.extend((s.theta, s.phi))
        out.extend(float(p) for p in self.output_phases)
        return out


def mzi_transfer(theta: float, phi: float) -> np.ndarray:
    half = 0.5 * theta
    pref = 1j * np.exp(0.5j * theta)
    s, c = math.sin(half), math.cos(half)
    return pref * np.array([[np.exp(1j * phi) * s, c], [np.exp(1j * phi) * c, -s]])


def _embed(n: int, channel: int, block: np.ndarray) -> np.ndarray:
    m = np.eye(n, dtype=np.complex128)
    m[channel : channel + 2, channel : channel + 2] = block
    return m


def _solve_right(u: complex, v: complex) -> tuple[float, float]:
    """(theta, phi) such that (u, v) @ Tdag has a zero first component."""
    au, av = abs(u), abs(v)
    scale = au + av
    if scale == 0.0 or au <= 1e-14 * scale:
        # bar-identity when nothing needs elimination; phi = pi makes T = 1
        return math.pi, math.pi
    if av <= 1e-14 * scale:
        return 0.0, 0.0
    theta = 2.0 * math.atan2(av, au)
    phi = -np.angle(-v / u)
    return theta, float(phi % (2.0 * math.pi))


def _solve_left(u: complex, v: complex) -> tuple[float, float]:
    """(theta, phi) such that T @ (u, v) has a zero second component."""
    au, av = abs(u), abs(v)
    scale = au + av
    if scale == 0.0 or av <= 1e-14 * scale:
        return math.pi, math.pi
    if au <= 1e-14 * scale:
        return 0.0, 0.0
    theta = 2.0 * math.atan2(au, av)
    phi = np.angle(v / u)
    return theta, float(phi % (2.0 * math.pi))


def _shift_through_diagonal(
    theta: float, phi: float, psi1: float, psi2: float
) -> tuple[float, float, float, float]:
    """Rewrite Tdag(theta, phi) . diag(psi) as diag(psi') . T(theta, phi').

    Returns (theta, phi', psi1', psi2'). The bar and cross points need their
    own branches because the generic phase relations degenerate there.
    """
    if abs(theta - math.pi) <= _DEGENERATE_TOL:
        return theta, math.pi, psi1 - phi + math.pi, psi2
    if abs(theta) <= _DEGENERATE_TOL:
        return theta, 0.0, psi2 - phi + math.pi, psi1 + math.pi
    phi_new = psi1 - psi2
    psi2_new = psi2 - theta + math.pi
    psi1_new = psi2_new - phi
    return theta, phi_new, psi1_new, psi2_new


def _wrap_phase(x: float) -> float:
    return float(x % (2.0 * math.pi))


def _assign_layers(order: list[tuple[int, float, float]], n: int) -> tuple[MziSetting, ...]:
    """Greedy layering of the application-ordered settings onto the grid."""
    next_free = [0] * n
    settings = []
    for channel, theta, phi in order:
        layer = max(next_free[channel], next_free[channel + 1])
        settings.append(MziSetting(layer=layer, top_channel=channel, theta=theta, phi=phi))
        next_free[channel] = layer + 1
        next_free[channel + 1] = layer + 1
    return tuple(settings)


def mesh_decompose(u: np.ndarray) -> MeshProgram:
    """Compile a unitary into N(N-1)/2 MZI settings plus output phases.

    Rectangular nulling: even diagonals are eliminated by right-multiplying
    inverse MZIs (acting on column pairs), odd diagonals by left-multiplying
    MZIs (row pairs); the leftover left factors are then commuted through
    the residual diagonal. The round trip reproduces the input to rounding
    accuracy, including its global phase.
    """
    u = require_unitary(np.asarray(u, dtype=np.complex128), atol=1e-8)
    n = u.shape[0]
    work = u.copy()
    rights: list[tuple[int, float, float]] = []
    lefts: list[tuple[int, float, float]] = []
    for i in range(n - 1):
        for j in range(i + 1):
            if i % 2 == 0:
                row, ch = n - 1 - j, i - j
                theta, phi = _solve_right(work[row, ch], work[row, ch + 1])
                work[:, ch : ch + 2] = work[:, ch : ch + 2] @ mzi_transfer(theta, phi).conj().T
                work[row, ch] = 0.0
                rights.append((ch, theta, phi))
            else:
                ch = n - 2 - i + j
                theta, phi = _solve_left(work[ch, j], work[ch + 1, j])
                work[ch : ch + 2, :] = mzi_transfer(theta, phi) @ work[ch : ch + 2, :]
                work[ch + 1, j] = 0.0
                lefts.append((ch, theta, phi))
    psi = list(np.angle(np.diag(work)))
    ordered = list(rights)
    for ch, theta, phi in reversed(lefts):
        theta2, phi2, p1, p2 = _shift_through_diagonal(theta, phi, psi[ch], psi[ch + 1])
        psi[ch], psi[ch + 1] = p1, p2
        ordered.append((ch, theta2, _wrap_phase(phi2)))
    output_phases = np.array([_wrap_phase(p) for p in psi])
    return MeshProgram(
        n_channels=n, settings=_assign_layers(ordered, n), output_phases=output_phases
    )


def mesh_reconstruct(program: MeshProgram) -> np.ndarray:
    """Multiply out the MZI settings (application order) and output phases."""
    n = program.n_channels
    m = np.eye(n, dtype=np.complex128)
    for s in program.settings:
        m = _embed(n, s.top_channel, mzi_transfer(s.theta, s.phi)) @ m
    return np.diag(np.exp(1j * program.output_phases.astype(float))) @ m


def _round_half_away(x: float, step: float) -> float:
    # half-way detection tolerates representation error in x/step, so values
    # written as odd half-multiples of the step round away from zero even
    # when the quotient lands just under 0.5
    q = abs(x) / step
    base = math.floor(q)
    frac = q - base
    if frac > 0.5 or abs(frac - 0.5) <= 16.0 * np.finfo(float).eps * max(1.0, q):
        base += 1
    return math.copysign(base, x) * step


def quantize_program(program: MeshProgram, step: float) -> MeshProgram:
    """Round every phase to the nearest multiple of ``step``.

    Half-way values round away from zero, matching discrete driver levels.
    When the step divides 2*pi exactly (hardware steps do), external phases
    that round up to 2*pi wrap back to 0 so they stay in [0, 2*pi).
    """
    if step <= 0.0:
        raise ValueError("quantization step must be positive")
    two_pi = 2.0 * math.pi
    steps_per_turn = two_pi / step
    wraps = abs(steps_per_turn - round(steps_per_turn)) < 1e-9

    def quantize_wrapped(x: float) -> float:
        q = _round_half_away(x, step)
        if wraps and q >= two_pi - 1e-12:
            q -= round(steps_per_turn) * step
        return q

    settings = tuple(
        replace(s, theta=_round_half_away(s.theta, step), phi=quantize_wrapped(s.phi))
        for s in program.settings
    )
    phases = np.array([quantize_wrapped(float(p)) for p in program.output_phases])
    return replace(program, settings=settings, output_phases=phases, quantization_step=step)


def _phase_aligned_at(m: np.ndarray, flat_index: int) -> np.ndarray:
    pivot = m.flat[flat_index]
    if abs(pivot) == 0.0:
        return m
    return m * (np.conj(pivot) / abs(pivot))


def program_error(u: np.ndarray, program: MeshProgram) -> float:
    """Max elementwise deviation between a target unitary and a program.

    Both matrices are rotated to zero the phase of the entry where the
    target has its largest magnitude (one shared position, so magnitude
    ties between symmetric entries cannot split the alignment), making the
    comparison blind to a global phase.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (program.n_channels, program.n_channels):
        raise ValueError("dimension mismatch between unitary and program")
    r = mesh_reconstruct(program)
    pivot = int(np.abs(u).argmax())
    return float(np.max(np.abs(_phase_aligned_at(u, pivot) - _phase_aligned_at(r, pivot))))


def program_to_json(program: MeshProgram) -> str:
    payload: dict[str, Any] = {
        "n_channels": program.n_channels,
        "layout": program.layout,
        "quantization_step": program.quantization_step,
        "settings": [
            {"layer": s.layer, "top_channel": s.top_channel, "theta": s.theta, "phi": s.phi}
            for s in program.settings
        ],
        "output_phases": [float(p) for p in program.output_phases],
    }
    return json.dumps(payload, indent=2)


def program_from_json(text: str) -> MeshProgram:
    payload = json.loads(text)
    return MeshProgram(
        n_channels=payload["n_channels"],
        settings=tuple(
            MziSetting(
                layer=s["layer"], top_channel=s["top_channel"], theta=s["theta"], phi=s["phi"]
            )
            for s in payload["settings"]
        ),
        output_phases=np.array(payload["output_phases"], dtype=float),
        quantization_step=payload.get("quantization_step"),
        layout=payload.get("layout", "rectangular"),
    )
