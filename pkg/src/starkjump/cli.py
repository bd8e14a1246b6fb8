"""Batch front-end: config ingestion, the experiment subcommands, and file
emission.

Usage: ``starkjump <command> --config <path> [--output <dir>] [--preset <name>]``
where command is one of simulate, scan, cascade, floquet, mesh-compile,
verify. A preset supplies the base config; an explicit config file overlays
it. Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

``STARKJUMP_THREADS`` caps scan parallelism; results are merged in a fixed
(m, F) order so output files are byte-identical regardless of thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .dynamics import (
    NoOscillationError,
    evolve_intensity,
    extract_period,
    jump_fidelity,
)
from .lattice import (
    COUPLING_RATIOS,
    INDEX_ORIGIN,
    LatticeParams,
    bs_correction,
    build_hamiltonian,
)
from .linalg import (
    basis_state,
    eig_hermitian,
    evolve_state,
    integrate_schrodinger,
    propagator,
    random_unitary,
)
from .mesh import mesh_decompose, program_error, program_to_json, quantize_program
from .presets import preset
from .protocols import (
    FloquetPlan,
    alternating_sign_blocks,
    plan_cascade,
    run_cascade,
    run_floquet,
    run_floquet_blocks,
)
from .rabi import lattice_equivalence_check, pin_coupling_factor
from .serialize import (
    lattice_from_dict,
    lattice_to_dict,
    write_heatmap_pgm,
    write_intensity_csv,
    write_json,
    write_scan_csv,
)
from .spectrum import delta_min, delta_min_pair, locate_anticrossing

COMMANDS = ("simulate", "scan", "cascade", "floquet", "mesh-compile", "verify")

AUTO_SAMPLES_PER_PERIOD = 512
AUTO_PERIODS = 4.0
MAX_AUTO_STEPS = 32768


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class NumericalFailure(RuntimeError):
    """A fit or verification property failed."""


def _threads() -> int:
    raw = os.environ.get("STARKJUMP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _locator_window(m: int, coupling: float, force: float) -> float:
    return max(2.2 * bs_correction(m, coupling, force), 0.4 * force)


def resolve_epsilon(
    cfg_lattice: dict[str, Any], site_a: int, site_b: int
) -> tuple[LatticeParams, str]:
    """Build LatticeParams, locating the anticrossing when epsilon is "auto"."""
    lat = dict(cfg_lattice)
    mode = "explicit"
    if lat.get("epsilon") == "auto":
        if lat.get("order_m") is None:
            raise ConfigError('epsilon: "auto" requires order_m')
        m = int(lat["order_m"])
        coupling = float(lat["coupling"])
        force = float(lat["force"])
        eps, _ = locate_anticrossing(
            m, coupling, force, int(lat["n_sites"]), site_a, site_b,
            _locator_window(m, coupling, force),
        )
        lat["epsilon"] = eps
        mode = "located"
    return lattice_from_dict(lat), mode


def _auto_grid(t_max_cfg: Any, n_steps_cfg: Any, period: float) -> tuple[float, int]:
    if t_max_cfg == "auto":
        t_max = AUTO_PERIODS * period
    else:
        t_max = float(t_max_cfg)
        if t_max <= 0.0:
            raise ConfigError("t_max must be positive")
    if n_steps_cfg == "auto":
        n_steps = int(min(MAX_AUTO_STEPS, AUTO_SAMPLES_PER_PERIOD * math.ceil(t_max / period)))
    else:
        n_steps = int(n_steps_cfg)
        if n_steps < 1:
            raise ConfigError("n_steps must be positive")
    return t_max, n_steps


def _monitor_site(input_site: int, m: int, direction: str, n_sites: int) -> int:
    step = 2 * m + 1
    target = input_site + step if direction == "right" else input_site - step
    if not 0 <= target < n_sites:
        raise ConfigError(f"monitor site {target} out of range")
    return target


def cmd_simulate(cfg: dict[str, Any], outdir: Path) -> dict[str, Any]:
    extras = cfg.get("extras", {})
    direction = extras.get("direction", "right")
    input_site = int(cfg["input_site"])
    lat_cfg = cfg["lattice"]
    if lat_cfg.get("order_m") is None:
        raise ConfigError("simulate requires lattice.order_m")
    m = int(lat_cfg["order_m"])
    n_sites = int(lat_cfg["n_sites"])
    monitor = _monitor_site(input_site, m, direction, n_sites)
    resonant, eps_mode = resolve_epsilon(lat_cfg, input_site, monitor)
    spec_res = eig_hermitian(build_hamiltonian(resonant))
    period_ref = delta_min(spec_res).period

    detune = float(extras.get("detuning_multiplier", 0.0))
    eps_used = resonant.epsilon + detune * bs_correction(m, resonant.coupling, resonant.force)
    params = LatticeParams(n_sites, resonant.coupling, resonant.force, eps_used, m)
    h = build_hamiltonian(params)
    spec = eig_hermitian(h)

    t_max, n_steps = _auto_grid(cfg.get("t_max", "auto"), cfg.get("n_steps", "auto"), period_ref)
    grid = t_max * np.arange(n_steps + 1) / n_steps
    meta = {
        "command": "simulate",
        "lattice": lattice_to_dict(params),
        "input_site": input_site,
        "index_origin": INDEX_ORIGIN,
    }
    imap = evolve_intensity(h, input_site, grid, meta=meta)

    cycles = max(1, int(math.floor(t_max / period_ref)))
    fidelity = jump_fidelity(imap, input_site, m, direction, period_ref, cycles)
    gap_global = delta_min(spec)
    gap_pair = delta_min_pair(spec, input_site, monitor)
    manifest = {
        "command": "simulate",
        "lattice": lattice_to_dict(params),
        "epsilon_mode": eps_mode,
        "resonant_epsilon": resonant.epsilon,
        "detuning_multiplier": detune,
        "input_site": input_site,
        "monitor_site": monitor,
        "direction": direction,
        "index_origin": INDEX_ORIGIN,
        "t_max": t_max,
        "n_steps": n_steps,
        "delta_min_global": gap_global.delta_min,
        "delta_min_pair": gap_pair.delta_min,
        "period": gap_global.period,
        "reference_period": period_ref,
        "cycles": cycles,
        "fidelity": fidelity,
        "backend": BACKEND,
        "version": __version__,
    }
    write_intensity_csv(outdir / "intensity.csv", imap)
    write_json(outdir / "manifest.json", manifest)
    if cfg.get("emit_heatmap", False):
        write_heatmap_pgm(outdir / "heatmap.pgm", imap)
    return manifest


def scan_point(m: int, force: float, ratio: float, n_sites: int, input_site: int) -> dict[str, Any]:
    """One sweep point: locate the anticrossing, simulate, fit the period.

    Failures are recorded in-row (everything computed up to the failure is
    kept) so a sweep never aborts on a single bad point.
    """
    coupling = ratio * force
    nan = float("nan")
    row: dict[str, Any] = {
        "m": m,
        "F": force,
        "V": coupling,
        "epsilon_star": nan,
        "delta_min_global": nan,
        "delta_min_pair": nan,
        "T_theory": nan,
        "T_fitted": nan,
        "rel_error": nan,
        "status": "ok",
    }
    monitor = input_site + 2 * m + 1
    try:
        eps_star, _ = locate_anticrossing(
            m, coupling, force, n_sites, input_site, monitor,
            _locator_window(m, coupling, force),
        )
        row["epsilon_star"] = eps_star
        params = LatticeParams(n_sites, coupling, force, eps_star, m)
        spec = eig_hermitian(build_hamiltonian(params))
        gap_global = delta_min(spec)
        row["delta_min_global"] = gap_global.delta_min
        row["delta_min_pair"] = delta_min_pair(spec, input_site, monitor).delta_min
        t_theory = gap_global.period
        row["T_theory"] = t_theory
        grid = AUTO_PERIODS * t_theory * np.arange(2049) / 2048
        imap = evolve_intensity(build_hamiltonian(params), input_site, grid)
        estimate = extract_period(imap.site_trace(monitor), grid)
        row["T_fitted"] = estimate.period
        row["rel_error"] = abs(estimate.period - t_theory) / t_theory
    except (NoOscillationError, ValueError) as err:
        row["status"] = f"error: {err}"
    return row


def cmd_scan(cfg: dict[str, Any], outdir: Path) -> dict[str, Any]:
    extras = cfg.get("extras", {})
    orders = [int(m) for m in extras.get("orders", [0, 1, 2, 3])]
    forces = [float(f) for f in extras.get("forces", [0.1, 0.3, 0.5, 0.7, 0.9, 1.0])]
    ratios_cfg = extras.get("ratios", {})
    ratios = {m: float(ratios_cfg.get(str(m), COUPLING_RATIOS[m])) for m in orders}
    n_sites = int(cfg.get("lattice", {}).get("n_sites", 12))
    input_site = int(cfg.get("input_site", 4))
    points = [(m, force) for m in orders for force in forces]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = {
            (m, force): pool.submit(scan_point, m, force, ratios[m], n_sites, input_site)
            for m, force in points
        }
        rows = [futures[key].result() for key in points]
    write_scan_csv(outdir / "scan.csv", rows)
    manifest = {
        "command": "scan",
        "orders": orders,
        "forces": forces,
        "ratios": {str(m): ratios[m] for m in orders},
        "n_sites": n_sites,
        "input_site": input_site,
        "index_origin": INDEX_ORIGIN,
        "rows": len(rows),
        "failures": sum(1 for r in rows if r["status"] != "ok"),
        "backend": BACKEND,
        "version": __version__,
    }
    write_json(outdir / "manifest.json", manifest)
    if manifest["failures"]:
        raise NumericalFailure(f"{manifest['failures']} scan points failed to fit")
    return manifest


def cmd_cascade(cfg: dict[str, Any], outdir: Path) -> dict[str, Any]:
    extras = cfg.get("extras", {})
    chain = [int(s) for s in extras.get("chain", [])]
    if len(chain) < 2:
        raise ConfigError("cascade requires extras.chain with at least two sites")
    params, eps_mode = resolve_epsilon(cfg["lattice"], chain[0], chain[1])
    min_stage = float(extras.get("min_stage_intensity", 0.5))
    schedule = plan_cascade(params, chain, min_stage_intensity=min_stage)
    samples = int(extras.get("samples_per_stage", 400))
    imap, stage_fidelities = run_cascade(schedule, samples_per_stage=samples)
    write_intensity_csv(outdir / "intensity.csv", imap)
    payload = schedule.to_dict()
    payload["per_stage_fidelity"] = stage_fidelities
    payload["epsilon_mode"] = eps_mode
    write_json(outdir / "schedule.json", payload)
    manifest = {
        "command": "cascade",
        "lattice": lattice_to_dict(params),
        "epsilon_mode": eps_mode,
        "chain": chain,
        "samples_per_stage": samples,
        "index_origin": INDEX_ORIGIN,
        "flip_times": schedule.flip_times,
        "per_stage_fidelity": stage_fidelities,
        "backend": BACKEND,
        "version": __version__,
    }
    write_json(outdir / "manifest.json", manifest)
    if cfg.get("emit_heatmap", False):
        write_heatmap_pgm(outdir / "heatmap.pgm", imap)
    return manifest


def cmd_floquet(cfg: dict[str, Any], outdir: Path) -> dict[str, Any]:
    extras = cfg.get("extras", {})
    input_site = int(cfg["input_site"])
    lat_cfg = cfg["lattice"]
    if lat_cfg.get("order_m") is None:
        raise ConfigError("floquet requires lattice.order_m")
    m = int(lat_cfg["order_m"])
    direction = extras.get("direction", "right")
    monitor = _monitor_site(input_site, m, direction, int(lat_cfg["n_sites"]))
    params, eps_mode = resolve_epsilon(lat_cfg, input_site, monitor)
    r = float(extras.get("r", 1.0))
    n_blocks = int(extras.get("n_blocks", 4))
    substeps = int(extras.get("substeps_per_block", 50))
    block_orders = extras.get("block_orders")
    if block_orders is not None:
        blocks = []
        for order in (int(x) for x in block_orders):
            coupling = COUPLING_RATIOS[order] * params.force
            target = _monitor_site(input_site, order, direction, params.n_sites)
            eps, _ = locate_anticrossing(
                order, coupling, params.force, params.n_sites, input_site, target,
                _locator_window(order, coupling, params.force),
            )
            blocks.append(LatticeParams(params.n_sites, coupling, params.force, eps, order))
        imap = run_floquet_blocks(blocks, r, input_site, substeps)
        plan_payload = imap.meta.copy()
    elif extras.get("alternate_sign", False):
        blocks = alternating_sign_blocks(params, n_blocks)
        imap = run_floquet_blocks(blocks, r, input_site, substeps)
        plan_payload = imap.meta.copy()
    else:
        plan = FloquetPlan(
            order_m=m, r=r, n_blocks=n_blocks, params=params, substeps_per_block=substeps
        )
        imap = run_floquet(plan, input_site)
        plan_payload = plan.to_dict()
        plan_payload["period"] = imap.meta["period"]
    plan_payload["epsilon_mode"] = eps_mode
    plan_payload["input_site"] = input_site
    write_intensity_csv(outdir / "intensity.csv", imap)
    write_json(outdir / "plan.json", plan_payload)
    manifest = {
        "command": "floquet",
        "lattice": lattice_to_dict(params),
        "epsilon_mode": eps_mode,
        "input_site": input_site,
        "r": r,
        "n_blocks": n_blocks,
        "substeps_per_block": substeps,
        "alternate_sign": bool(extras.get("alternate_sign", False)),
        "block_orders": block_orders,
        "index_origin": INDEX_ORIGIN,
        "backend": BACKEND,
        "version": __version__,
    }
    write_json(outdir / "manifest.json", manifest)
    if cfg.get("emit_heatmap", False):
        write_heatmap_pgm(outdir / "heatmap.pgm", imap)
    return manifest


def cmd_mesh_compile(cfg: dict[str, Any], outdir: Path) -> dict[str, Any]:
    extras = cfg.get("extras", {})
    lat_cfg = cfg["lattice"]
    if lat_cfg.get("order_m") is None:
        raise ConfigError("mesh-compile requires lattice.order_m")
    m = int(lat_cfg["order_m"])
    input_site = int(cfg.get("input_site", 4))
    monitor = _monitor_site(input_site, m, extras.get("direction", "right"), int(lat_cfg["n_sites"]))
    params, eps_mode = resolve_epsilon(lat_cfg, input_site, monitor)
    spec = eig_hermitian(build_hamiltonian(params))
    period = delta_min(spec).period
    fraction = float(extras.get("time_fraction", 0.5))
    target = propagator(spec, fraction * period)
    program = mesh_decompose(target)
    round_trip = program_error(target, program)
    step_pi = extras.get("quantization_step_pi")
    report: dict[str, Any] = {
        "command": "mesh-compile",
        "lattice": lattice_to_dict(params),
        "epsilon_mode": eps_mode,
        "time_fraction": fraction,
        "period": period,
        "n_settings": len(program.settings),
        "round_trip_error": round_trip,
        "backend": BACKEND,
        "version": __version__,
    }
    if step_pi is not None:
        step = float(step_pi) * math.pi
        program = quantize_program(program, step)
        report["quantization_step"] = step
        report["quantized_error"] = program_error(target, program)
    (outdir / "program.json").write_text(program_to_json(program) + "\n")
    write_json(outdir / "error_report.json", report)
    if round_trip > 1e-10:
        raise NumericalFailure(f"mesh round trip error {round_trip:.3e} exceeds 1e-10")
    return report


def _oracle_configs(n_sites: int) -> list[tuple[str, LatticeParams, int]]:
    """Named lattice configurations exercised by the verification suites."""
    out = []
    for m, force in ((0, 0.9), (1, 0.9), (2, 0.9), (3, 0.9)):
        coupling = COUPLING_RATIOS[m] * force
        eps, _ = locate_anticrossing(
            m, coupling, force, n_sites, 4, 4 + 2 * m + 1,
            _locator_window(m, coupling, force),
        )
        out.append((f"order{m}_F{force}", LatticeParams(n_sites, coupling, force, eps, m), 4))
    chain_points = (
        ("chain_order1", 1, 0.25, 2, +1),
        ("chain_order0", 0, 0.05, 7, -1),
    )
    for name, m, coupling, source, step_sign in chain_points:
        target = source + step_sign * (2 * m + 1)
        eps, _ = locate_anticrossing(
            m, coupling, 1.0, n_sites, source, target, _locator_window(m, coupling, 1.0)
        )
        out.append((name, LatticeParams(n_sites, coupling, 1.0, eps, m), source))
    return out


def oracle_integrator_deviation(
    params: LatticeParams, input_site: int, t_final: float, dt: float = 1e-3
) -> float:
    """Spectral vs RK4 max amplitude deviation on the spectrum-centered
    Hamiltonian (a uniform energy shift; physics-identical, but it keeps the
    integrator's phase truncation from being dominated by the inert overall
    tilt)."""
    h = build_hamiltonian(params)
    spec = eig_hermitian(h)
    shift = 0.5 * (spec.eigenvalues[0] + spec.eigenvalues[-1])
    hc = h - shift * np.eye(params.n_sites)
    spec_c = eig_hermitian(hc)
    psi0 = basis_state(params.n_sites, input_site)
    rk = integrate_schrodinger(hc, psi0, t_final, dt)
    ref = evolve_state(spec_c, psi0, t_final)
    return float(np.max(np.abs(rk - ref)))


def cmd_verify(cfg: dict[str, Any], outdir: Path) -> dict[str, Any]:
    extras = cfg.get("extras", {})
    n_sites = int(cfg.get("lattice", {}).get("n_sites", 12))
    seed = int(extras.get("seed", 7))
    n_random = int(extras.get("n_random", 100))
    max_oracle_time = float(extras.get("max_oracle_time", 500.0))
    properties: dict[str, dict[str, Any]] = {}

    configs = _oracle_configs(n_sites)
    worst = 0.0
    for name, params, inp in configs:
        period = delta_min(eig_hermitian(build_hamiltonian(params))).period
        t_final = min(2.0 * period, max_oracle_time)
        worst = max(worst, oracle_integrator_deviation(params, inp, t_final))
    properties["integrator_agreement"] = {"value": worst, "threshold": 1e-8, "pass": worst < 1e-8}

    factor = pin_coupling_factor(LatticeParams(12, 0.05, 1.0, 1.0, 0))
    dev = max(
        lattice_equivalence_check(params, min(params.n_sites, 12), factor)
        for _, params, _ in configs
    )
    properties["ladder_equivalence"] = {
        "value": dev,
        "threshold": 1e-12,
        "pass": dev < 1e-12,
        "coupling_factor": factor,
    }

    worst_mesh = 0.0
    for k in range(n_random):
        u = random_unitary(n_sites, seed + k)
        worst_mesh = max(worst_mesh, program_error(u, mesh_decompose(u)))
    for _, params, _ in configs:
        spec = eig_hermitian(build_hamiltonian(params))
        period = delta_min(spec).period
        u = propagator(spec, 0.5 * period)
        worst_mesh = max(worst_mesh, program_error(u, mesh_decompose(u)))
    properties["mesh_round_trip"] = {
        "value": worst_mesh,
        "threshold": 1e-10,
        "pass": worst_mesh < 1e-10,
    }

    all_pass = all(p["pass"] for p in properties.values())
    payload = {
        "command": "verify",
        "n_sites": n_sites,
        "seed": seed,
        "n_random": n_random,
        "max_oracle_time": max_oracle_time,
        "properties": properties,
        "all_pass": all_pass,
        "backend": BACKEND,
        "version": __version__,
    }
    write_json(outdir / "verify.json", payload)
    if not all_pass:
        raise NumericalFailure("one or more verification properties failed")
    return payload


_HANDLERS = {
    "simulate": cmd_simulate,
    "scan": cmd_scan,
    "cascade": cmd_cascade,
    "floquet": cmd_floquet,
    "mesh-compile": cmd_mesh_compile,
    "verify": cmd_verify,
}


def _deep_update(base: dict[str, Any], overlay: dict[str, Any]) -> dict[str, Any]:
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def load_config(
    command: str, config_path: str | None, preset_name: str | None
) -> dict[str, Any]:
    cfg: dict[str, Any] = {}
    if preset_name:
        cfg = preset(preset_name)
    if config_path:
        try:
            overlay = json.loads(Path(config_path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file is not valid JSON: {err}") from None
        if not isinstance(overlay, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _deep_update(cfg, overlay)
    if not cfg:
        raise ConfigError("no configuration given: pass --config and/or --preset")
    declared = cfg.get("command")
    if declared is not None and declared != command:
        raise ConfigError(f"config declares command {declared!r}, invoked as {command!r}")
    cfg["command"] = command
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starkjump",
        description="Tilted binary-lattice jump simulator and mesh compiler",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--output", help="output directory (default: config output_dir or '.')")
        p.add_argument("--preset", help="bundled preset name")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.preset)
        outdir = Path(args.output or cfg.get("output_dir", "."))
        outdir.mkdir(parents=True, exist_ok=True)
        _HANDLERS[args.command](cfg, outdir)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (NumericalFailure, NoOscillationError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
