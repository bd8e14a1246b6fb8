"""File emission: CSV intensity tables, JSON manifests, binary PGM heatmaps,
and the lattice-parameter JSON schema used by configs and manifests.

Numeric text uses 12 significant digits so identical runs produce
byte-identical artifacts without resorting to binary formats.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import IntensityMap
from .lattice import LatticeParams

CSV_FORMAT = "{:.12g}"


def fmt(value: float) -> str:
    return CSV_FORMAT.format(float(value))


def lattice_to_dict(p: LatticeParams) -> dict[str, Any]:
    return {
        "n_sites": p.n_sites,
        "coupling": p.coupling,
        "force": p.force,
        "epsilon": p.epsilon,
        "order_m": p.order_m,
    }


def lattice_from_dict(d: dict[str, Any]) -> LatticeParams:
    try:
        return LatticeParams(
            n_sites=int(d["n_sites"]),
            coupling=float(d["coupling"]),
            force=float(d["force"]),
            epsilon=float(d["epsilon"]),
            order_m=None if d.get("order_m") is None else int(d["order_m"]),
        )
    except KeyError as missing:
        raise ValueError(f"lattice config missing field {missing}") from None


def write_intensity_csv(path: Path, imap: IntensityMap) -> None:
    """Time column first, one site column per channel; protocol runs that
    carry per-row stage indices gain a ``stage`` column after ``t``."""
    rows = imap.clamped()
    n = imap.n_sites
    stages = imap.meta.get("row_stages")
    columns = ["t"] + (["stage"] if stages is not None else [])
    header = ",".join(columns + [f"site_{k}" for k in range(n)])
    lines = [header]
    for k, (t, row) in enumerate(zip(imap.times, rows)):
        cells = [fmt(t)]
        if stages is not None:
            cells.append(str(int(stages[k])))
        cells.extend(fmt(v) for v in row)
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def read_intensity_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (times, site intensities); any stage column is skipped."""
    lines = path.read_text().strip().splitlines()
    names = lines[0].split(",")
    site_cols = [k for k, name in enumerate(names) if name.startswith("site_")]
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return data[:, 0], data[:, site_cols]


def write_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def write_heatmap_pgm(path: Path, imap: IntensityMap) -> None:
    """16-bit binary PGM: rows are time samples, columns are sites.

    Intensity 1.0 maps to 65535; samples are big-endian per the format.
    """
    rows = imap.clamped()
    height, width = rows.shape
    pixels = np.round(rows * 65535.0).astype(">u2")
    with path.open("wb") as fh:
        fh.write(f"P5\n{width} {height}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_heatmap_pgm(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    width, height = (int(x) for x in parts[1].split())
    maxval = int(parts[2])
    if maxval != 65535:
        raise ValueError("expected 16-bit PGM")
    pixels = np.frombuffer(parts[3], dtype=">u2", count=width * height)
    return pixels.reshape(height, width).astype(float) / 65535.0


def write_scan_csv(path: Path, rows: list[dict[str, Any]]) -> None:
    columns = [
        "m",
        "F",
        "V",
        "epsilon_star",
        "delta_min_global",
        "delta_min_pair",
        "T_theory",
        "T_fitted",
        "rel_error",
        "status",
    ]
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            value = row[col]
            if col == "status":
                cells.append(str(value))
            elif col == "m":
                cells.append(str(int(value)))
            else:
                cells.append(fmt(value) if value == value else "nan")
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
