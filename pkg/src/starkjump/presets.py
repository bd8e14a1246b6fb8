"""Bundled run configurations: each figure-style experiment is one command.

Presets ship as JSON files under ``starkjump/configs``; each carries a
``description`` field and `epsilon: "auto"` entries that the front-end
resolves through the numeric anticrossing locator at run time.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any

_CONFIG_PACKAGE = "starkjump.configs"


def available_presets() -> list[str]:
    names = []
    for entry in resources.files(_CONFIG_PACKAGE).iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[: -len(".json")])
    return sorted(names)


def preset(name: str) -> dict[str, Any]:
    path = resources.files(_CONFIG_PACKAGE) / f"{name}.json"
    try:
        text = path.read_text()
    except (FileNotFoundError, OSError):
        known = ", ".join(available_presets())
        raise ValueError(f"unknown preset {name!r}; available: {known}") from None
    return json.loads(text)


PRESET_NAMES = (
    "fig1",
    "fig3",
    "fig4-top",
    "fig4-bottom",
    "fig5-full",
    "fig5-half",
    "mesh-demo",
    "verify-default",
)
