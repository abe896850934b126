"""Shipped example experiments.

Three configurations mirroring the demonstrations the simulator targets:
a balanced interferometer with no dispersion module, the same with a common
50 km module in both arms (dispersion cancellation), and an 80 m fiber in one
arm only (dispersion measurement).  They double as documentation of the
experiment-file format.
"""

from __future__ import annotations

from importlib import resources

from .errors import ConfigError

__all__ = ["preset_names", "preset_text"]


def _data_dir():
    return resources.files("homsim") / "data"


def preset_names() -> list[str]:
    """Names of the shipped experiment files (without extension)."""
    return sorted(p.name[: -len(".json")] for p in _data_dir().iterdir() if p.name.endswith(".json"))


def preset_text(name: str) -> str:
    """Raw JSON text of a shipped experiment file."""
    candidate = _data_dir() / f"{name}.json"
    try:
        return candidate.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from exc
