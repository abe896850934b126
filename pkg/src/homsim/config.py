"""Declarative experiment files.

JSON documents with explicit units in every key name map 1:1 onto
ScanConfig plus the two arm element chains.  Loading validates the schema
strictly (unknown keys are rejected, physical bounds enforced) and
normalizes to a canonical dict: dispersion parameters are resolved to
beta2_ps2_per_km, the delay grid is materialized, and all defaults are
filled in, so load -> dump -> load is a fixed point.

Example::

    {
      "schema": "homsim-experiment-v1",
      "source": {
        "pulse_fwhm_ps": 0.732,
        "center_wavelength_nm": 1565.0,
        "mean_photon_number_per_arm": 0.015,
        "source_g2": 1.0
      },
      "arm_a": {"elements": [
        {"length_m": 80.0, "dispersion_ps_per_nm_km": 15.04}
      ]},
      "arm_b": {"elements": []},
      "scan": {
        "delay_points": 41,
        "delay_halfspan_dip_widths": 3.0,
        "repetition_rate_hz": 5.0e6,
        "integration_time_s": 10.0,
        "detector_efficiency": 0.68,
        "coincidence_window_ps": 1000.0,
        "timing_jitter_fwhm_ps": 270.0,
        "seed": 101
      }
    }
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

from .errors import ConfigError
from .experiment import ScanConfig, default_delay_grid
from .hom import ArmConfig
from .units import dispersion_parameter_to_beta2
from .wavepacket import (
    DEFAULT_GRID_POINTS,
    DEFAULT_SPAN_FACTOR,
    DispersiveElement,
    GaussianPulse,
)

__all__ = [
    "EXPERIMENT_SCHEMA",
    "load_experiment",
    "parse_experiment",
    "normalize_experiment",
    "dump_experiment",
    "scan_config_from_normalized",
]

EXPERIMENT_SCHEMA = "homsim-experiment-v1"

_SOURCE_DEFAULTS = {
    "center_wavelength_nm": 1565.0,
    "mean_photon_number_per_arm": 0.015,
    "source_g2": 1.0,
}
_SCAN_DEFAULTS = {
    "delay_points": 41,
    "delay_halfspan_dip_widths": 3.0,
    "repetition_rate_hz": 5.0e6,
    "integration_time_s": 10.0,
    "detector_efficiency": 0.68,
    "coincidence_window_ps": 1000.0,
    "timing_jitter_fwhm_ps": 270.0,
    "seed": None,
}
_GRID_DEFAULTS = {
    "n_points": DEFAULT_GRID_POINTS,
    "span_factor": DEFAULT_SPAN_FACTOR,
}


def _require_mapping(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _number(mapping: dict, key: str, where: str, *, default=None, minimum=None,
            maximum=None, strict_min=False) -> float:
    if key not in mapping:
        if default is None:
            raise ConfigError(f"{where}: missing required key '{key}'")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    value = float(value)
    if minimum is not None and (value <= minimum if strict_min else value < minimum):
        op = ">" if strict_min else ">="
        raise ConfigError(f"{where}.{key}: must be {op} {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(f"{where}.{key}: must be <= {maximum}, got {value}")
    return value


def _parse_element(raw: Any, where: str, default_wavelength: float) -> dict:
    raw = _require_mapping(raw, where)
    _reject_unknown(
        raw,
        {"length_m", "beta1_ps_per_m", "beta2_ps2_per_km",
         "dispersion_ps_per_nm_km", "dispersion_wavelength_nm"},
        where,
    )
    length = _number(raw, "length_m", where, minimum=0.0)
    beta1 = _number(raw, "beta1_ps_per_m", where, default=0.0)
    has_beta2 = "beta2_ps2_per_km" in raw
    has_d = "dispersion_ps_per_nm_km" in raw
    if has_beta2 and has_d:
        raise ConfigError(f"{where}: give either beta2_ps2_per_km or dispersion_ps_per_nm_km, not both")
    if has_d:
        d = _number(raw, "dispersion_ps_per_nm_km", where)
        wavelength = _number(raw, "dispersion_wavelength_nm", where,
                             default=default_wavelength, minimum=0.0, strict_min=True)
        beta2 = dispersion_parameter_to_beta2(d, wavelength)
    else:
        beta2 = _number(raw, "beta2_ps2_per_km", where, default=0.0)
    return {"length_m": length, "beta1_ps_per_m": beta1, "beta2_ps2_per_km": beta2}


def parse_experiment(raw: dict) -> dict:
    """Validate a raw experiment document and return its canonical form."""
    raw = _require_mapping(raw, "experiment")
    _reject_unknown(raw, {"schema", "source", "arm_a", "arm_b", "scan", "grid"}, "experiment")
    schema = raw.get("schema")
    if schema != EXPERIMENT_SCHEMA:
        raise ConfigError(
            f"experiment.schema: expected {EXPERIMENT_SCHEMA!r}, got {schema!r}"
        )

    source = _require_mapping(raw.get("source", {}), "source")
    _reject_unknown(source, {"pulse_fwhm_ps"} | set(_SOURCE_DEFAULTS), "source")
    pulse_fwhm = _number(source, "pulse_fwhm_ps", "source", minimum=0.0, strict_min=True)
    wavelength = _number(source, "center_wavelength_nm", "source",
                         default=_SOURCE_DEFAULTS["center_wavelength_nm"],
                         minimum=0.0, strict_min=True)
    photon_number = _number(source, "mean_photon_number_per_arm", "source",
                            default=_SOURCE_DEFAULTS["mean_photon_number_per_arm"], minimum=0.0)
    g2 = _number(source, "source_g2", "source", default=_SOURCE_DEFAULTS["source_g2"], minimum=0.0)

    arms = {}
    for arm_key in ("arm_a", "arm_b"):
        arm = _require_mapping(raw.get(arm_key, {"elements": []}), arm_key)
        _reject_unknown(arm, {"elements"}, arm_key)
        elements = arm.get("elements", [])
        if not isinstance(elements, list):
            raise ConfigError(f"{arm_key}.elements: expected a list")
        arms[arm_key] = [
            _parse_element(e, f"{arm_key}.elements[{i}]", wavelength)
            for i, e in enumerate(elements)
        ]

    scan = _require_mapping(raw.get("scan", {}), "scan")
    _reject_unknown(scan, {"delays_ps"} | set(_SCAN_DEFAULTS), "scan")
    norm_scan: dict[str, Any] = {}
    norm_scan["repetition_rate_hz"] = _number(
        scan, "repetition_rate_hz", "scan",
        default=_SCAN_DEFAULTS["repetition_rate_hz"], minimum=0.0, strict_min=True)
    norm_scan["integration_time_s"] = _number(
        scan, "integration_time_s", "scan",
        default=_SCAN_DEFAULTS["integration_time_s"], minimum=0.0, strict_min=True)
    norm_scan["detector_efficiency"] = _number(
        scan, "detector_efficiency", "scan",
        default=_SCAN_DEFAULTS["detector_efficiency"], minimum=0.0, maximum=1.0)
    norm_scan["coincidence_window_ps"] = _number(
        scan, "coincidence_window_ps", "scan",
        default=_SCAN_DEFAULTS["coincidence_window_ps"], minimum=0.0, strict_min=True)
    norm_scan["timing_jitter_fwhm_ps"] = _number(
        scan, "timing_jitter_fwhm_ps", "scan",
        default=_SCAN_DEFAULTS["timing_jitter_fwhm_ps"], minimum=0.0)

    seed = scan.get("seed", None)
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError(f"scan.seed: expected an integer or null, got {seed!r}")
    if seed is not None and seed < 0:
        raise ConfigError(f"scan.seed: must be >= 0, got {seed}")
    norm_scan["seed"] = seed

    if "delays_ps" in scan:
        for shadowed in ("delay_points", "delay_halfspan_dip_widths"):
            if shadowed in scan:
                raise ConfigError(f"scan.{shadowed}: meaningless when delays_ps is given")
        delays = scan["delays_ps"]
        if (not isinstance(delays, list) or len(delays) < 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in delays)):
            raise ConfigError("scan.delays_ps: expected a list of at least 2 numbers")
        delays = [float(v) for v in delays]
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ConfigError("scan.delays_ps: must be strictly increasing")
    else:
        n_points = _number(scan, "delay_points", "scan",
                           default=_SCAN_DEFAULTS["delay_points"], minimum=6)
        if n_points != int(n_points):
            raise ConfigError(f"scan.delay_points: expected an integer, got {n_points}")
        halfspan = _number(scan, "delay_halfspan_dip_widths", "scan",
                           default=_SCAN_DEFAULTS["delay_halfspan_dip_widths"],
                           minimum=0.0, strict_min=True)
        pulse = GaussianPulse.from_fwhm(pulse_fwhm)
        delays = [
            float(t) for t in default_delay_grid(
                _arm_config(arms["arm_a"]), _arm_config(arms["arm_b"]),
                pulse.t0_width, int(n_points), halfspan)
        ]
    norm_scan["delays_ps"] = delays

    grid = _require_mapping(raw.get("grid", {}), "grid")
    _reject_unknown(grid, set(_GRID_DEFAULTS), "grid")
    n_points = _number(grid, "n_points", "grid", default=_GRID_DEFAULTS["n_points"], minimum=16)
    if n_points != int(n_points):
        raise ConfigError(f"grid.n_points: expected an integer, got {n_points}")
    span_factor = _number(grid, "span_factor", "grid",
                          default=_GRID_DEFAULTS["span_factor"], minimum=8.0)

    return {
        "schema": EXPERIMENT_SCHEMA,
        "source": {
            "pulse_fwhm_ps": pulse_fwhm,
            "center_wavelength_nm": wavelength,
            "mean_photon_number_per_arm": photon_number,
            "source_g2": g2,
        },
        "arm_a": {"elements": arms["arm_a"]},
        "arm_b": {"elements": arms["arm_b"]},
        "scan": {key: norm_scan[key] for key in sorted(norm_scan)},
        "grid": {"n_points": int(n_points), "span_factor": span_factor},
    }


def _arm_config(elements: list[dict]) -> ArmConfig:
    return ArmConfig(tuple(
        DispersiveElement(
            length=e["length_m"], beta1=e["beta1_ps_per_m"], beta2=e["beta2_ps2_per_km"]
        )
        for e in elements
    ))


def scan_config_from_normalized(normalized: dict) -> ScanConfig:
    """Build the ScanConfig described by a canonical experiment dict."""
    source = normalized["source"]
    pulse = GaussianPulse.from_fwhm(
        source["pulse_fwhm_ps"],
        center_wavelength=source["center_wavelength_nm"],
        mean_photon_number=source["mean_photon_number_per_arm"],
        source_g2=source["source_g2"],
    )
    scan = normalized["scan"]
    return ScanConfig(
        pulse=pulse,
        arm_a=_arm_config(normalized["arm_a"]["elements"]),
        arm_b=_arm_config(normalized["arm_b"]["elements"]),
        delays=tuple(scan["delays_ps"]),
        repetition_rate=scan["repetition_rate_hz"],
        integration_time=scan["integration_time_s"],
        detector_efficiency=scan["detector_efficiency"],
        coincidence_window=scan["coincidence_window_ps"],
        timing_jitter_fwhm=scan["timing_jitter_fwhm_ps"],
        rng_seed=scan["seed"],
        grid_points=normalized["grid"]["n_points"],
        grid_span_factor=normalized["grid"]["span_factor"],
    )


def normalize_experiment(raw: dict) -> dict:
    """Alias of parse_experiment for symmetry with dump_experiment."""
    return parse_experiment(raw)


def load_experiment(path: Union[str, Path]) -> tuple[dict, ScanConfig]:
    """Read, validate and normalize an experiment file; return (dict, ScanConfig)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read experiment file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    normalized = parse_experiment(raw)
    return normalized, scan_config_from_normalized(normalized)


def dump_experiment(normalized: dict, path: Optional[Union[str, Path]] = None) -> str:
    """Serialize a canonical experiment dict (stable key order); optionally write it."""
    text = json.dumps(normalized, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
