"""Versioned on-disk format for HOM curves.

Column-oriented text: one row per delay point, whitespace-separated, floats
written in shortest round-trip form.  A ``#``-prefixed header carries the
schema version, a one-line JSON metadata block (config echo, seed), the
column list, and a CRC-32 checksum over the exact data-row bytes, so files
round-trip losslessly and corruption is detected on read.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigError
from .experiment import HomCurve

__all__ = ["CURVE_SCHEMA", "write_curve", "read_curve"]

CURVE_SCHEMA = "homsim-curve-v1"


def _data_rows(curve: HomCurve) -> str:
    lines = []
    if curve.counts is None:
        for d, e in zip(curve.delays, curve.expected):
            lines.append(f"{float(d)!r} {float(e)!r}")
    else:
        for d, e, c in zip(curve.delays, curve.expected, curve.counts):
            lines.append(f"{float(d)!r} {float(e)!r} {int(c)}")
    return "".join(line + "\n" for line in lines)


def write_curve(curve: HomCurve, path: Union[str, Path]) -> None:
    """Write a curve file; see the module docstring for the format."""
    columns = "delay_ps expected_rate" + (" counts" if curve.counts is not None else "")
    body = _data_rows(curve)
    checksum = zlib.crc32(body.encode("ascii"))
    meta = json.dumps(curve.metadata, sort_keys=True, separators=(",", ":"))
    header = (
        f"# {CURVE_SCHEMA}\n"
        f"# meta: {meta}\n"
        f"# columns: {columns}\n"
        f"# checksum: crc32:{checksum:08x}\n"
    )
    Path(path).write_text(header + body, encoding="ascii")


def read_curve(path: Union[str, Path]) -> HomCurve:
    """Read a curve file back, verifying schema and checksum."""
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise ConfigError(f"cannot read curve file {path}: {exc}") from exc
    lines = text.splitlines(keepends=True)
    header = {}
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        body_start = i + 1
        stripped = line[1:].strip()
        if i == 0:
            if stripped != CURVE_SCHEMA:
                raise ConfigError(
                    f"{path}: unsupported curve schema {stripped!r} (expected {CURVE_SCHEMA})"
                )
            continue
        key, _, value = stripped.partition(":")
        header[key.strip()] = value.strip()

    for required in ("meta", "columns", "checksum"):
        if required not in header:
            raise ConfigError(f"{path}: missing header field '{required}'")

    body = "".join(lines[body_start:])
    if not body.strip():
        raise ConfigError(f"{path}: curve file contains no data rows")
    declared = header["checksum"]
    if not declared.startswith("crc32:"):
        raise ConfigError(f"{path}: malformed checksum field {declared!r}")
    actual = zlib.crc32(body.encode("ascii"))
    if f"{actual:08x}" != declared[len("crc32:") :]:
        raise ConfigError(f"{path}: checksum mismatch; file corrupted or edited")

    try:
        metadata = json.loads(header["meta"])
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed meta JSON: {exc}") from exc

    columns = header["columns"].split()
    if columns not in (["delay_ps", "expected_rate"], ["delay_ps", "expected_rate", "counts"]):
        raise ConfigError(f"{path}: unsupported column layout {columns}")

    rows = [line.split() for line in body.splitlines() if line.strip()]
    if any(len(row) != len(columns) for row in rows):
        raise ConfigError(f"{path}: ragged data rows")
    try:
        delays = np.array([float(r[0]) for r in rows])
        expected = np.array([float(r[1]) for r in rows])
        counts = np.array([int(r[2]) for r in rows]) if len(columns) == 3 else None
    except ValueError as exc:
        raise ConfigError(f"{path}: unparsable data row: {exc}") from exc
    return HomCurve(delays=delays, expected=expected, counts=counts, metadata=metadata)
