"""File formats and run manifests.

Formats owned here:

* IV curves: CSV with header ``voltage_V,current_A`` (one junction per
  file, id from the file name) or long form with a leading
  ``junction_id`` column.
* Scalar rasters (topography, intensity maps): headered ASCII grids.
* Intensity maps additionally export as 16-bit binary PGM.
* Analysis records: plain CSV with a header row.
* Run manifests: JSON carrying command, resolved configuration, master
  seed, code version and input digests - enough to replay a run
  byte-identically.

Floats are written with ``repr`` (shortest round-trip), so ingesting an
emitted CSV reproduces the values bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DataFormatError
from .simmons import IVCurve
from .stem_forward import EdsImage, TopographyMap

__all__ = [
    "ingest_iv",
    "write_iv_csv",
    "write_iv_long_csv",
    "read_grid",
    "write_grid",
    "read_topography",
    "read_eds_image",
    "write_pgm16",
    "write_records_csv",
    "read_records_csv",
    "JunctionRecord",
    "RunManifest",
    "sha256_of",
    "format_float",
]


def format_float(x) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(x))


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# IV curves
# ---------------------------------------------------------------------------

_IV_HEADER = ["voltage_V", "current_A"]
_IV_LONG_HEADER = ["junction_id", "voltage_V", "current_A"]


def ingest_iv(path) -> list[tuple[str, IVCurve]]:
    """Read one or many junction IVs from a CSV file.

    Returns a list of (junction_id, curve); a two-column file yields a
    single entry whose id is the file stem.  Rows are sorted by voltage;
    malformed rows and duplicate voltages are rejected with the
    offending line number.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header == _IV_HEADER:
            long_form = False
        elif header == _IV_LONG_HEADER:
            long_form = True
        else:
            raise DataFormatError(
                f"{path}:1: expected header '{','.join(_IV_HEADER)}' or "
                f"'{','.join(_IV_LONG_HEADER)}', got '{','.join(header)}'"
            )
        groups: dict[str, list] = {}
        order: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            expected = 3 if long_form else 2
            if len(row) != expected:
                raise DataFormatError(
                    f"{path}:{lineno}: expected {expected} columns, got {len(row)}"
                )
            jid = row[0].strip() if long_form else path.stem
            try:
                v = float(row[-2])
                i = float(row[-1])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            if not (np.isfinite(v) and np.isfinite(i)):
                raise DataFormatError(f"{path}:{lineno}: non-finite sample")
            if jid not in groups:
                groups[jid] = []
                order.append(jid)
            groups[jid].append((v, i, lineno))
    out = []
    for jid in order:
        rows = sorted(groups[jid])
        volts = [r[0] for r in rows]
        for a, b in zip(rows, rows[1:]):
            if a[0] == b[0]:
                raise DataFormatError(
                    f"{path}:{b[2]}: duplicate voltage {b[0]} for junction '{jid}'"
                )
        out.append((jid, IVCurve(np.array(volts), np.array([r[1] for r in rows]))))
    return out


def write_iv_csv(path, curve: IVCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_IV_HEADER)
        for v, i in zip(curve.voltage, curve.current):
            w.writerow([format_float(v), format_float(i)])


def write_iv_long_csv(path, curves: Sequence[tuple[str, IVCurve]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_IV_LONG_HEADER)
        for jid, curve in curves:
            for v, i in zip(curve.voltage, curve.current):
                w.writerow([jid, format_float(v), format_float(i)])


# ---------------------------------------------------------------------------
# Scalar rasters
# ---------------------------------------------------------------------------


def write_grid(path, pixel_size: float, values: np.ndarray, kind: str) -> None:
    values = np.asarray(values, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"# {kind} grid\n")
        fh.write(f"pixel_size_nm={format_float(pixel_size)}\n")
        fh.write(f"rows={values.shape[0]}\n")
        fh.write(f"cols={values.shape[1]}\n")
        for row in values:
            fh.write(" ".join(format_float(v) for v in row) + "\n")


def read_grid(path) -> tuple[float, np.ndarray]:
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    idx = 0
    if lines and lines[0].startswith("#"):
        idx = 1
    meta = {}
    while idx < len(lines) and "=" in lines[idx]:
        key, _, val = lines[idx].partition("=")
        meta[key.strip()] = val.strip()
        idx += 1
    try:
        pixel_size = float(meta["pixel_size_nm"])
        rows = int(meta["rows"])
        cols = int(meta["cols"])
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"{path}: bad or missing grid header ({exc})") from None
    body = lines[idx : idx + rows]
    if len(body) != rows:
        raise DataFormatError(f"{path}: expected {rows} data rows, got {len(body)}")
    try:
        values = np.array([[float(v) for v in line.split()] for line in body])
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None
    if values.shape != (rows, cols):
        raise DataFormatError(
            f"{path}: data shape {values.shape} does not match header ({rows}, {cols})"
        )
    return pixel_size, values


def read_topography(path) -> TopographyMap:
    pixel_size, values = read_grid(path)
    return TopographyMap(pixel_size, values)


def read_eds_image(path) -> EdsImage:
    pixel_size, values = read_grid(path)
    return EdsImage(pixel_size, values)


def write_pgm16(path, image: EdsImage) -> None:
    """Binary 16-bit PGM (maxval 65535, big-endian), min-max scaled."""
    v = image.values
    lo, hi = float(v.min()), float(v.max())
    scaled = np.zeros_like(v) if hi <= lo else (v - lo) / (hi - lo)
    data = (scaled * 65535).round().astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{v.shape[1]} {v.shape[0]}\n65535\n".encode())
        fh.write(data.tobytes())


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass
class JunctionRecord:
    """Per-junction analysis outcome, optionally wafer-located."""

    junction_id: str
    resistance: Optional[float] = None
    t_fit: Optional[float] = None
    phi_fit: Optional[float] = None
    v_bd: Optional[float] = None
    wafer_x: Optional[int] = None
    wafer_y: Optional[int] = None
    residual_norm: Optional[float] = None
    converged: Optional[bool] = None

    _FIELDS = (
        "junction_id",
        "wafer_x",
        "wafer_y",
        "resistance",
        "t_fit",
        "phi_fit",
        "v_bd",
        "residual_norm",
        "converged",
    )

    def to_row(self) -> dict:
        out = {}
        for name in self._FIELDS:
            val = getattr(self, name)
            if val is None:
                out[name] = ""
            elif isinstance(val, bool):
                out[name] = "1" if val else "0"
            elif isinstance(val, float):
                out[name] = format_float(val)
            else:
                out[name] = str(val)
        return out

    @classmethod
    def from_row(cls, row: dict) -> "JunctionRecord":
        def opt_float(key):
            s = row.get(key, "")
            return float(s) if s not in ("", None) else None

        def opt_int(key):
            s = row.get(key, "")
            return int(float(s)) if s not in ("", None) else None

        conv = row.get("converged", "")
        return cls(
            junction_id=row["junction_id"],
            wafer_x=opt_int("wafer_x"),
            wafer_y=opt_int("wafer_y"),
            resistance=opt_float("resistance"),
            t_fit=opt_float("t_fit"),
            phi_fit=opt_float("phi_fit"),
            v_bd=opt_float("v_bd"),
            residual_norm=opt_float("residual_norm"),
            converged=bool(int(conv)) if conv not in ("", None) else None,
        )


def write_records_csv(path, rows: Sequence[dict], fieldnames: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fieldnames))
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(row.get(k, "")) for k in fieldnames})


def _cell(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format_float(v)
    return v


def read_records_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# Run manifest
# ---------------------------------------------------------------------------


@dataclass
class RunManifest:
    """Everything needed to reproduce a command's outputs bit-exactly."""

    command: str
    config: dict
    master_seed: int
    code_version: str
    input_digests: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(
                {
                    "command": self.command,
                    "config": self.config,
                    "master_seed": self.master_seed,
                    "code_version": self.code_version,
                    "input_digests": self.input_digests,
                    "outputs": self.outputs,
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        with open(path) as fh:
            raw = json.load(fh)
        return cls(
            command=raw["command"],
            config=raw["config"],
            master_seed=raw["master_seed"],
            code_version=raw["code_version"],
            input_digests=raw.get("input_digests", {}),
            outputs=raw.get("outputs", []),
        )
