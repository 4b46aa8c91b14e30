"""Path files: one JSON header line, then raw binary snapshots.

Layout of a ``.fpath`` file:

* line 1 — UTF-8 JSON object ending in ``\\n`` with at least ``format``
  (``"phi4-path"``), ``version`` (1), ``kind`` (free-form tag), ``dim``,
  ``cutoff``, ``phys_points``, ``n_snapshots`` and optional ``meta``;
* then ``n_snapshots`` float64 snapshot times (little-endian);
* then the coefficients as complex128, C-order, shape
  ``(n_snapshots, 2*cutoff+1, ...)`` with frequencies ordered
  ``[0, 1, ..., N, -N, ..., -1]`` along every axis.

The format is part of the tool's public interface: the plotting frontend
parses it independently.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grids import SpectralField, TorusGrid
from .solver import FieldPath

FORMAT_NAME = "phi4-path"
FORMAT_VERSION = 1


def save_path(path_file, field_path: FieldPath, kind: str, meta: dict | None = None):
    """Write a snapshot path; ``meta`` must be JSON-serializable."""
    grid = field_path.grid
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "dim": grid.dim,
        "cutoff": grid.cutoff,
        "phys_points": grid.phys_points,
        "n_snapshots": len(field_path),
        "meta": meta or {},
    }
    path_file = Path(path_file)
    path_file.parent.mkdir(parents=True, exist_ok=True)
    with open(path_file, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        fh.write(np.ascontiguousarray(field_path.times, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(field_path.coeffs, dtype="<c16").tobytes())


def load_path(path_file) -> tuple[FieldPath, dict]:
    """Read a snapshot path; returns the path and its header."""
    with open(path_file, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        if header.get("format") != FORMAT_NAME:
            raise ValueError(f"{path_file}: not a {FORMAT_NAME} file")
        if header.get("version") != FORMAT_VERSION:
            raise ValueError(f"{path_file}: unsupported version {header.get('version')}")
        n = header["n_snapshots"]
        grid = TorusGrid(header["dim"], header["cutoff"], header["phys_points"])
        times = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
        raw = fh.read(16 * n * grid.n_modes)
        coeffs = np.frombuffer(raw, dtype="<c16").reshape((n,) + grid.coeff_shape).copy()
    return FieldPath(grid, times, coeffs), header


def save_field(path_file, field: SpectralField, kind: str = "field",
               meta: dict | None = None):
    """Write a single snapshot (a path of length one at t=0)."""
    fp = FieldPath(field.grid, np.zeros(1), field.coeffs[np.newaxis])
    save_path(path_file, fp, kind, meta)


def load_field(path_file, snapshot: int = 0) -> tuple[SpectralField, dict]:
    fp, header = load_path(path_file)
    return fp.field(snapshot), header
