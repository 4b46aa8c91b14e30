"""Independent reader for phi4 snapshot path files.

The format (documented by the producing tool): a JSON header line with
``format: "phi4-path"``, ``version: 1``, ``dim``, ``cutoff``,
``phys_points``, ``n_snapshots``; then ``n_snapshots`` little-endian float64
times; then complex128 coefficients of shape ``(n_snapshots, 2N+1, ...)`` in
C order, frequencies ordered ``[0..N, -N..-1]`` per axis.
"""

from __future__ import annotations

import json

import numpy as np

from .tables import SchemaError


def read_path_file(path) -> tuple[dict, np.ndarray, np.ndarray]:
    """Returns ``(header, times, coeffs)``."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("format") != "phi4-path" or header.get("version") != 1:
            raise SchemaError(f"{path}: not a phi4-path v1 file")
        n = int(header["n_snapshots"])
        dim = int(header["dim"])
        size = 2 * int(header["cutoff"]) + 1
        times = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
        coeffs = np.frombuffer(fh.read(16 * n * size**dim), dtype="<c16")
        coeffs = coeffs.reshape((n,) + (size,) * dim).copy()
    return header, times, coeffs


def grid_values(header: dict, snapshot: np.ndarray) -> np.ndarray:
    """Evaluate one coefficient snapshot on its uniform grid.

    With the documented frequency ordering, embedding the coefficients into
    an M-point FFT layout and applying the inverse transform (times M^d)
    reproduces the field values.
    """
    dim = int(header["dim"])
    cutoff = int(header["cutoff"])
    m = int(header["phys_points"])
    freqs = np.fft.fftfreq(2 * cutoff + 1, d=1.0 / (2 * cutoff + 1)).astype(int)
    idx = np.mod(freqs, m)
    full = np.zeros((m,) * dim, dtype=complex)
    if dim == 1:
        full[idx] = snapshot
    else:
        full[np.ix_(idx, idx)] = snapshot
    return np.real(np.fft.ifftn(full)) * m**dim
