"""Readers for the frozen CSV schemas of the phi4 experiment tool.

Each reader validates the header against the documented column set and fails
with a message naming the first missing column.
"""

from __future__ import annotations

import csv
from pathlib import Path

FTLE_COLUMNS = ("alpha", "seed", "T", "N", "dt", "burn_in",
                "lambda_T", "iters", "residual", "converged")
STEER_COLUMNS = ("lambda_target", "kappa", "phi0", "f", "c",
                 "lambda_measured", "abs_err")
WICK_COLUMNS = ("N", "m", "C_N", "emp_var", "se", "zscore")


class SchemaError(ValueError):
    """Input table does not match the frozen schema."""


def _read_rows(path, required) -> list[dict]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) "
                              + ", ".join(f"'{c}'" for c in missing))
        return list(reader)


def _floats(rows, col):
    return [float(r[col]) for r in rows]


def read_ftle(path) -> dict:
    """FTLE table grouped by alpha: ``{alpha: [lambda_T, ...]}``."""
    rows = _read_rows(path, FTLE_COLUMNS)
    by_alpha: dict[float, list[float]] = {}
    for r in rows:
        by_alpha.setdefault(float(r["alpha"]), []).append(float(r["lambda_T"]))
    return by_alpha


def read_steer(path) -> dict:
    rows = _read_rows(path, STEER_COLUMNS)
    return {
        "target": _floats(rows, "lambda_target"),
        "measured": _floats(rows, "lambda_measured"),
        "abs_err": _floats(rows, "abs_err"),
    }


def read_wick(path) -> dict:
    rows = _read_rows(path, WICK_COLUMNS)
    return {
        "N": [int(r["N"]) for r in rows],
        "C_N": _floats(rows, "C_N"),
        "emp_var": _floats(rows, "emp_var"),
        "zscore": _floats(rows, "zscore"),
    }
