"""The four figure kinds, rendered deterministically.

Figures are batch artifacts: fixed dpi, seeded jitter, pinned PNG metadata,
so identical inputs give identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .paths import grid_values, read_path_file
from .tables import read_ftle, read_steer, read_wick

KINDS = ("hist", "growth", "steer", "snapshot")

_SAVE_KW = dict(dpi=150, metadata={"Software": "phi4-plot"})


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    out: Path
    seed: int = 0
    snapshot_index: int = -1
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def _finish(fig, spec: FigureSpec) -> Path:
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return out


def plot_hist(spec: FigureSpec) -> Path:
    """Exponent histograms, one panel per alpha."""
    by_alpha = read_ftle(spec.inputs[0])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if not by_alpha:
        ax.text(0.5, 0.5, "no rows in the table", ha="center", va="center",
                transform=ax.transAxes, color="crimson")
        ax.set_xlabel("finite-time exponent")
        ax.set_ylabel("count")
        return _finish(fig, spec)
    rng = np.random.default_rng(spec.seed)
    for alpha in sorted(by_alpha):
        lams = np.asarray(by_alpha[alpha])
        ax.hist(lams, bins="auto", alpha=0.55, label=f"alpha = {alpha:g}")
        # seeded rug jitter keeps ties visible without changing between runs
        y = 0.02 * rng.random(len(lams))
        ax.plot(lams, y, "|", ms=6, alpha=0.4)
    ax.axvline(0.0, color="k", lw=0.8, ls=":")
    ax.set_xlabel("finite-time exponent")
    ax.set_ylabel("count")
    ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    return _finish(fig, spec)


def plot_growth(spec: FigureSpec) -> Path:
    """Renormalization constant against log N (near-linear in 2d)."""
    tab = read_wick(spec.inputs[0])
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    n = np.asarray(tab["N"], dtype=float)
    ax.plot(np.log2(n), tab["C_N"], "o-", label="constant")
    finite = np.isfinite(tab["emp_var"])
    if finite.any():
        ax.plot(np.log2(n[finite]), np.asarray(tab["emp_var"])[finite], "s",
                mfc="none", label="MC variance")
    ax.set_xlabel("log2 N")
    ax.set_ylabel("stationary pointwise variance")
    ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    return _finish(fig, spec)


def plot_steer(spec: FigureSpec) -> Path:
    """Measured against target rate, with the diagonal for reference."""
    tab = read_steer(spec.inputs[0])
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    t = np.asarray(tab["target"])
    m = np.asarray(tab["measured"])
    lo = float(min(t.min(), m.min())) - 0.5 if len(t) else -1.0
    hi = float(max(t.max(), m.max())) + 0.5 if len(t) else 1.0
    ax.plot([lo, hi], [lo, hi], "-", color="0.6", lw=1.0, label="diagonal")
    ax.plot(t, m, "o", ms=5)
    ax.set_xlabel("target rate")
    ax.set_ylabel("measured rate")
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    worst = max(tab["abs_err"]) if tab["abs_err"] else float("nan")
    ax.set_title(spec.title or f"max |error| = {worst:.2e}")
    ax.legend()
    return _finish(fig, spec)


def plot_snapshot(spec: FigureSpec) -> Path:
    """One stored field snapshot on its grid (image in 2d, line in 1d)."""
    header, times, coeffs = read_path_file(spec.inputs[0])
    i = spec.snapshot_index if spec.snapshot_index >= 0 else len(times) - 1
    vals = grid_values(header, coeffs[i])
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    if vals.ndim == 2:
        im = ax.imshow(vals.T, origin="lower", extent=(0, 1, 0, 1),
                       cmap="RdBu_r")
        fig.colorbar(im, ax=ax, shrink=0.85)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    else:
        x = np.arange(len(vals)) / len(vals)
        ax.plot(x, vals, lw=1.2)
        ax.set_xlabel("x")
        ax.set_ylabel("field")
    kind = header.get("kind", "field")
    ax.set_title(spec.title or f"{kind} at t = {times[i]:.3f}")
    return _finish(fig, spec)


def plot(spec: FigureSpec) -> Path:
    return {"hist": plot_hist, "growth": plot_growth,
            "steer": plot_steer, "snapshot": plot_snapshot}[spec.kind](spec)
