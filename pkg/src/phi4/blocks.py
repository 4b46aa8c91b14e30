"""Dyadic frequency blocks, Holder-Besov norms and Bony paraproducts.

Blocks are sharp (indicator) annuli in ``|k|_2``: block ``-1`` holds the zero
mode alone, block ``j >= 0`` holds ``2^(j-1) <= |k|_2 < 2^j``.  On a finite
band this gives an exact partition, exact low/high projections and an exact
Bony reconstruction ``u<v + u.v + v<u = uv`` (each piece is a dealiased
product of band-limited fields).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grids import (
    GridMismatchError,
    SpectralField,
    TorusGrid,
    phys_values,
    sup_norm,
    to_spectral,
    _k_sq,
)


@lru_cache(maxsize=None)
def _block_index(dim: int, cutoff: int) -> np.ndarray:
    """Block index per mode: -1 for k=0, else floor(log2 |k|_2) + 1."""
    ksq = _k_sq(dim, cutoff)
    idx = np.full(ksq.shape, -1, dtype=np.int64)
    nz = ksq > 0
    # 2^(j-1) <= |k| < 2^j  <=>  j = floor(log2|k|) + 1
    idx[nz] = np.floor(0.5 * np.log2(ksq[nz])).astype(np.int64) + 1
    idx.flags.writeable = False
    return idx


def top_block(grid: TorusGrid) -> int:
    """Largest occupied block index ``J`` (all retained modes live in
    blocks ``-1..J``)."""
    return int(_block_index(grid.dim, grid.cutoff).max())


@lru_cache(maxsize=None)
def _block_masks(dim: int, cutoff: int) -> tuple:
    idx = _block_index(dim, cutoff)
    J = int(idx.max())
    masks = []
    for j in range(-1, J + 1):
        m = idx == j
        m.flags.writeable = False
        masks.append(m)
    return tuple(masks)


class BlockDecomposition:
    """Dyadic decomposition of one grid's band; blocks partition the modes."""

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        self.top = top_block(grid)
        self._masks = _block_masks(grid.dim, grid.cutoff)

    def mask(self, j: int) -> np.ndarray:
        if not -1 <= j <= self.top:
            raise IndexError(f"block index {j} outside [-1, {self.top}]")
        return self._masks[j + 1]

    def indices(self):
        return range(-1, self.top + 1)


def block(f: SpectralField, j: int) -> SpectralField:
    """Modes of ``f`` in dyadic block ``j``, all others zeroed."""
    dec = BlockDecomposition(f.grid)
    return SpectralField(f.grid, np.where(dec.mask(j), f.coeffs, 0.0), copy=False)


def project_low(f: SpectralField, n: int) -> SpectralField:
    """Sum of blocks ``j <= n``."""
    idx = _block_index(f.grid.dim, f.grid.cutoff)
    return SpectralField(f.grid, np.where(idx <= n, f.coeffs, 0.0), copy=False)


def project_high(f: SpectralField, n: int) -> SpectralField:
    """Sum of blocks ``j > n``; ``project_low + project_high`` is exact."""
    idx = _block_index(f.grid.dim, f.grid.cutoff)
    return SpectralField(f.grid, np.where(idx > n, f.coeffs, 0.0), copy=False)


def besov_norm(f: SpectralField, beta: float) -> float:
    """``max over blocks of 2^(beta*j) * sup|block_j f|`` (grid sup)."""
    dec = BlockDecomposition(f.grid)
    out = 0.0
    for j in dec.indices():
        piece = np.where(dec.mask(j), f.coeffs, 0.0)
        if not piece.any():
            continue
        out = max(out, 2.0 ** (beta * j) *
                  sup_norm(SpectralField(f.grid, piece, copy=False)))
    return out


def _phys_blocks(f: SpectralField) -> list[np.ndarray]:
    """Physical values of every block of ``f`` (one inverse transform each)."""
    dec = BlockDecomposition(f.grid)
    return [phys_values(SpectralField(f.grid, np.where(dec.mask(j), f.coeffs, 0.0),
                                      copy=False))
            for j in dec.indices()]


def paraproduct(u: SpectralField, v: SpectralField) -> SpectralField:
    """Low-high paraproduct: sum over j of ``(blocks <= j-2 of u) * (block j of v)``."""
    if u.grid != v.grid:
        raise GridMismatchError("paraproduct requires a shared grid")
    ub = _phys_blocks(u)
    vb = _phys_blocks(v)
    acc = np.zeros(u.grid.phys_shape)
    low = np.zeros(u.grid.phys_shape)  # cumulative blocks of u up to j-2
    # j runs over block indices -1..J; low-pass Delta_{<=j-2} lags two behind
    for pos in range(2, len(vb)):
        low += ub[pos - 2]
        acc += low * vb[pos]
    return to_spectral(u.grid, acc)


def resonant(u: SpectralField, v: SpectralField) -> SpectralField:
    """Resonant part: sum of ``(block i of u)*(block j of v)`` over ``|i-j| <= 1``."""
    if u.grid != v.grid:
        raise GridMismatchError("resonant product requires a shared grid")
    ub = _phys_blocks(u)
    vb = _phys_blocks(v)
    n = len(ub)
    acc = np.zeros(u.grid.phys_shape)
    for i in range(n):
        lo, hi = max(0, i - 1), min(n, i + 2)
        for j in range(lo, hi):
            acc += ub[i] * vb[j]
    return to_spectral(u.grid, acc)


def para_le(u: SpectralField, v: SpectralField) -> SpectralField:
    """``paraproduct(u, v) + resonant(u, v)`` (everything except the
    high-low part); satisfies ``para_le(u, v) + paraproduct(v, u) = uv``."""
    return paraproduct(u, v) + resonant(u, v)
