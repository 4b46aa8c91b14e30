"""Reproducible Gaussian noise on the mode band, OU stepping and Wick powers.

All randomness is counter-based: a draw is a pure function of
``(seed, trajectory, step, mode)``, so trajectories can run on any number of
workers, in any order, and still produce bit-identical paths.  Modes are
enumerated shell-by-shell in ``|k|_inf`` (lexicographic inside a shell), which
makes the draws for a band of cutoff ``N`` a strict prefix of the draws for
any larger band: runs at different resolutions driven by the same seed share
their common modes exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grids import (
    CHECK_HERMITIAN,
    SpectralField,
    TorusGrid,
    TWO_PI_SQ,
    assert_hermitian,
)

# counter word 3 tags what the draw is for, so different uses of one seed
# never collide
PURPOSE_OU_INCREMENT = 0
PURPOSE_STATIONARY_INIT = 1
PURPOSE_FREE_FIELD = 2
PURPOSE_AUX = 3

# Step counters live this far into the uint64 range so that burn-in steps
# (negative times) get valid indices; two runs of one trajectory with
# different burn-ins then share the noise of their common time window.
NOISE_STEP_OFFSET = 1 << 32

_SQRT_HALF = np.sqrt(0.5)


@lru_cache(maxsize=None)
def _mode_tables(dim: int, cutoff: int):
    """Per-grid index tables for vectorized Hermitian draws.

    Returns ``(draw_pos, canonical, mirror_flat)`` where ``draw_pos[p]`` is
    the offset of mode ``p``'s first draw inside the per-step draw vector,
    ``canonical[p]`` marks the representative of each ``{k, -k}`` pair (first
    nonzero component positive; the zero mode is canonical), and
    ``mirror_flat[p]`` is the flat position of ``-k``.
    """
    n = 2 * cutoff + 1
    if dim == 1:
        modes = [(k,) for k in range(-cutoff, cutoff + 1)]
    else:
        modes = [(k1, k2)
                 for k1 in range(-cutoff, cutoff + 1)
                 for k2 in range(-cutoff, cutoff + 1)]
    # shell-major, lexicographic inside each shell: prefix-stable across N
    modes.sort(key=lambda k: (max(abs(c) for c in k), k))
    rank = {k: i for i, k in enumerate(modes)}

    shape = (n,) * dim
    draw_pos = np.empty(shape, dtype=np.int64)
    canonical = np.zeros(shape, dtype=bool)
    mirror_flat = np.empty(shape, dtype=np.int64)

    def pos_of(k):
        return tuple(c % n for c in k)

    for k in modes:
        p = pos_of(k)
        draw_pos[p] = 2 * rank[k]
        mirror_flat[p] = np.ravel_multi_index(pos_of(tuple(-c for c in k)), shape)
        nonzero = [c for c in k if c != 0]
        canonical[p] = (not nonzero) or nonzero[0] > 0

    draw_pos.flags.writeable = False
    canonical.flags.writeable = False
    mirror_flat.flags.writeable = False
    return draw_pos, canonical, mirror_flat


def _raw_normals(n: int, seed: int, trajectory: int, step: int, purpose: int) -> np.ndarray:
    counter = np.array([0, step, trajectory, purpose], dtype=np.uint64)
    bitgen = np.random.Philox(key=np.uint64(seed), counter=counter)
    return np.random.Generator(bitgen).standard_normal(n)


def hermitian_normals(grid: TorusGrid, seed: int, *, trajectory: int = 0,
                      step: int = 0, purpose: int = PURPOSE_AUX) -> np.ndarray:
    """Complex standard Gaussian coefficients with ``E|c_k|^2 = 1``,
    Hermitian-paired (``c_{-k} = conj(c_k)``, real zero mode)."""
    draw_pos, canonical, mirror_flat = _mode_tables(grid.dim, grid.cutoff)
    draws = _raw_normals(2 * grid.n_modes, seed, trajectory, step, purpose)
    a = draws[draw_pos]
    b = draws[draw_pos + 1]
    out = np.where(canonical, (a + 1j * b) * _SQRT_HALF, 0.0)
    out[(0,) * grid.dim] = draws[draw_pos[(0,) * grid.dim]]  # zero mode: real
    flat = out.reshape(-1)
    can_flat = np.flatnonzero(canonical.reshape(-1))
    vals = flat[can_flat].copy()
    flat[mirror_flat.reshape(-1)[can_flat]] = np.conj(vals)
    return out


@dataclass(frozen=True)
class NoiseStream:
    """Identity of one trajectory's noise: all draws are pure functions of
    ``(seed, trajectory, step, mode)``."""

    seed: int
    trajectory: int = 0

    def unit_increment(self, grid: TorusGrid, step: int) -> np.ndarray:
        """Hermitian complex normals with unit per-mode variance for one step."""
        return hermitian_normals(grid, self.seed, trajectory=self.trajectory,
                                 step=step, purpose=PURPOSE_OU_INCREMENT)

    def stationary_draw(self, grid: TorusGrid) -> np.ndarray:
        return hermitian_normals(grid, self.seed, trajectory=self.trajectory,
                                 step=0, purpose=PURPOSE_STATIONARY_INIT)


# -- Ornstein-Uhlenbeck stepping ---------------------------------------------

def _check_mass(mass: float):
    if mass <= 0:
        raise ValueError(f"mass must be > 0 (zero mode needs damping), got {mass}")


@lru_cache(maxsize=None)
def _ou_mu(dim: int, cutoff: int, mass: float) -> np.ndarray:
    from .grids import _k_sq

    mu = mass + TWO_PI_SQ * _k_sq(dim, cutoff)
    mu.flags.writeable = False
    return mu


@lru_cache(maxsize=None)
def _ou_step_arrays(dim: int, cutoff: int, mass: float, dt: float):
    """(decay, increment std) per mode for the exact OU transition."""
    mu = _ou_mu(dim, cutoff, mass)
    decay = np.exp(-mu * dt)
    inc_std = np.sqrt(-np.expm1(-2.0 * mu * dt) / (2.0 * mu))
    decay.flags.writeable = False
    inc_std.flags.writeable = False
    return decay, inc_std


def stationary_std(grid: TorusGrid, mass: float) -> np.ndarray:
    """Per-mode standard deviation ``1/sqrt(2*(mass + 4*pi^2*|k|^2))`` of the
    stationary stochastic heat flow."""
    _check_mass(mass)
    return 1.0 / np.sqrt(2.0 * _ou_mu(grid.dim, grid.cutoff, mass))


def ou_step_coeffs(z: np.ndarray, grid: TorusGrid, dt: float, mass: float,
                   stream: NoiseStream, step: int, amplitude: float = 1.0) -> np.ndarray:
    """One exact transition of ``dZ = (Laplacian - mass) Z dt + amplitude dW``."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    _check_mass(mass)
    decay, inc_std = _ou_step_arrays(grid.dim, grid.cutoff, mass, dt)
    out = decay * z
    if amplitude != 0.0:
        out = out + (amplitude * inc_std) * stream.unit_increment(grid, step)
    return out


def ou_step(z: SpectralField, dt: float, mass: float, stream: NoiseStream,
            step: int, amplitude: float = 1.0) -> SpectralField:
    out = SpectralField(z.grid, ou_step_coeffs(z.coeffs, z.grid, dt, mass,
                                               stream, step, amplitude), copy=False)
    if CHECK_HERMITIAN:
        assert_hermitian(out)
    return out


def sample_stationary_z(grid: TorusGrid, mass: float, seed: int, *,
                        trajectory: int = 0, amplitude: float = 1.0) -> SpectralField:
    """Draw from the stationary law of the damped stochastic heat flow:
    per-mode complex Gaussian with variance ``amplitude^2/(2*mu_k)``."""
    _check_mass(mass)
    stream = NoiseStream(seed, trajectory)
    coeffs = (amplitude * stationary_std(grid, mass)) * stream.stationary_draw(grid)
    return SpectralField(grid, coeffs, copy=False)


def ou_z_path(grid: TorusGrid, mass: float, seed: int, dt: float, n_steps: int, *,
              trajectory: int = 0, amplitude: float = 1.0,
              z0: np.ndarray | None = None,
              start_step: int = NOISE_STEP_OFFSET) -> np.ndarray:
    """Stationary-started OU trajectory; returns ``(n_steps+1, *coeff_shape)``.

    ``start_step`` offsets the per-step counter so a split trajectory can be
    resumed bit-exactly from a stored state.
    """
    stream = NoiseStream(seed, trajectory)
    if z0 is None:
        z0 = sample_stationary_z(grid, mass, seed, trajectory=trajectory,
                                 amplitude=amplitude).coeffs
    path = np.empty((n_steps + 1,) + grid.coeff_shape, dtype=np.complex128)
    path[0] = z0
    z = np.array(z0)
    for i in range(n_steps):
        z = ou_step_coeffs(z, grid, dt, mass, stream, start_step + i, amplitude)
        path[i + 1] = z
    return path


# -- Wick constant and powers -------------------------------------------------

def wick_constant(grid: TorusGrid, mass: float) -> float:
    """Stationary pointwise variance of the band-limited Gaussian flow:
    ``sum over |k|_inf <= N of 1/(2*(mass + 4*pi^2*|k|^2))``.

    Grows like ``log N`` in two dimensions and converges in one.
    """
    _check_mass(mass)
    return float(np.sum(1.0 / (2.0 * _ou_mu(grid.dim, grid.cutoff, mass))))


def wick_power_coeffs(z: np.ndarray, grid: TorusGrid, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Raw-array form of :func:`wick_powers` (one spectral->physical pass)."""
    from .grids import phys_values, truncate_coeffs

    z_p = phys_values(SpectralField(grid, z, copy=False))
    sq = z_p * z_p
    norm = grid.phys_points**grid.dim
    z2 = truncate_coeffs(grid, np.fft.fftn(sq) / norm)
    z2[(0,) * grid.dim] += -c
    z3 = truncate_coeffs(grid, np.fft.fftn(sq * z_p) / norm) - (3.0 * c) * z
    return z2, z3


def wick_powers(z: SpectralField, c: float) -> tuple[SpectralField, SpectralField]:
    """Renormalized square and cube: ``(z^2 - c, z^3 - 3*c*z)``, products
    dealiased on the padded grid."""
    z2, z3 = wick_power_coeffs(z.coeffs, z.grid, c)
    return (SpectralField(z.grid, z2, copy=False),
            SpectralField(z.grid, z3, copy=False))


@dataclass(frozen=True)
class WickTriple:
    """Synchronized snapshots of the enhanced noise ``(Z, Z^2 - c, Z^3 - 3cZ)``.

    ``z1, z2, z3`` are stacked coefficient arrays of shape
    ``(n_snapshots, *coeff_shape)``, one row per solver step time
    ``t0 + i*dt``.  ``c_used`` is the renormalization constant the powers
    were assembled with.
    """

    grid: TorusGrid
    dt: float
    t0: float
    z1: np.ndarray
    z2: np.ndarray
    z3: np.ndarray
    c_used: float

    def __post_init__(self):
        for arr in (self.z1, self.z2, self.z3):
            if arr.shape != (self.n_snapshots,) + self.grid.coeff_shape:
                raise ValueError("snapshot arrays must share shape "
                                 f"(n, *{self.grid.coeff_shape})")

    @property
    def n_snapshots(self) -> int:
        return self.z1.shape[0]

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_snapshots)

    def snapshot(self, i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.z1[i], self.z2[i], self.z3[i]

    @staticmethod
    def zero(grid: TorusGrid, dt: float, n_snapshots: int, t0: float = 0.0) -> "WickTriple":
        shape = (n_snapshots,) + grid.coeff_shape
        z = np.zeros(shape, dtype=np.complex128)
        return WickTriple(grid, dt, t0, z, z.copy(), z.copy(), 0.0)

    def refine(self, rep: int) -> "WickTriple":
        """Same snapshot data on a ``rep``-times finer step grid (snapshots
        repeated, i.e. the noise is held piecewise constant).  Used to test
        the integrator's self-convergence at fixed equation data."""
        if rep < 1:
            raise ValueError("refinement factor must be >= 1")
        n_fine = (self.n_snapshots - 1) * rep + 1
        idx = np.repeat(np.arange(self.n_snapshots), rep)[:n_fine]
        return WickTriple(self.grid, self.dt / rep, self.t0, self.z1[idx],
                          self.z2[idx], self.z3[idx], self.c_used)

    @staticmethod
    def from_z_path(grid: TorusGrid, z_path: np.ndarray, c: float, dt: float,
                    t0: float = 0.0, stride: int = 1) -> "WickTriple":
        """Assemble the compatible triple from a Z path (optionally
        subsampled by ``stride``, for step-size coupling experiments)."""
        z1 = np.ascontiguousarray(z_path[::stride])
        n = z1.shape[0]
        z2 = np.empty_like(z1)
        z3 = np.empty_like(z1)
        for i in range(n):
            f = SpectralField(grid, z1[i], copy=False)
            p2, p3 = wick_powers(f, c)
            z2[i] = p2.coeffs
            z3[i] = p3.coeffs
        return WickTriple(grid, dt * stride, t0, z1, z2, z3, c)
