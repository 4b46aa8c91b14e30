"""Exponential-Euler integration of the decomposed cubic equation.

Two closely related flows live here:

* ``solve_remainder`` integrates the remainder equation

      dR/dt = (Lap - m) R + G,
      G = -R^3 - 3 R^2 Z1 - 3 R Z2 - Z3 + (alpha + m) R  [+ (alpha + m) Z1],

  against a snapshot path of enhanced noise ``(Z1, Z2, Z3)``.  The optional
  ``(alpha + m) Z1`` term is switched on when ``Z1`` is the damped stochastic
  heat flow with mass ``m``; then ``Phi = R + Z1`` solves the renormalized
  cubic equation with bifurcation parameter ``alpha``.  It is off when the
  triple is user-supplied data and only ``R`` carries the dynamics.

* ``solve_controlled`` integrates the deterministic steering equation

      dPhi/dt = Lap Phi - Phi^3 + (3c + alpha) Phi + f

  whose constant fixed points the steering module constructs.  The linear
  part ``Lap + (3c + alpha)`` is exponentiated exactly, so those constants
  are fixed points of the discrete scheme to the last bit.

Each step damps with the exact linear factor and weights the drift with
``dt * phi1(z) = (exp(z) - 1)/z * dt``; the first non-finite value aborts the
trajectory with :class:`BlowUpError` (never clipped).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .blocks import paraproduct, project_high, project_low, resonant
from .grids import (
    SpectralField,
    TorusGrid,
    TWO_PI_SQ,
    dealiased_product,
    phys_values,
    to_spectral,
    truncate_coeffs,
)
from .noise import WickTriple, wick_constant


class BlowUpError(RuntimeError):
    """A trajectory produced a non-finite value; carries the step index."""

    def __init__(self, step: int, t: float, what: str = "remainder"):
        super().__init__(f"{what} blew up at step {step} (t={t:.6g}); "
                         "the step size is too large for this trajectory")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class SolverConfig:
    """Reproducibility contract for one simulation.

    ``dim``/``cutoff``/``phys_points`` fix the grid (``phys_points=0`` picks
    the default padding), ``dt``/``horizon`` the time discretization,
    ``alpha`` the bifurcation parameter, ``mass`` the damping of the Gaussian
    part, ``noise_amp`` the noise amplitude (0 gives deterministic dynamics),
    ``epsilon`` the regularity index used by diagnostics.
    """

    dim: int
    cutoff: int
    dt: float
    horizon: float
    alpha: float
    phys_points: int = 0
    mass: float = 1.0
    seed: int = 0
    noise_amp: float = 1.0
    snapshot_stride: int = 1
    epsilon: float = 0.1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.horizon < self.dt:
            raise ValueError("horizon must be >= dt")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        n = round(self.horizon / self.dt)
        if abs(n * self.dt - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise ValueError("horizon must be an integer multiple of dt")

    @property
    def grid(self) -> TorusGrid:
        return TorusGrid(self.dim, self.cutoff, self.phys_points)

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.dt)

    def with_horizon(self, horizon: float) -> "SolverConfig":
        return replace(self, horizon=horizon)


def renormalization_constant(cfg: SolverConfig) -> float:
    """Constant used in the Wick powers: the stationary pointwise variance of
    the driving flow in 2d; zero in 1d, where no renormalization is needed."""
    if cfg.dim == 1 or cfg.noise_amp == 0.0:
        return 0.0
    return cfg.noise_amp**2 * wick_constant(cfg.grid, cfg.mass)


def phi1(z: np.ndarray) -> np.ndarray:
    """``(exp(z) - 1)/z`` with the removable singularity filled in."""
    z = np.asarray(z, dtype=np.float64)
    out = np.ones_like(z)
    nz = z != 0.0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


@lru_cache(maxsize=None)
def _remainder_tables(dim: int, cutoff: int, mass: float, dt: float):
    """Exact decay ``exp(-mu*dt)`` and drift weight ``dt*phi1(-mu*dt)``."""
    from .grids import _k_sq

    mu = mass + TWO_PI_SQ * _k_sq(dim, cutoff)
    z = -mu * dt
    decay = np.exp(z)
    weight = dt * phi1(z)
    decay.flags.writeable = False
    weight.flags.writeable = False
    return decay, weight


def remainder_step_coeffs(r: np.ndarray, z1: np.ndarray, z2: np.ndarray,
                          z3: np.ndarray, grid: TorusGrid, decay: np.ndarray,
                          weight: np.ndarray, gain: float,
                          compensate: bool) -> np.ndarray:
    """One exponential-Euler step on raw coefficient arrays.

    ``gain`` is ``alpha + mass`` (the linear drift left over after damping
    with ``Lap - mass``); ``compensate`` adds ``gain * Z1``.
    """
    f = SpectralField(grid, r, copy=False)
    r_p = phys_values(f)
    z1_p = phys_values(SpectralField(grid, z1, copy=False))
    z2_p = phys_values(SpectralField(grid, z2, copy=False))
    # overflow here is legal: the caller's blow-up check turns it into an error
    with np.errstate(over="ignore", invalid="ignore"):
        drift = -r_p**3 - 3.0 * r_p**2 * z1_p - 3.0 * r_p * z2_p + gain * r_p
        if compensate:
            drift += gain * z1_p
        g = truncate_coeffs(grid, np.fft.fftn(drift) / grid.phys_points**grid.dim)
        g -= z3
        return decay * r + weight * g


def remainder_step(r: SpectralField, snapshot, cfg: SolverConfig, *,
                   mass_compensation: bool = False) -> SpectralField:
    """Public single-step form; ``snapshot`` is a ``(Z1, Z2, Z3)`` triple of
    fields or coefficient arrays on the config grid."""
    grid = cfg.grid
    z1, z2, z3 = (s.coeffs if isinstance(s, SpectralField) else np.asarray(s)
                  for s in snapshot)
    if r.grid != grid:
        raise ValueError("remainder field not on the config grid")
    decay, weight = _remainder_tables(grid.dim, grid.cutoff, cfg.mass, cfg.dt)
    out = remainder_step_coeffs(r.coeffs, z1, z2, z3, grid, decay, weight,
                                cfg.alpha + cfg.mass, mass_compensation)
    if not np.isfinite(out.view(np.float64)).all():
        raise BlowUpError(0, 0.0)
    return SpectralField(grid, out, copy=False)


@dataclass(frozen=True)
class FieldPath:
    """Time-indexed snapshots of one field, stacked as raw coefficients."""

    grid: TorusGrid
    times: np.ndarray
    coeffs: np.ndarray  # (n_snapshots, *coeff_shape)

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def field(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[i], copy=False)

    def sup_deviation_from(self, value: float) -> float:
        """Largest grid-sup distance of any snapshot from a constant."""
        out = 0.0
        for i in range(len(self)):
            dev = self.field(i) - SpectralField.constant(self.grid, value)
            out = max(out, float(np.max(np.abs(phys_values(dev)))))
        return out


@dataclass(frozen=True)
class RemainderPath:
    """Remainder and full-solution snapshots plus optional diagnostics."""

    remainder: FieldPath
    solution: FieldPath  # R + Z1 at the same times
    diagnostics: dict = field(default_factory=dict)


def solve_remainder(phi0: SpectralField, triple: WickTriple, cfg: SolverConfig, *,
                    mass_compensation: bool = False,
                    record_diagnostics: bool = False) -> RemainderPath:
    """Integrate the remainder equation from ``R(0) = phi0`` against the
    snapshots of ``triple``; returns the R path and the ``R + Z1`` path."""
    grid = cfg.grid
    if triple.grid != grid:
        raise ValueError("noise triple not on the config grid")
    if abs(triple.dt - cfg.dt) > 1e-12 * cfg.dt:
        raise ValueError(f"noise snapshots at dt={triple.dt}, solver at {cfg.dt}")
    n = cfg.n_steps
    if triple.n_snapshots < n + 1:
        raise ValueError(f"need {n + 1} noise snapshots, have {triple.n_snapshots}")

    decay, weight = _remainder_tables(grid.dim, grid.cutoff, cfg.mass, cfg.dt)
    gain = cfg.alpha + cfg.mass
    stride = cfg.snapshot_stride
    rec = list(range(0, n + 1, stride))
    if rec[-1] != n:
        rec.append(n)
    out_r = np.empty((len(rec),) + grid.coeff_shape, dtype=np.complex128)
    out_phi = np.empty_like(out_r)
    diag: dict[str, list] = {"t": [], "besov_high": [], "sup": [],
                             "drift_singular": [], "drift_regular": []}

    r = phi0.coeffs.copy()
    pos = 0
    for i in range(n + 1):
        if i == rec[pos]:
            out_r[pos] = r
            out_phi[pos] = r + triple.z1[i]
            if record_diagnostics:
                from .blocks import besov_norm
                from .grids import sup_norm

                f = SpectralField(grid, r, copy=False)
                eps = cfg.epsilon
                r_sup = sup_norm(f)
                diag["t"].append(i * cfg.dt)
                diag["besov_high"].append(besov_norm(f, 2.0 - eps))
                diag["sup"].append(r_sup)
                # drift split at the block cutoff balancing the sup of R
                n_cut = max(1, round(np.log2(max(r_sup, 1.0)) / (2 - 2 * eps)))
                u1, u2 = split_drift(
                    f, SpectralField(grid, triple.z1[i], copy=False),
                    SpectralField(grid, triple.z2[i], copy=False),
                    SpectralField(grid, triple.z3[i], copy=False), n_cut)
                diag["drift_singular"].append(besov_norm(u1, -eps - 0.5))
                diag["drift_regular"].append(besov_norm(u2, -eps))
            pos += 1
        if i == n:
            break
        r = remainder_step_coeffs(r, triple.z1[i], triple.z2[i], triple.z3[i],
                                  grid, decay, weight, gain, mass_compensation)
        if not np.isfinite(r.view(np.float64)).all():
            raise BlowUpError(i + 1, (i + 1) * cfg.dt)

    times = np.array([i * cfg.dt for i in rec]) + triple.t0
    return RemainderPath(FieldPath(grid, times, out_r),
                         FieldPath(grid, times, out_phi),
                         diag if record_diagnostics else {})


@lru_cache(maxsize=None)
def _controlled_tables(dim: int, cutoff: int, gain: float, dt: float):
    """Linear factor for ``Lap + gain``, built so constants with zero drift
    are bit-exact fixed points (decay = 1 + z*phi1(z))."""
    from .grids import _k_sq

    z = (gain - TWO_PI_SQ * _k_sq(dim, cutoff)) * dt
    weight = dt * phi1(z)
    decay = 1.0 + z * weight / dt
    decay.flags.writeable = False
    weight.flags.writeable = False
    return decay, weight


def solve_controlled(phi0, forcing, c: float, cfg: SolverConfig, *,
                     record_stride: int | None = None) -> FieldPath:
    """Integrate ``dPhi = (Lap - Phi^3 + (3c + alpha) Phi + f) dt``.

    ``phi0`` and ``forcing`` may be floats (spatial constants), fields, or —
    for ``forcing`` — a stacked array of per-step coefficient snapshots.
    """
    if c < 0:
        raise ValueError(f"renormalization shift c must be >= 0, got {c}")
    grid = cfg.grid
    if isinstance(phi0, (int, float)):
        phi0 = SpectralField.constant(grid, float(phi0))
    n = cfg.n_steps
    stride = record_stride or cfg.snapshot_stride

    f_steps: np.ndarray | None
    if forcing is None:
        f_steps = None
    elif isinstance(forcing, (int, float)):
        f0 = SpectralField.constant(grid, float(forcing))
        f_steps = np.broadcast_to(f0.coeffs, (n,) + grid.coeff_shape)
    elif isinstance(forcing, SpectralField):
        f_steps = np.broadcast_to(forcing.coeffs, (n,) + grid.coeff_shape)
    else:
        f_steps = np.asarray(forcing)
        if f_steps.shape[0] < n:
            raise ValueError(f"forcing path has {f_steps.shape[0]} snapshots, "
                             f"need {n}")

    decay, weight = _controlled_tables(grid.dim, grid.cutoff,
                                       3.0 * c + cfg.alpha, cfg.dt)
    rec = list(range(0, n + 1, stride))
    if rec[-1] != n:
        rec.append(n)
    out = np.empty((len(rec),) + grid.coeff_shape, dtype=np.complex128)

    u = phi0.coeffs.copy()
    pos = 0
    for i in range(n + 1):
        if i == rec[pos]:
            out[pos] = u
            pos += 1
        if i == n:
            break
        u_p = phys_values(SpectralField(grid, u, copy=False))
        with np.errstate(over="ignore", invalid="ignore"):
            g = truncate_coeffs(grid,
                                np.fft.fftn(-u_p**3) / grid.phys_points**grid.dim)
            if f_steps is not None:
                g = g + f_steps[i]
            u = decay * u + weight * g
        if not np.isfinite(u.view(np.float64)).all():
            raise BlowUpError(i + 1, (i + 1) * cfg.dt, what="controlled flow")

    times = np.array([i * cfg.dt for i in rec])
    return FieldPath(grid, times, out)


def split_drift(r: SpectralField, z1: SpectralField, z2: SpectralField,
                z3: SpectralField, n: int) -> tuple[SpectralField, SpectralField]:
    """Split the noise-coupled drift into a singular and a regular part.

    The singular part pairs the remainder against the high-frequency tail of
    the noise (paraproducts only); the regular part collects the low-tail
    paraproducts and the resonant/high-low terms.  The cubic self-interaction
    is bookkept separately by the caller; the two parts recombine to
    ``-3 R^2 Z1 - 3 R Z2 - Z3`` exactly on the band.
    """
    if n < -1:
        raise ValueError("block cutoff must be >= -1")
    r2 = dealiased_product(r, r)

    def para_ge(a, b):
        # a >= b : resonant + high-low
        return resonant(a, b) + paraproduct(b, a)

    u1 = (-3.0 * paraproduct(r2, project_high(z1, 2 * n))
          - 3.0 * paraproduct(r, project_high(z2, n))
          - z3)
    u2 = (-3.0 * paraproduct(r2, project_low(z1, 2 * n))
          - 3.0 * paraproduct(r, project_low(z2, n))
          - 3.0 * para_ge(r2, z1)
          - 3.0 * para_ge(r, z2))
    return u1, u2
