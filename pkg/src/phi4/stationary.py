"""Approximate stationary sampling of the renormalized cubic flow.

The stationary state is reached by a pullback-style burn-in: the Gaussian
part starts in its exact stationary law at time ``-T_b``, the full solution
starts at zero there (remainder ``R = -Z``), and the pair is integrated to
time 0.  Only ``[0, T]`` is recorded.  Noise steps are indexed by absolute
time, so runs of one trajectory with different burn-ins share the noise of
their common window; the doubling test below exploits that coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import SpectralField, TorusGrid, phys_values, truncate_coeffs
from .noise import (
    NOISE_STEP_OFFSET,
    NoiseStream,
    sample_stationary_z,
    ou_step_coeffs,
    wick_power_coeffs,
)
from .solver import (
    BlowUpError,
    FieldPath,
    SolverConfig,
    _remainder_tables,
    remainder_step_coeffs,
    renormalization_constant,
)


@dataclass(frozen=True)
class FlowState:
    """Joint state of the driving flow and the remainder at one step."""

    z: np.ndarray
    r: np.ndarray
    step: int  # absolute noise-step counter


@dataclass(frozen=True)
class StationaryRun:
    """Snapshots of one stationary trajectory over ``[0, horizon]``.

    ``potential`` holds the renormalized square at every solver step (the
    input the linearized flow needs); ``phi`` and ``z`` are thinned by
    ``cfg.snapshot_stride``.  ``final_state`` allows bit-exact continuation.
    """

    cfg: SolverConfig
    burn_in: float
    seed: int
    trajectory: int
    c_used: float
    phi: FieldPath
    z: FieldPath
    potential: FieldPath
    final_state: FlowState


def _potential_coeffs(r: np.ndarray, z: np.ndarray, grid: TorusGrid, c: float) -> np.ndarray:
    """Renormalized square of ``R + Z`` (band projection of the square)."""
    phi_p = (phys_values(SpectralField(grid, r, copy=False))
             + phys_values(SpectralField(grid, z, copy=False)))
    q = truncate_coeffs(grid, np.fft.fftn(phi_p * phi_p) / grid.phys_points**grid.dim)
    q[(0,) * grid.dim] += -c
    return q


def advance_state(state: FlowState, n_steps: int, cfg: SolverConfig, *,
                  c: float | None = None, stream: NoiseStream | None = None,
                  on_state=None) -> FlowState:
    """Step the joint ``(Z, R)`` flow ``n_steps`` times (mass compensation on,
    so ``R + Z`` solves the renormalized equation).

    ``on_state(i, z, r)`` is called after each step with the local step count
    and the new state; restarts from a stored :class:`FlowState` reproduce an
    unsplit run bit-exactly.
    """
    grid = cfg.grid
    if c is None:
        c = renormalization_constant(cfg)
    if stream is None:
        stream = NoiseStream(cfg.seed)
    decay, weight = _remainder_tables(grid.dim, grid.cutoff, cfg.mass, cfg.dt)
    gain = cfg.alpha + cfg.mass
    z, r, step = state.z, state.r, state.step
    for i in range(n_steps):
        z2, z3 = wick_power_coeffs(z, grid, c)
        r = remainder_step_coeffs(r, z, z2, z3, grid, decay, weight, gain, True)
        z = ou_step_coeffs(z, grid, cfg.dt, cfg.mass, stream, step, cfg.noise_amp)
        step += 1
        if not np.isfinite(r.view(np.float64)).all():
            raise BlowUpError(step, (step - NOISE_STEP_OFFSET) * cfg.dt)
        if on_state is not None:
            on_state(i + 1, z, r)
    return FlowState(z, r, step)


def initial_state(cfg: SolverConfig, burn_in: float, seed: int,
                  trajectory: int = 0) -> FlowState:
    """Pullback start at ``t = -burn_in``: stationary ``Z``, zero solution."""
    n_burn = round(burn_in / cfg.dt)
    if burn_in > 0 and n_burn == 0:
        raise ValueError("burn_in must be 0 or at least one step")
    z = sample_stationary_z(cfg.grid, cfg.mass, seed, trajectory=trajectory,
                            amplitude=cfg.noise_amp).coeffs
    return FlowState(z, -z, NOISE_STEP_OFFSET - n_burn)


def sample_stationary(cfg: SolverConfig, burn_in: float, seed: int | None = None, *,
                      trajectory: int = 0, record_z: bool = True) -> StationaryRun:
    """Burn in from the pullback start, then record ``[0, horizon]``."""
    if seed is None:
        seed = cfg.seed
    grid = cfg.grid
    c = renormalization_constant(cfg)
    stream = NoiseStream(seed, trajectory)
    n_burn = round(burn_in / cfg.dt)
    n = cfg.n_steps
    stride = cfg.snapshot_stride

    state = initial_state(cfg, burn_in, seed, trajectory)
    if n_burn:
        state = advance_state(state, n_burn, cfg, c=c, stream=stream)

    rec = list(range(0, n + 1, stride))
    if rec[-1] != n:
        rec.append(n)
    phi_out = np.empty((len(rec),) + grid.coeff_shape, dtype=np.complex128)
    z_out = np.empty_like(phi_out) if record_z else np.empty((0,) + grid.coeff_shape)
    q_out = np.empty((n + 1,) + grid.coeff_shape, dtype=np.complex128)

    pos = 0

    def record(i: int, z: np.ndarray, r: np.ndarray):
        nonlocal pos
        q_out[i] = _potential_coeffs(r, z, grid, c)
        if pos < len(rec) and i == rec[pos]:
            phi_out[pos] = r + z
            if record_z:
                z_out[pos] = z
            pos += 1

    record(0, state.z, state.r)
    state = advance_state(state, n, cfg, c=c, stream=stream,
                          on_state=lambda i, z, r: record(i, z, r))

    times = np.array([i * cfg.dt for i in rec])
    all_times = cfg.dt * np.arange(n + 1)
    return StationaryRun(
        cfg=cfg, burn_in=burn_in, seed=seed, trajectory=trajectory, c_used=c,
        phi=FieldPath(grid, times, phi_out),
        z=FieldPath(grid, times, z_out),
        potential=FieldPath(grid, all_times, q_out),
        final_state=state,
    )


def renormalized_square(phi: FieldPath, z: FieldPath, c: float) -> FieldPath:
    """Assemble the renormalized square from aligned solution and noise paths:
    ``(phi - z)^2 + 2 (phi - z) z + (z^2 - c)`` with dealiased products.

    Algebraically this collapses to ``phi^2 - c`` on the band, whatever the
    two paths are.
    """
    from .grids import dealiased_product

    if len(phi) != len(z) or not np.allclose(phi.times, z.times):
        raise ValueError("solution and noise paths are not aligned")
    out = np.empty_like(phi.coeffs)
    for i in range(len(phi)):
        u = phi.field(i) - z.field(i)
        zf = z.field(i)
        wick2 = dealiased_product(zf, zf).shift_mean(-c)
        q = dealiased_product(u, u) + 2.0 * dealiased_product(u, zf) + wick2
        out[i] = q.coeffs
    return FieldPath(phi.grid, phi.times.copy(), out)


def deterministic_potential(kappa: float, cfg: SolverConfig,
                            n_steps: int | None = None) -> FieldPath:
    """Constant potential path ``q == kappa`` on the solver time grid."""
    n = cfg.n_steps if n_steps is None else n_steps
    base = SpectralField.constant(cfg.grid, kappa).coeffs
    coeffs = np.broadcast_to(base, (n + 1,) + cfg.grid.coeff_shape)
    return FieldPath(cfg.grid, cfg.dt * np.arange(n + 1), coeffs)


def spatial_mean_moments(run: StationaryRun, t_index: int) -> tuple[float, float]:
    """Spatial means of ``phi^2`` and ``phi^4`` at one recorded snapshot."""
    vals = phys_values(run.phi.field(t_index))
    return float(np.mean(vals**2)), float(np.mean(vals**4))


def calibrate_burn_in(cfg: SolverConfig, n_seeds: int = 100, *, start: float = 0.25,
                      max_doublings: int = 8) -> tuple[float, list]:
    """Doubling test for the burn-in length.

    Runs coupled pairs (same seeds, burn-in ``b`` vs ``2b``) and accepts once
    the mean spatial moments move by less than one standard error of the
    paired difference.  Returns the accepted burn-in and the trial table.
    """
    probe = cfg.with_horizon(cfg.dt)  # only t=0 is needed
    history = []
    b = start
    for _ in range(max_doublings):
        d2, d4 = [], []
        for s in range(n_seeds):
            m_a = spatial_mean_moments(sample_stationary(probe, b, seed=s,
                                                         record_z=False), 0)
            m_b = spatial_mean_moments(sample_stationary(probe, 2 * b, seed=s,
                                                         record_z=False), 0)
            d2.append(m_b[0] - m_a[0])
            d4.append(m_b[1] - m_a[1])
        row = {"burn_in": b}
        accept = True
        for name, d in (("m2", d2), ("m4", d4)):
            d = np.asarray(d)
            se = float(d.std(ddof=1) / np.sqrt(len(d))) or 1e-300
            row[f"{name}_shift"] = float(d.mean())
            row[f"{name}_se"] = se
            accept = accept and abs(d.mean()) < se
        history.append(row)
        if accept:
            return 2 * b, history
        b *= 2
    return 2 * b, history
