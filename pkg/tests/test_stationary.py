import numpy as np
import pytest

from phi4.grids import SpectralField, dealiased_product, sup_norm, to_physical
from phi4.noise import NoiseStream
from phi4.solver import SolverConfig
from phi4.stationary import (
    advance_state,
    deterministic_potential,
    initial_state,
    renormalized_square,
    sample_stationary,
)


def small_cfg(**over):
    base = dict(dim=2, cutoff=4, dt=2e-3, horizon=0.1, alpha=0.5, mass=1.0,
                seed=0)
    base.update(over)
    return SolverConfig(**base)


class TestSampleStationary:
    def test_records_requested_window(self):
        cfg = small_cfg()
        run = sample_stationary(cfg, burn_in=0.05, seed=3)
        assert run.potential.times[0] == 0.0
        assert run.potential.times[-1] == pytest.approx(cfg.horizon)
        assert len(run.potential) == cfg.n_steps + 1

    def test_deterministic_in_seed(self):
        cfg = small_cfg()
        a = sample_stationary(cfg, burn_in=0.05, seed=3)
        b = sample_stationary(cfg, burn_in=0.05, seed=3)
        assert np.array_equal(a.phi.coeffs, b.phi.coeffs)
        assert np.array_equal(a.potential.coeffs, b.potential.coeffs)

    def test_zero_noise_strong_contraction_pins_origin(self):
        # alpha very negative, noise off: the pullback start is already the
        # fixed point, so the whole path is zero and the potential constant
        cfg = small_cfg(alpha=-20.0, noise_amp=0.0)
        run = sample_stationary(cfg, burn_in=0.25, seed=1)
        assert np.max(np.abs(run.phi.coeffs)) == 0.0
        assert np.max(np.abs(run.potential.coeffs)) == 0.0
        assert run.c_used == 0.0

    def test_assembly_identity_on_recorded_potential(self):
        # q == P(phi^2) - c exactly, however the snapshots were produced
        cfg = small_cfg(snapshot_stride=1)
        run = sample_stationary(cfg, burn_in=0.05, seed=5)
        for i in (0, len(run.phi) // 2, len(run.phi) - 1):
            f = run.phi.field(i)
            direct = dealiased_product(f, f).shift_mean(-run.c_used)
            got = run.potential.field(i)
            scale = max(sup_norm(direct), 1.0)
            assert sup_norm(got - direct) < 1e-12 * scale

    def test_renormalized_square_assembly(self):
        # the three-term assembly collapses to phi^2 - c for any aligned paths
        cfg = small_cfg(snapshot_stride=1)
        run = sample_stationary(cfg, burn_in=0.05, seed=6)
        q = renormalized_square(run.phi, run.z, run.c_used)
        for i in range(0, len(q), 7):
            f = run.phi.field(i)
            direct = dealiased_product(f, f).shift_mean(-run.c_used)
            assert sup_norm(q.field(i) - direct) < 1e-11

    def test_misaligned_paths_rejected(self):
        cfg = small_cfg()
        run = sample_stationary(cfg, burn_in=0.05, seed=7)
        other = sample_stationary(small_cfg(horizon=0.2), burn_in=0.05, seed=7)
        with pytest.raises(ValueError):
            renormalized_square(run.phi, other.z, run.c_used)


class TestFlowSplitting:
    def test_split_and_restart_is_bit_exact(self):
        cfg = small_cfg(horizon=0.2)
        stream = NoiseStream(11, trajectory=0)

        state0 = initial_state(cfg, burn_in=0.1, seed=11)
        # unsplit: 150 steps in one go, recording the final 50
        recorded = {}

        def keep(i, z, r):
            if i > 100:
                recorded[i] = (z.copy(), r.copy())

        final_full = advance_state(state0, 150, cfg, stream=stream, on_state=keep)

        # split at step 100, store, then resume
        mid = advance_state(state0, 100, cfg, stream=stream)
        final_split = advance_state(mid, 50, cfg, stream=stream)

        assert np.array_equal(final_full.z, final_split.z)
        assert np.array_equal(final_full.r, final_split.r)
        assert final_full.step == final_split.step

    def test_resume_reproduces_interior_states(self):
        cfg = small_cfg(horizon=0.2)
        stream = NoiseStream(12)
        state0 = initial_state(cfg, burn_in=0.0, seed=12)
        states = {}

        def keep(i, z, r):
            states[i] = (z.copy(), r.copy())

        advance_state(state0, 60, cfg, stream=stream, on_state=keep)
        mid = advance_state(state0, 25, cfg, stream=stream)
        assert np.array_equal(mid.z, states[25][0])
        assert np.array_equal(mid.r, states[25][1])
        # one more step from the stored state matches the recorded next state
        nxt = advance_state(mid, 1, cfg, stream=stream)
        assert np.array_equal(nxt.r, states[26][1])


class TestIndependence:
    def test_disjoint_trajectories_uncorrelated(self):
        # observables from distinct trajectory counters decorrelate
        cfg = small_cfg(horizon=0.05)
        n = 200
        a = np.empty(n)
        b = np.empty(n)
        for i in range(n):
            ra = sample_stationary(cfg, 0.1, seed=13, trajectory=i, record_z=False)
            rb = sample_stationary(cfg, 0.1, seed=13, trajectory=1000 + i,
                                   record_z=False)
            a[i] = np.mean(to_physical(ra.phi.field(-1)) ** 2)
            b[i] = np.mean(to_physical(rb.phi.field(-1)) ** 2)
        r = np.corrcoef(a, b)[0, 1]
        assert abs(r) < 4.0 / np.sqrt(n)


class TestDeterministicPotential:
    def test_constant_path(self):
        cfg = small_cfg()
        for kappa in (0.0, -1.0, 2.5):
            q = deterministic_potential(kappa, cfg)
            assert len(q) == cfg.n_steps + 1
            assert np.allclose(to_physical(q.field(0)), kappa)
            assert np.allclose(to_physical(q.field(-1)), kappa)

    def test_matches_steered_flow_output(self):
        # assembling the potential from the controlled flow with the steering
        # data reproduces the constant within solver tolerance
        from phi4.solver import solve_controlled
        from phi4.steering import triple_for_square

        cfg = small_cfg(horizon=0.1, alpha=1.0)
        kappa = -2.0
        tr = triple_for_square(kappa, cfg.alpha)
        path = solve_controlled(tr.phi0, tr.forcing, tr.c, cfg, record_stride=1)
        ideal = deterministic_potential(kappa, cfg)
        for i in (0, len(path) - 1):
            f = path.field(i)
            q = dealiased_product(f, f).shift_mean(-tr.c)
            assert sup_norm(q - ideal.field(i)) < 1e-10
