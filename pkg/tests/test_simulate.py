"""Tests for the Euler integrator, occupation measures, and the coupled
particle system.  Statistical checks target laws with known moments and use
three-standard-error bands."""

import numpy as np
import pytest

from mvlevy import (
    Blowup,
    DimensionMismatch,
    DriftSpec,
    EmpiricalMeasure,
    LevyMeasureSpec,
    SimConfig,
    frozen_trajectory,
    particle_system,
)


def _brownian(scale=1.0):
    return LevyMeasureSpec(kind="stable", alpha=2.0, scale=scale, dim=1)


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(dt=0.02, T=100.0)
        with pytest.raises(ValueError):
            SimConfig(dt=0.01, T=1.0)
        with pytest.raises(ValueError):
            SimConfig(dt=0.01, T=100.0, burn_in_fraction=1.0)
        with pytest.raises(ValueError):
            SimConfig(dt=0.01, T=100.0, thin=0)

    def test_json_round_trip(self):
        cfg = SimConfig(dt=0.005, T=50.0, n_chains=8, thin=4, seed=99)
        assert SimConfig.from_json(cfg.to_json()) == cfg


class TestFrozenTrajectory:
    def test_deterministic_replay(self):
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=20.0, n_chains=4, seed=5)
        mu0 = EmpiricalMeasure.dirac(0.0)
        a = frozen_trajectory(spec, mu0, _brownian(), 0.0, cfg)
        b = frozen_trajectory(spec, mu0, _brownian(), 0.0, cfg)
        assert np.array_equal(a.points, b.points)
        c = frozen_trajectory(spec, mu0, _brownian(), 0.0,
                              SimConfig(dt=0.01, T=20.0, n_chains=4, seed=6))
        assert not np.array_equal(a.points, c.points)

    def test_ou_stationary_moments(self):
        # frozen at delta_0 the chain is dX = -X dt + dB: mean 0, var 1/2
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=200.0, n_chains=64, thin=20, seed=42)
        occ = frozen_trajectory(spec, EmpiricalMeasure.dirac(0.0),
                                _brownian(), 0.0, cfg)
        pts = occ.points[:, 0]
        chain_means = pts.reshape(-1, cfg.n_chains).mean(axis=0)
        se = chain_means.std(ddof=1) / np.sqrt(cfg.n_chains)
        assert abs(pts.mean()) <= 3.0 * se
        assert abs(pts.var() - 0.5) <= 0.05

    def test_near_zero_noise_contracts_to_mean(self):
        spec = DriftSpec("mean_field_ou", lam=2.0)
        mu0 = EmpiricalMeasure.dirac(1.5)  # fixed drift target mean 1.5
        cfg = SimConfig(dt=0.01, T=30.0, n_chains=2, seed=1)
        occ = frozen_trajectory(spec, mu0, _brownian(scale=1e-10), 3.0, cfg)
        # stationary point of -2x + 1.5 is 0.75
        assert np.allclose(occ.points, 0.75, atol=1e-6)

    def test_double_well_metastability(self):
        # weak noise, start in the left well: occupation mass stays near a1
        spec = DriftSpec("double_well", lam=1.0, kappa=0.0, a1=-1.0, a2=1.0)
        cfg = SimConfig(dt=0.01, T=50.0, n_chains=16, seed=3)
        occ = frozen_trajectory(spec, EmpiricalMeasure.dirac(-1.0),
                                _brownian(scale=0.1), -1.0, cfg)
        near_left = occ.weights[np.abs(occ.points[:, 0] + 1.0) < 0.5].sum()
        assert near_left > 0.9

    def test_blowup_raises(self):
        spec = DriftSpec("double_well", lam=1.0, kappa=0.0, a1=-1.0, a2=1.0)
        cfg = SimConfig(dt=0.01, T=10.0, n_chains=2, seed=0)
        with pytest.raises(Blowup):
            frozen_trajectory(spec, EmpiricalMeasure.dirac(0.0),
                              _brownian(scale=0.1), 50.0, cfg)

    def test_blowup_retry_at_half_step(self):
        # x0 just beyond the overshoot threshold sqrt(2/dt) for dt = 0.01
        # but inside it for dt = 0.005: the retry should succeed and report
        # the halved step
        spec = DriftSpec("double_well", lam=1.0, kappa=0.0, a1=-1.0, a2=1.0)
        cfg = SimConfig(dt=0.01, T=20.0, n_chains=2, seed=0)
        occ = frozen_trajectory(spec, EmpiricalMeasure.dirac(0.0),
                                _brownian(scale=0.01), 14.65, cfg)
        assert occ.dt == 0.005
        assert np.all(np.abs(occ.points) < 3.0)

    def test_measure_dimension_check(self):
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=20.0, seed=0)
        with pytest.raises(DimensionMismatch):
            frozen_trajectory(spec, EmpiricalMeasure.dirac([0.0, 0.0]),
                              _brownian(), 0.0, cfg)

    def test_occupation_metadata(self):
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=20.0, n_chains=3, thin=10, seed=0)
        occ = frozen_trajectory(spec, EmpiricalMeasure.dirac(0.0),
                                _brownian(), 0.0, cfg)
        # 2000 steps, burn 1000, every 10th collected, 3 chains
        assert occ.ess == 100 * 3
        assert occ.n_chains == 3
        assert np.isclose(occ.weights.sum(), 1.0)


class TestParticleSystem:
    def test_needs_enough_particles(self):
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=10.0, n_chains=10, seed=0)
        with pytest.raises(ValueError):
            particle_system(spec, _brownian(), 0.0, cfg)

    def test_ou_terminal_moments(self):
        # coupled OU with lam = 2: terminal law has mean ~ mean(init)
        # decay e^{-(lam-1)T} ~ 0 and variance ~ 1/(2 lam) = 0.25
        spec = DriftSpec("mean_field_ou", lam=2.0)
        cfg = SimConfig(dt=0.01, T=15.0, n_chains=3000, seed=8)
        (snap,) = particle_system(spec, _brownian(), 1.0, cfg)
        x = snap.points[:, 0]
        assert abs(x.mean()) <= 4.0 / np.sqrt(cfg.n_chains)
        assert abs(x.var() - 0.25) <= 0.03

    def test_mean_conservation_at_unit_rate(self):
        # lam = 1 makes the empirical mean a martingale: it stays within a
        # few noise standard errors of the initial mean
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=10.0, n_chains=2000, seed=12)
        (snap,) = particle_system(spec, _brownian(), 2.0, cfg)
        se = np.sqrt(cfg.T / cfg.n_chains)
        assert abs(snap.points[:, 0].mean() - 2.0) <= 3.0 * se

    def test_snapshot_times(self):
        spec = DriftSpec("mean_field_ou", lam=1.0)
        cfg = SimConfig(dt=0.01, T=10.0, n_chains=200, seed=4)
        snaps = particle_system(spec, _brownian(), 0.0, cfg,
                                snapshot_times=[2.0, 5.0, 10.0])
        assert len(snaps) == 3
        for s in snaps:
            assert s.size == 200

    def test_decoupled_limit_matches_frozen(self):
        # kappa = 0 double well: particles do not interact, so the terminal
        # cloud statistics agree with independent frozen chains
        spec = DriftSpec("double_well", lam=1.0, kappa=0.0, a1=-1.0, a2=1.0)
        cfg = SimConfig(dt=0.01, T=30.0, n_chains=400, seed=9)
        (snap,) = particle_system(spec, _brownian(scale=0.3), -1.0, cfg)
        occ = frozen_trajectory(spec, EmpiricalMeasure.dirac(-1.0),
                                _brownian(scale=0.3), -1.0,
                                SimConfig(dt=0.01, T=30.0, n_chains=100, seed=10))
        m1 = snap.points[:, 0].mean()
        m2 = occ.points[:, 0].mean()
        assert abs(m1 - m2) < 0.1
