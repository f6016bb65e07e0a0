"""Euler integration of the frozen-measure SDE and the interacting
particle system, with time-averaged occupation measures as output.

Chains advance as one vectorized block; every chain owns a counter-based
stream keyed by (seed, stream id), so the result is independent of how the
work is scheduled.
"""

import math
from dataclasses import dataclass, replace, field

import numpy as np

from .errors import Blowup, DimensionMismatch
from .drift import affine_coefficients, drift_field, field_closure, measure_stats
from .levy import sample_increment
from .measures import EmpiricalMeasure
from . import rng as _rng

BLOWUP_GUARD = 1e8


@dataclass(frozen=True)
class SimConfig:
    dt: float
    T: float
    n_chains: int = 1
    burn_in_fraction: float = 0.5
    thin: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0 or self.dt > 0.01:
            raise ValueError("dt must lie in (0, 0.01]")
        if not (0.0 <= self.burn_in_fraction < 1.0):
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if self.T / self.dt < 1e3:
            raise ValueError("need at least 10^3 steps (T/dt >= 1000)")
        if self.thin < 1 or self.n_chains < 1:
            raise ValueError("thin and n_chains must be positive")

    def to_json(self):
        return {"dt": self.dt, "T": self.T, "n_chains": self.n_chains,
                "burn_in_fraction": self.burn_in_fraction,
                "thin": self.thin, "seed": self.seed}

    @staticmethod
    def from_json(obj):
        return SimConfig(**obj)


@dataclass(frozen=True)
class OccupationMeasure(EmpiricalMeasure):
    """Time-averaged empirical measure of thinned post-burn-in states."""

    T: float = 0.0
    dt: float = 0.0
    n_chains: int = 0
    ess: int = 0


def _initial_states(x0, n, d, gen):
    if isinstance(x0, EmpiricalMeasure):
        idx = gen.choice(x0.size, size=n, p=x0.weights)
        return x0.points[idx].copy()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape[0] != d:
        raise DimensionMismatch(f"x0 has dim {x0.shape[0]}, expected {d}")
    return np.tile(x0, (n, 1))


INCREMENT_CHUNK = 256


def _run_euler(spec, stats, levy, X, cfg, dt, stream_base, collect=True):
    """Advance all chains; returns (kept states, final states).

    Increments are drawn in chunks of steps to amortize generator overhead;
    the draw order is fixed by (seed, stream) alone.
    """
    n, d = X.shape
    n_steps = int(round(cfg.T / dt))
    burn = int(round(cfg.burn_in_fraction * n_steps))
    gen = _rng.stream(cfg.seed, stream_base)
    aff = affine_coefficients(spec, stats)
    field = None if aff is not None else field_closure(spec, stats)
    kept = []
    step = 0
    while step < n_steps:
        m = min(INCREMENT_CHUNK, n_steps - step)
        dZ = sample_increment(levy, dt, gen, size=n * m).reshape(m, n, d)
        if aff is not None:
            # affine drift: fold the constant part into the increments once
            # per chunk, leaving two array operations per step
            rate, shift = aff
            decay = 1.0 - rate * dt
            dZ += shift * dt
            for j in range(m):
                step += 1
                X = decay * X + dZ[j]
                if collect and step > burn and (step - burn) % cfg.thin == 0:
                    kept.append(X.copy())
        else:
            # overflow here is the blowup signal, not an error; the guard
            # below turns it into a Blowup exception
            with np.errstate(over="ignore", invalid="ignore"):
                for j in range(m):
                    step += 1
                    X = X + field(X) * dt + dZ[j]
                    if collect and step > burn and (step - burn) % cfg.thin == 0:
                        kept.append(X.copy())
        amax = np.abs(X).max()
        if not np.isfinite(amax) or amax > BLOWUP_GUARD:
            raise Blowup(step, amax if np.isfinite(amax) else math.inf)
    return kept, X


def frozen_trajectory(spec, frozen, levy, x0, cfg, stream_base=0):
    """Occupation measure of the SDE with the measure argument frozen.

    Euler scheme with exact stable increments; the frozen measure is never
    updated during the run.  On a blowup the step size is halved once and
    the run retried before the error propagates.
    """
    if frozen.dim != spec.dim:
        raise DimensionMismatch("frozen measure dimension mismatch")
    stats = measure_stats(spec, frozen)
    gen0 = _rng.stream(cfg.seed, stream_base + 1_000_000)
    X = _initial_states(x0, cfg.n_chains, spec.dim, gen0)
    try:
        kept, _ = _run_euler(spec, stats, levy, X, cfg, cfg.dt, stream_base)
        dt_used = cfg.dt
    except Blowup:
        # one retry at half the step, then give up
        X = _initial_states(x0, cfg.n_chains, spec.dim, gen0)
        cfg2 = replace(cfg, dt=cfg.dt / 2.0, thin=cfg.thin * 2)
        kept, _ = _run_euler(spec, stats, levy, X, cfg2, cfg2.dt, stream_base)
        dt_used = cfg2.dt
    pts = np.concatenate(kept, axis=0)
    n = pts.shape[0]
    return OccupationMeasure(pts, np.full(n, 1.0 / n),
                             T=cfg.T, dt=dt_used, n_chains=cfg.n_chains, ess=n)


def particle_system(spec, levy, init, cfg, snapshot_times=None):
    """N coupled Euler chains whose drift uses the instantaneous empirical
    law of the whole cloud; snapshots at the requested times (default:
    terminal state only)."""
    if cfg.n_chains < 100:
        raise ValueError("particle system needs n_chains >= 100")
    d = spec.dim
    gen0 = _rng.stream(cfg.seed, 2_000_000)
    X = _initial_states(init, cfg.n_chains, d, gen0)
    n_steps = int(round(cfg.T / cfg.dt))
    if snapshot_times is None:
        snapshot_times = [cfg.T]
    snap_steps = sorted({min(n_steps, max(1, int(round(t / cfg.dt)))) for t in snapshot_times})
    gen = _rng.stream(cfg.seed, 3_000_000)
    snaps = []
    w = np.full(cfg.n_chains, 1.0 / cfg.n_chains)
    for step in range(1, n_steps + 1):
        cloud = EmpiricalMeasure(X.copy(), w)
        stats = measure_stats(spec, cloud)
        dZ = sample_increment(levy, cfg.dt, gen, size=cfg.n_chains)
        X = X + field_closure(spec, stats)(X) * cfg.dt + dZ
        amax = np.abs(X).max()
        if not np.isfinite(amax) or amax > BLOWUP_GUARD:
            raise Blowup(step, amax if np.isfinite(amax) else math.inf)
        if step in snap_steps:
            snaps.append(EmpiricalMeasure(X.copy(), w.copy()))
    return snaps
