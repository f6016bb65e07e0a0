"""Iteration of the measure map mu -> invariant law of the frozen equation,
plus the multi-well multiplicity search with its separation verdicts.

Each iterate replaces mu by the occupation measure of a fresh frozen run
(optionally damped), monitored in Wasserstein-1.  The Monte Carlo noise
floor (W1 between two independent runs at the final measure) is surfaced in
every report so distinctness claims stay honest.
"""

import warnings
from dataclasses import dataclass, replace, field

import numpy as np

from .drift import lyapunov_params
from .errors import NoiseFloorExceedsTol
from .measures import EmpiricalMeasure, concentration, moment, w1
from .simulate import SimConfig, frozen_trajectory


@dataclass(frozen=True)
class FixedPointConfig:
    max_iter: int
    w1_tol: float
    sim: SimConfig
    damping: float = 0.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.w1_tol <= 0:
            raise ValueError("w1_tol must be positive")
        if not (0.0 <= self.damping < 1.0):
            raise ValueError("damping must lie in [0, 1)")


@dataclass(frozen=True)
class FixedPointReport:
    converged: bool
    iterations: int
    final: EmpiricalMeasure
    history: list
    moment_beta_star: float
    noise_floor: float


def iterate_lambda(drift, levy, mu0, cfg, beta_star=None, stream_base=0,
                   check_noise_floor=True):
    """Iterate the frozen-measure map from mu0 until the W1 step falls
    below w1_tol or max_iter is hit.

    beta_star defaults to the drift family's Lyapunov exponent; the report
    records the final measure's beta_star-th moment.  Raises
    NoiseFloorExceedsTol when the tolerance undercuts the estimated Monte
    Carlo noise floor (the configuration cannot certify convergence).
    """
    if beta_star is None:
        beta_star = lyapunov_params(drift, alpha=levy.alpha).beta_star
    mu = mu0
    history = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        sim = replace(cfg.sim, seed=cfg.sim.seed + it)
        occ = frozen_trajectory(drift, mu, levy, mu, sim, stream_base=stream_base)
        if cfg.damping > 0.0:
            nxt = EmpiricalMeasure.mixture([occ, mu], [1.0 - cfg.damping, cfg.damping])
        else:
            nxt = occ
        step = w1(nxt, mu)
        history.append(step)
        mu = nxt
        if step <= cfg.w1_tol:
            converged = True
            break
    # noise floor: two independent-seed occupation runs at the final measure
    occ_a = frozen_trajectory(drift, mu, levy, mu,
                              replace(cfg.sim, seed=cfg.sim.seed + 7001),
                              stream_base=stream_base)
    occ_b = frozen_trajectory(drift, mu, levy, mu,
                              replace(cfg.sim, seed=cfg.sim.seed + 7002),
                              stream_base=stream_base)
    noise_floor = w1(occ_a, occ_b)
    if check_noise_floor and cfg.w1_tol < noise_floor:
        raise NoiseFloorExceedsTol(
            f"w1_tol {cfg.w1_tol:g} is below the noise floor {noise_floor:g}")
    return FixedPointReport(converged=converged, iterations=it, final=mu,
                            history=history,
                            moment_beta_star=moment(mu, beta_star),
                            noise_floor=noise_floor)


@dataclass(frozen=True)
class MultiplicityReport:
    seeds: list
    fixed_points: list
    distinct_pairs: np.ndarray
    separation_evidence: dict
    errors: dict


def multiplicity_search(drift, levy, seeds, M_star, cfg, beta_star=None):
    """Run the fixed-point iteration from a Dirac at each seed center and
    test pairwise distinctness.

    A pair (i, j) is distinct when both final measures keep more than half
    their mass within |y_i - y_j|/2 of their own center and their W1 gap
    exceeds max(2 * noise floor, w1_tol).
    """
    seeds = [np.atleast_1d(np.asarray(s, dtype=float)) for s in seeds]
    k = len(seeds)
    if k >= 2:
        min_gap = min(float(np.linalg.norm(a - b))
                      for i, a in enumerate(seeds) for b in seeds[i + 1:])
        if min_gap == 0.0:
            raise ValueError("seeds must be pairwise distinct")
        if M_star >= min_gap / 4.0:
            warnings.warn("M_star is not below a quarter of the seed gap; "
                          "the separation hypothesis is violated", stacklevel=2)
    reports = [None] * k
    errors = {}
    for i, y in enumerate(seeds):
        try:
            reports[i] = iterate_lambda(drift, levy, EmpiricalMeasure.dirac(y), cfg,
                                        beta_star=beta_star,
                                        stream_base=10_000_000 * (i + 1))
        except Exception as exc:  # partial reports allowed
            errors[i] = exc
    distinct = np.zeros((k, k), dtype=bool)
    evidence = {}
    for i in range(k):
        for j in range(i + 1, k):
            if reports[i] is None or reports[j] is None:
                continue
            gap = float(np.linalg.norm(seeds[i] - seeds[j]))
            ci = concentration(reports[i].final, seeds[i], gap / 2.0)
            cj = concentration(reports[j].final, seeds[j], gap / 2.0)
            dist = w1(reports[i].final, reports[j].final)
            floor = max(reports[i].noise_floor, reports[j].noise_floor)
            ok = (ci < 0.5 and cj < 0.5
                  and dist > max(2.0 * floor, cfg.w1_tol))
            distinct[i, j] = distinct[j, i] = ok
            evidence[(i, j)] = {"w1": dist, "conc_i": ci, "conc_j": cj,
                                "noise_floor": floor, "gap": gap,
                                "M_star_ok": M_star < gap / 4.0}
    return MultiplicityReport(seeds=seeds, fixed_points=reports,
                              distinct_pairs=distinct,
                              separation_evidence=evidence, errors=errors)


def invariance_check(report, params, levy):
    """True when the converged measure's beta_star-th moment respects the
    invariant-set threshold, with a factor-2 Monte Carlo slack."""
    from .conditions import m_star

    if not report.converged:
        raise ValueError("invariance check needs a converged report")
    threshold = m_star(params, levy)["M_star"]
    return moment(report.final, params.beta_star) <= 2.0 * threshold
