"""Tests for the measure fixed-point iteration and the multiplicity search.

Cheap Brownian configurations keep each run under a second while still
exercising convergence, noise-floor accounting, and the separation verdicts.
"""

import warnings

import numpy as np
import pytest

from mvlevy import (
    A1Params,
    DriftSpec,
    EmpiricalMeasure,
    FixedPointConfig,
    FixedPointReport,
    LevyMeasureSpec,
    NoiseFloorExceedsTol,
    SimConfig,
    invariance_check,
    iterate_lambda,
    m_star,
    multiplicity_search,
    w1,
)

BM = LevyMeasureSpec(alpha=2.0, scale=0.1)
SIM = SimConfig(dt=0.01, T=10.0, n_chains=200, seed=11)
DW = DriftSpec("double_well", lam=1.0, kappa=0.0, a1=-1.0, a2=1.0)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            FixedPointConfig(max_iter=0, w1_tol=0.1, sim=SIM)
        with pytest.raises(ValueError):
            FixedPointConfig(max_iter=2, w1_tol=0.0, sim=SIM)
        with pytest.raises(ValueError):
            FixedPointConfig(max_iter=2, w1_tol=0.1, sim=SIM, damping=1.0)


class TestIterateLambda:
    def test_interaction_free_map_converges_immediately(self):
        # kappa = 0 makes the map constant in mu, so the first iterate is
        # already the fixed point
        cfg = FixedPointConfig(max_iter=4, w1_tol=0.05, sim=SIM)
        rep = iterate_lambda(DW, BM, EmpiricalMeasure.dirac(-1.0), cfg)
        assert rep.converged
        assert rep.iterations <= 2
        assert abs(rep.final.mean()[0] + 1.0) < 0.05
        assert rep.noise_floor < 0.05
        assert rep.moment_beta_star > 0

    def test_independent_of_initial_measure(self):
        cfg = FixedPointConfig(max_iter=4, w1_tol=0.05, sim=SIM)
        a = iterate_lambda(DW, BM, EmpiricalMeasure.dirac(-1.0), cfg)
        b = iterate_lambda(DW, BM, EmpiricalMeasure.dirac(-0.8), cfg,
                           stream_base=55)
        floor = max(a.noise_floor, b.noise_floor)
        assert w1(a.final, b.final) <= 2.0 * floor

    def test_ou_mean_contraction(self):
        # lam = 2 halves the mean each pass: dirac(-1) flows toward 0
        ou = DriftSpec("mean_field_ou", lam=2.0)
        cfg = FixedPointConfig(max_iter=10, w1_tol=0.03, sim=SIM)
        rep = iterate_lambda(ou, BM, EmpiricalMeasure.dirac(-1.0), cfg)
        assert rep.converged
        assert abs(rep.final.mean()[0]) < 0.1
        steps = rep.history
        assert steps[0] > steps[-1]

    def test_noise_floor_guard(self):
        cfg = FixedPointConfig(max_iter=1, w1_tol=1e-9, sim=SIM)
        with pytest.raises(NoiseFloorExceedsTol):
            iterate_lambda(DW, BM, EmpiricalMeasure.dirac(-1.0), cfg)
        rep = iterate_lambda(DW, BM, EmpiricalMeasure.dirac(-1.0), cfg,
                             check_noise_floor=False)
        assert not rep.converged
        assert rep.noise_floor > 1e-9

    def test_deterministic_replay(self):
        cfg = FixedPointConfig(max_iter=2, w1_tol=0.05, sim=SIM)
        a = iterate_lambda(DW, BM, EmpiricalMeasure.dirac(1.0), cfg)
        b = iterate_lambda(DW, BM, EmpiricalMeasure.dirac(1.0), cfg)
        assert np.array_equal(a.final.points, b.final.points)
        assert a.history == b.history

    def test_damping_slows_steps(self):
        ou = DriftSpec("mean_field_ou", lam=2.0)
        base = FixedPointConfig(max_iter=3, w1_tol=1e-9, sim=SIM)
        damped = FixedPointConfig(max_iter=3, w1_tol=1e-9, sim=SIM, damping=0.7)
        a = iterate_lambda(ou, BM, EmpiricalMeasure.dirac(-1.0), base,
                           check_noise_floor=False)
        b = iterate_lambda(ou, BM, EmpiricalMeasure.dirac(-1.0), damped,
                           check_noise_floor=False)
        assert b.history[0] < a.history[0]


class TestMultiplicitySearch:
    CFG = FixedPointConfig(max_iter=4, w1_tol=0.05, sim=SIM)

    def test_same_well_seeds_not_distinct(self):
        rep = multiplicity_search(DW, BM, [[-1.2], [-0.8], [1.0]], 0.05, self.CFG)
        assert not rep.distinct_pairs[0, 1]
        assert rep.distinct_pairs[0, 2] and rep.distinct_pairs[1, 2]
        assert not rep.errors
        ev = rep.separation_evidence[(0, 2)]
        assert ev["w1"] > 1.5 and ev["conc_i"] < 0.5 and ev["conc_j"] < 0.5
        assert ev["M_star_ok"]

    def test_symmetric_matrix_and_permutation_invariance(self):
        a = multiplicity_search(DW, BM, [[-1.0], [1.0]], 0.05, self.CFG)
        b = multiplicity_search(DW, BM, [[1.0], [-1.0]], 0.05, self.CFG)
        assert np.array_equal(a.distinct_pairs, a.distinct_pairs.T)
        assert a.distinct_pairs[0, 1] == b.distinct_pairs[0, 1]

    def test_separation_hypothesis_warning(self):
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always")
            multiplicity_search(DW, BM, [[-1.0], [1.0]], 1.0, self.CFG)
        assert any("separation hypothesis" in str(w.message) for w in wlist)

    def test_duplicate_seeds_rejected(self):
        with pytest.raises(ValueError):
            multiplicity_search(DW, BM, [[1.0], [1.0]], 0.05, self.CFG)

    def test_partial_errors_recorded(self):
        # an impossible tolerance fails every branch but the report survives
        bad = FixedPointConfig(max_iter=1, w1_tol=1e-9, sim=SIM)
        rep = multiplicity_search(DW, BM, [[-1.0], [1.0]], 0.05, bad)
        assert set(rep.errors) == {0, 1}
        assert not rep.distinct_pairs.any()


class TestInvarianceCheck:
    PARAMS = A1Params(1e-9, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5)

    def _report(self, x):
        return FixedPointReport(converged=True, iterations=1,
                                final=EmpiricalMeasure.dirac(x),
                                history=[0.0], moment_beta_star=0.0,
                                noise_floor=0.0)

    def test_threshold_with_slack(self):
        assert self.PARAMS.case == "ii"
        thr = m_star(self.PARAMS, BM)["M_star"]
        inside = (1.9 * thr) ** (1.0 / self.PARAMS.beta_star)
        outside = (2.1 * thr) ** (1.0 / self.PARAMS.beta_star)
        assert invariance_check(self._report(inside), self.PARAMS, BM)
        assert not invariance_check(self._report(outside), self.PARAMS, BM)
        assert not invariance_check(self._report(1e6), self.PARAMS, BM)

    def test_requires_convergence(self):
        rep = FixedPointReport(converged=False, iterations=1,
                               final=EmpiricalMeasure.dirac(0.0),
                               history=[1.0], moment_beta_star=0.0,
                               noise_floor=0.0)
        with pytest.raises(ValueError):
            invariance_check(rep, self.PARAMS, BM)
