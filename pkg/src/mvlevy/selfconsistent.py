"""Scalar self-consistency analysis for the gradient-type quartic case and
the mean-field Ornstein-Uhlenbeck dichotomy.

The quartic family has stationary candidates with density proportional to
exp(gamma m x - x^4 + beta x^2); a candidate is consistent when its mean
equals m, i.e. when h(m) = int (x - m) exp(...) dx vanishes.  The number of
roots of h jumps from 1 to 3 at beta_c = (12 - gamma^2)/(2 gamma) for
gamma < 2 sqrt(3).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import GridTooCoarse, NoTransition, QuadratureFailure

GAMMA_C = 2.0 * math.sqrt(3.0)


@dataclass(frozen=True)
class GradientCase:
    gamma: float
    beta: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def exponent(self, x, m):
        x = np.asarray(x, dtype=float)
        return self.gamma * m * x - x ** 4 + self.beta * x ** 2


def _support(case, m):
    """Interval outside which the density exponent drops 60 below its max."""
    half = 2.0 + math.sqrt(abs(case.beta)) + (case.gamma * abs(m)) ** (1.0 / 3.0)
    xs = np.linspace(-8.0 * half, 8.0 * half, 4001)
    f = case.exponent(xs, m)
    fmax = f.max()
    keep = xs[f >= fmax - 60.0]
    pad = xs[1] - xs[0]
    return float(keep.min() - pad), float(keep.max() + pad), float(fmax)


def h_fn(case, m):
    """int (x - m) exp(gamma m x - x^4 + beta x^2 - fmax) dx.

    The exponent is shifted by its max for stable quadrature; the shift
    rescales h by a positive constant and leaves its roots and signs alone.
    """
    lo, hi, fmax = _support(case, m)

    def num(x):
        return (x - m) * np.exp(case.exponent(x, m) - fmax)

    # split at the sign change of (x - m) so the near-cancellation there
    # does not inflate the error estimate
    pts = [m] if lo < m < hi else None
    val, err = integrate.quad(num, lo, hi, limit=400, epsabs=1e-12,
                              epsrel=1e-11, points=pts)
    mass, _ = integrate.quad(lambda x: np.exp(case.exponent(x, m) - fmax), lo, hi, limit=200)
    if mass <= 0 or not np.isfinite(val):
        raise QuadratureFailure("degenerate normalizing mass")
    if err > 1e-8 * mass:
        raise QuadratureFailure(f"quadrature error {err:g} too large")
    return float(val)


def _h_scan(case, ms):
    """Vectorized h on an m-grid via a shared dense trapezoid rule.

    Accurate enough for sign scanning; root refinement goes back to the
    adaptive h_fn.
    """
    m_abs = float(np.abs(ms).max())
    lo, hi, _ = _support(case, m_abs)
    lo2, hi2, _ = _support(case, -m_abs)
    lo, hi = min(lo, lo2), max(hi, hi2)
    xs = np.linspace(lo, hi, 6001)
    expo = case.gamma * np.outer(ms, xs) - xs ** 4 + case.beta * xs ** 2
    expo -= expo.max(axis=1, keepdims=True)
    dens = np.exp(expo)
    return np.trapezoid((xs[None, :] - ms[:, None]) * dens, xs, axis=1)


def root_count(case, m_max, grid_n, refine=True):
    """Sign-change scan of h on [-m_max, m_max] refined by bisection.

    Tangential near-zeros without a sign flip are reported separately and
    not counted.
    """
    if grid_n < 1000:
        raise ValueError("grid_n must be >= 1000")
    ms = np.linspace(-m_max, m_max, grid_n)
    hs = _h_scan(case, ms)
    roots = []
    tangential = []
    scale = np.abs(hs).max()
    i = 0
    while i < grid_n - 1:
        if hs[i] == 0.0:
            roots.append(float(ms[i]))
            i += 1
            continue
        if hs[i] * hs[i + 1] < 0.0:
            if refine:
                r = optimize.brentq(lambda m: h_fn(case, m), ms[i], ms[i + 1], xtol=1e-8)
            else:
                r = ms[i] - hs[i] * (ms[i + 1] - ms[i]) / (hs[i + 1] - hs[i])
            roots.append(float(r))
        elif abs(hs[i]) < 1e-9 * scale and abs(hs[i + 1]) < 1e-9 * scale:
            tangential.append(float(ms[i]))
        i += 1
    roots = sorted(roots)
    cell = ms[1] - ms[0]
    for r1, r2 in zip(roots, roots[1:]):
        if r2 - r1 < 3.0 * cell:
            raise GridTooCoarse(f"roots {r1:.6g} and {r2:.6g} closer than 3 cells")
    return {"roots": roots, "count": len(roots), "tangential": tangential}


@dataclass(frozen=True)
class BetaCResult:
    value: float
    supercritical: bool

    def __float__(self):
        return self.value


def _count_at(gamma, beta):
    case = GradientCase(gamma, beta)
    m_max = max(6.0, 1.6 * math.sqrt(max(beta, 1.0)))
    for grid_n in (1000, 4000, 16000):
        try:
            return root_count(case, m_max, grid_n, refine=False)["count"]
        except GridTooCoarse:
            continue
    # roots still unresolved at the finest grid: they are merging, which
    # only happens on the multi-root side of the transition
    return 3


def beta_c(gamma, tol):
    """Critical beta where the root count passes from 1 to 3.

    For gamma >= 2 sqrt(3) the count is already 3 for every beta > 0; the
    result is flagged supercritical with value 0.
    """
    if gamma <= 0 or tol <= 0:
        raise ValueError("gamma and tol must be positive")
    if gamma >= GAMMA_C:
        return BetaCResult(0.0, True)
    lo, hi = 1e-3, 1e2
    if _count_at(gamma, lo) != 1:
        return BetaCResult(0.0, True)
    if _count_at(gamma, hi) == 1:
        raise NoTransition("no 1 -> 3 transition in the scanned beta range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _count_at(gamma, mid) == 1:
            lo = mid
        else:
            hi = mid
    return BetaCResult(0.5 * (lo + hi), False)


def ou_classify(lam):
    """Stationary structure of the mean-field OU equation.

    Unique zero-mean Gaussian for lam != 1; a continuum indexed by the
    (conserved) mean at lam = 1; the variance is 1/(2 lam) either way.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if lam == 1.0:
        return {"kind": "continuum", "mean_set": "all real m", "variance": 0.5}
    return {"kind": "unique", "mean_set": "{0}", "variance": 1.0 / (2.0 * lam)}


def stationary_density(case, m, grid):
    """Normalized density exp(gamma m x - x^4 + beta x^2)/C on the grid."""
    grid = np.asarray(grid, dtype=float)
    lo, hi, fmax = _support(case, m)
    if grid.min() > lo or grid.max() < hi:
        raise QuadratureFailure("grid does not cover the effective support")
    mass, err = integrate.quad(lambda x: np.exp(case.exponent(x, m) - fmax),
                               lo, hi, limit=200)
    if mass <= 0:
        raise QuadratureFailure("degenerate normalizing mass")
    return np.exp(case.exponent(grid, m) - fmax) / mass
