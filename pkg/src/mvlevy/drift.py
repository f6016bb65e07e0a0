"""Drift families b(x, mu) and their Lyapunov parameter bundles.

Four built-in families:
  double_well        b = -lam x (x - a1)(x - a2) - kap (x - mean(mu)),  d = 1
  symmetric_two_well b = -(lam/2)((x-y1)|x-y2|^2 + (x-y2)|x-y1|^2) - kap (x - mean(mu))
  asymmetric_cubic   b = -lam x (x-1)(x+2) + kap [(1+x^2)^{(b-1)/2} mu(|.|) + mu(g)]
  mean_field_ou      b = -lam x + mean(mu)

Each family carries known parameters (C_b, lam1, lam2, theta1..theta4, beta)
for the dissipativity inequality
  <x, b(x,mu)> <= C_b - lam1 |x|^{1+theta1}
                  + lam2 (1+|x|^2)^{theta2/2} mu(|.|^{theta3})^{theta4}.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyMeasure, UnsupportedFamily
from .measures import EmpiricalMeasure, moment

DOUBLE_WELL = "double_well"
TWO_WELL = "symmetric_two_well"
ASYM_CUBIC = "asymmetric_cubic"
MEAN_FIELD_OU = "mean_field_ou"


def _g_function(kind, params):
    if kind == "tanh_scaled":
        c, s = params
        return (lambda x: c * np.tanh(s * x)), abs(c)
    if kind == "cosine":
        c, s = params
        return (lambda x: c * np.cos(s * x)), abs(c)
    if kind == "constant":
        (c,) = params
        return (lambda x: np.full_like(np.asarray(x, dtype=float), c)), abs(c)
    raise UnsupportedFamily(f"unknown g kind {kind!r}")


@dataclass(frozen=True)
class DriftSpec:
    family: str
    lam: float
    kappa: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    y1: tuple = ()
    y2: tuple = ()
    beta: float = 0.0
    g_kind: str = "constant"
    g_params: tuple = (0.0,)

    def __post_init__(self):
        if self.lam <= 0:
            raise UnsupportedFamily("lam must be positive")
        if self.family == DOUBLE_WELL and self.a1 * self.a2 >= 0:
            raise UnsupportedFamily("double well needs a1*a2 < 0")
        if self.family == ASYM_CUBIC and self.beta < 1:
            raise UnsupportedFamily("asymmetric cubic needs beta >= 1")
        if self.family == TWO_WELL and len(self.y1) != len(self.y2):
            raise DimensionMismatch("y1 and y2 must share a dimension")
        if self.family not in (DOUBLE_WELL, TWO_WELL, ASYM_CUBIC, MEAN_FIELD_OU):
            raise UnsupportedFamily(f"unknown family {self.family!r}")

    @property
    def dim(self):
        return len(self.y1) if self.family == TWO_WELL else 1

    @property
    def g(self):
        return _g_function(self.g_kind, self.g_params)[0]

    @property
    def g_sup(self):
        return _g_function(self.g_kind, self.g_params)[1]

    def to_json(self):
        out = {"family": self.family, "lam": self.lam, "kappa": self.kappa}
        if self.family == DOUBLE_WELL:
            out.update(a1=self.a1, a2=self.a2)
        if self.family == TWO_WELL:
            out.update(y1=list(self.y1), y2=list(self.y2))
        if self.family == ASYM_CUBIC:
            out.update(beta=self.beta, g_kind=self.g_kind, g_params=list(self.g_params))
        return out

    @staticmethod
    def from_json(obj):
        kw = dict(obj)
        if "y1" in kw:
            kw["y1"] = tuple(kw["y1"])
            kw["y2"] = tuple(kw["y2"])
        if "g_params" in kw:
            kw["g_params"] = tuple(kw["g_params"])
        return DriftSpec(**kw)


def measure_stats(spec, mu):
    """Precompute the measure functionals a family needs, once per measure."""
    if mu.size == 0:
        raise EmptyMeasure("empty measure")
    stats = {"mean": mu.mean()}
    if spec.family == ASYM_CUBIC:
        x = mu.points[:, 0]
        stats["abs_moment"] = float(mu.weights @ np.abs(x))
        stats["g_moment"] = float(mu.weights @ spec.g(x))
    return stats


def drift_field(spec, X, stats):
    """Vectorized drift at rows of X (shape (n, d)) for fixed measure stats."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if spec.family == DOUBLE_WELL:
        x = X[:, 0]
        out = -spec.lam * x * (x - spec.a1) * (x - spec.a2) - spec.kappa * (x - stats["mean"][0])
        return out[:, None]
    if spec.family == MEAN_FIELD_OU:
        return -spec.lam * X + stats["mean"][None, :]
    if spec.family == ASYM_CUBIC:
        x = X[:, 0]
        out = (-spec.lam * x * (x - 1.0) * (x + 2.0)
               + spec.kappa * ((1.0 + x ** 2) ** ((spec.beta - 1.0) / 2.0) * stats["abs_moment"]
                               + stats["g_moment"]))
        return out[:, None]
    # symmetric two-well
    y1 = np.asarray(spec.y1, dtype=float)
    y2 = np.asarray(spec.y2, dtype=float)
    d1 = X - y1
    d2 = X - y2
    n1 = np.sum(d1 ** 2, axis=1, keepdims=True)
    n2 = np.sum(d2 ** 2, axis=1, keepdims=True)
    cubic = -(spec.lam / 2.0) * (d1 * n2 + d2 * n1)
    return cubic - spec.kappa * (X - stats["mean"][None, :])


def field_closure(spec, stats):
    """Drift evaluator specialized to one family and one frozen measure.

    Returns a function of an (n, d) state block; used on the hot
    integration path where per-step branching is wasteful.
    """
    lam, kap = spec.lam, spec.kappa
    if spec.family == MEAN_FIELD_OU:
        mean = stats["mean"][None, :]
        return lambda X: mean - lam * X
    if spec.family == DOUBLE_WELL:
        a1, a2, m = spec.a1, spec.a2, stats["mean"][0]
        return lambda X: -lam * X * (X - a1) * (X - a2) - kap * (X - m)
    if spec.family == ASYM_CUBIC:
        b, am, gm = spec.beta, stats["abs_moment"], stats["g_moment"]
        return lambda X: (-lam * X * (X - 1.0) * (X + 2.0)
                          + kap * ((1.0 + X ** 2) ** ((b - 1.0) / 2.0) * am + gm))
    y1 = np.asarray(spec.y1, dtype=float)
    y2 = np.asarray(spec.y2, dtype=float)
    mean = stats["mean"][None, :]

    def field(X):
        d1 = X - y1
        d2 = X - y2
        n1 = np.sum(d1 ** 2, axis=1, keepdims=True)
        n2 = np.sum(d2 ** 2, axis=1, keepdims=True)
        return -(lam / 2.0) * (d1 * n2 + d2 * n1) - kap * (X - mean)

    return field


def affine_coefficients(spec, stats):
    """(rate, shift) with b(x) = shift - rate * x when the family is affine
    in the state, else None.  Lets the integrator collapse the Euler update
    to two array operations per step."""
    if spec.family == MEAN_FIELD_OU:
        return spec.lam, stats["mean"]
    return None


def eval_drift(spec, x, mu):
    """b(x, mu) at a single point, measure integrals as empirical averages."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[0] != spec.dim:
        raise DimensionMismatch(f"x has dim {x.shape[0]}, drift wants {spec.dim}")
    if mu.dim != spec.dim:
        raise DimensionMismatch(f"measure has dim {mu.dim}, drift wants {spec.dim}")
    stats = measure_stats(spec, mu)
    return drift_field(spec, x[None, :], stats)[0]


# ---------------------------------------------------------------------------
# Lyapunov parameters


def _h(r):
    return r / (1.0 + r)


@dataclass(frozen=True)
class A1Params:
    """Symbols of the dissipativity inequality with derived exponents.

    beta_star = beta + theta1 - 1, gamma1 = (beta+theta2-2)^+ / beta_star,
    gamma2 = (beta-1)^+ / beta_star.  case is "i" when
    beta_star (1-gamma1) > theta3 theta4, "ii" at equality with lam1 > lam2,
    and None otherwise (threshold machinery then unavailable).
    """

    C_b: float
    lam1: float
    lam2: float
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    beta: float

    def __post_init__(self):
        if min(self.C_b, self.lam1, self.lam2) < 0:
            raise ValueError("C_b, lam1, lam2 must be nonnegative")
        if self.theta1 < 1.0 - self.beta / 2.0 - 1e-12:
            raise ValueError("need theta1 >= 1 - beta/2")
        if self.theta2 >= 1.0 + self.theta1:
            raise ValueError("need theta2 < 1 + theta1")
        bs = self.beta_star
        if not (0.0 < self.theta3 <= bs + 1e-12):
            raise ValueError("need theta3 in (0, beta_star]")
        if not (0.0 <= self.gamma1 < 1.0):
            raise ValueError("need gamma1 in [0, 1)")

    @property
    def beta_star(self):
        return self.beta + self.theta1 - 1.0

    @property
    def gamma1(self):
        return max(self.beta + self.theta2 - 2.0, 0.0) / self.beta_star

    @property
    def gamma2(self):
        return max(self.beta - 1.0, 0.0) / self.beta_star

    @property
    def case(self):
        gap = self.beta_star * (1.0 - self.gamma1) - self.theta3 * self.theta4
        if gap > 1e-12:
            return "i"
        if abs(gap) <= 1e-12 and self.lam1 > self.lam2:
            return "ii"
        return None

    @staticmethod
    def h(r):
        return _h(r)


def _grid_sup(fn, lo=-50.0, hi=50.0, n=4001):
    """Supremum of a 1-d residual on a grid with one local refinement pass."""
    xs = np.linspace(lo, hi, n)
    vals = fn(xs)
    i = int(np.argmax(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, n - 1)]
    fine = np.linspace(a, b, 2001)
    return float(max(vals.max(), fn(fine).max()))


def lyapunov_params(spec, beta=None, alpha=None):
    """Known (C_b, lam1, lam2, theta) bundle for a built-in family.

    beta defaults to (1 + alpha)/2 for stable alpha in (1, 2), else 1.5.
    C_b is a numerical supremum of the measure-free residual over
    [-50, 50] with a 5 percent margin.
    """
    if beta is None:
        if alpha is not None and 1.0 < alpha < 2.0:
            beta = (1.0 + alpha) / 2.0
        else:
            beta = 1.5
    lam, kap = spec.lam, spec.kappa
    if spec.family == DOUBLE_WELL:
        a1, a2 = spec.a1, spec.a2

        def resid(x):
            return -lam * x ** 2 * (x - a1) * (x - a2) - kap * x ** 2 + (lam / 2.0) * x ** 4

        C_b = max(_grid_sup(resid) * 1.05, 1e-9)
        return A1Params(C_b, lam / 2.0, kap, 3.0, 1.0, 1.0, 1.0, beta)
    if spec.family == ASYM_CUBIC:
        gsup = spec.g_sup

        def resid(x):
            return (-lam * x ** 2 * (x - 1.0) * (x + 2.0) + (lam / 2.0) * x ** 4
                    + kap * gsup * np.abs(x))

        C_b = max(_grid_sup(resid) * 1.05, 1e-9)
        return A1Params(C_b, lam / 2.0, kap, 3.0, spec.beta, 1.0, 1.0, beta)
    if spec.family == TWO_WELL:
        y1 = np.asarray(spec.y1, dtype=float)
        y2 = np.asarray(spec.y2, dtype=float)
        d = len(y1)
        gen = np.random.Generator(np.random.Philox(key=np.array([7, 7], dtype=np.uint64)))
        if d == 1:
            dirs = np.array([[1.0], [-1.0]])
        else:
            dirs = gen.standard_normal((64, d))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = np.linspace(0.0, 50.0, 2001)[1:]
        best = 0.0
        for u in dirs:
            X = radii[:, None] * u[None, :]
            d1 = X - y1
            d2 = X - y2
            n1 = np.sum(d1 ** 2, axis=1)
            n2 = np.sum(d2 ** 2, axis=1)
            inner = -(lam / 2.0) * (np.sum(X * d1, axis=1) * n2 + np.sum(X * d2, axis=1) * n1)
            resid = inner + (lam / 2.0) * np.sum(X ** 2, axis=1) ** 2
            best = max(best, float(resid.max()))
        C_b = max(best * 1.05, 1e-9)
        return A1Params(C_b, lam / 2.0, kap, 3.0, 1.0, 1.0, 1.0, beta)
    if spec.family == MEAN_FIELD_OU:
        if lam <= 0:
            raise UnsupportedFamily("mean-field OU needs lam > 0")
        # <x,b> = -lam x^2 + x mean(mu) <= -(lam/2)|x|^2 + (1+x^2)^{1/2} mu(|.|)
        return A1Params(1e-9, lam / 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, beta)
    raise UnsupportedFamily(spec.family)


def verify_E12(spec, params, grid, mus):
    """Check the dissipativity inequality at every (grid point, measure) pair.

    Returns {"ok", "worst_slack", "violations"}; a violation is a
    (x, measure index, slack) triple with negative slack.
    """
    violations = []
    worst = math.inf
    for mi, mu in enumerate(mus):
        stats = measure_stats(spec, mu)
        m3 = moment(mu, params.theta3)
        for x in grid:
            xv = np.atleast_1d(np.asarray(x, dtype=float))
            b = drift_field(spec, xv[None, :], stats)[0]
            lhs = float(xv @ b)
            nx2 = float(xv @ xv)
            rhs = (params.C_b - params.lam1 * nx2 ** ((1.0 + params.theta1) / 2.0)
                   + params.lam2 * (1.0 + nx2) ** (params.theta2 / 2.0)
                   * m3 ** params.theta4)
            slack = rhs - lhs
            worst = min(worst, slack)
            if slack < 0:
                violations.append((tuple(xv), mi, slack))
    return {"ok": not violations, "worst_slack": worst, "violations": violations}
