"""Parametric additive-noise families and the order checks between them.

Five families are supported: Gaussian, Exponential, Gamma (rate fixed to 1),
PowerLaw with density (alpha - 1)(1 + w)^-alpha on w >= 0, and a centered
Uniform. Every family is vectorized over numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .core import FiniteKernel, StateLevels
from .errors import InsufficientCoverage, OutOfSupport, QuantileOutOfRange, WrongFamilies
from .verdict import Verdict, fails, holds

ORDER_TOL = 1e-10


class NoiseFamily:
    """Base class; subclasses supply closed-form pdf/cdf/ccdf/quantile."""

    support: tuple[float, float] = (-math.inf, math.inf)

    def pdf(self, w):
        raise NotImplementedError

    def cdf(self, w):
        raise NotImplementedError

    def ccdf(self, w):
        return 1.0 - self.cdf(w)

    def quantile(self, q):
        raise NotImplementedError

    @property
    def name(self) -> str:
        return type(self).__name__

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class Gaussian(NoiseFamily):
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("Gaussian sigma must be positive")

    def pdf(self, w):
        z = np.asarray(w, dtype=float) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def cdf(self, w):
        return special.ndtr(np.asarray(w, dtype=float) / self.sigma)

    def ccdf(self, w):
        return special.ndtr(-np.asarray(w, dtype=float) / self.sigma)

    def quantile(self, q):
        return self.sigma * special.ndtri(q)

    def params(self):
        return {"sigma": self.sigma}


@dataclass(frozen=True)
class Exponential(NoiseFamily):
    rate: float
    support = (0.0, math.inf)

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("Exponential rate must be positive")

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w >= 0, self.rate * np.exp(-self.rate * np.maximum(w, 0.0)), 0.0)

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w > 0, -np.expm1(-self.rate * np.maximum(w, 0.0)), 0.0)

    def ccdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w > 0, np.exp(-self.rate * np.maximum(w, 0.0)), 1.0)

    def quantile(self, q):
        return -np.log1p(-np.asarray(q, dtype=float)) / self.rate

    def params(self):
        return {"rate": self.rate}


@dataclass(frozen=True)
class Gamma(NoiseFamily):
    shape: float
    support = (0.0, math.inf)

    def __post_init__(self):
        if not self.shape >= 1:
            raise ValueError("Gamma shape must be >= 1")

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        wp = np.maximum(w, 0.0)
        with np.errstate(divide="ignore"):
            logp = (self.shape - 1) * np.log(wp) - wp - special.gammaln(self.shape)
        out = np.where(w > 0, np.exp(logp), 0.0)
        if self.shape == 1:
            out = np.where(w == 0, 1.0, out)
        return out

    def cdf(self, w):
        return special.gammainc(self.shape, np.maximum(np.asarray(w, dtype=float), 0.0))

    def ccdf(self, w):
        return special.gammaincc(self.shape, np.maximum(np.asarray(w, dtype=float), 0.0))

    def quantile(self, q):
        # bracketed root of the cdf; gammaincinv is not used so the tolerance is explicit
        def one(p):
            hi = self.shape + 10 * math.sqrt(self.shape) + 10
            while special.gammainc(self.shape, hi) < p:
                hi *= 2
            return optimize.brentq(lambda t: special.gammainc(self.shape, t) - p, 0.0, hi, xtol=1e-12, rtol=1e-15)

        q = np.asarray(q, dtype=float)
        return np.vectorize(one, otypes=[float])(q) if q.ndim else one(float(q))

    def params(self):
        return {"shape": self.shape}


@dataclass(frozen=True)
class PowerLaw(NoiseFamily):
    alpha: float
    support = (0.0, math.inf)

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError("PowerLaw alpha must exceed 1")

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w >= 0, (self.alpha - 1) * (1 + np.maximum(w, 0.0)) ** (-self.alpha), 0.0)

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w > 0, -np.expm1((1 - self.alpha) * np.log1p(np.maximum(w, 0.0))), 0.0)

    def ccdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w > 0, (1 + np.maximum(w, 0.0)) ** (1 - self.alpha), 1.0)

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        return np.expm1(-np.log1p(-q) / (self.alpha - 1))

    def params(self):
        return {"alpha": self.alpha}


@dataclass(frozen=True)
class Uniform(NoiseFamily):
    """Uniform noise on [-width/2, width/2]."""

    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("Uniform width must be positive")

    @property
    def support(self):
        return (-self.width / 2, self.width / 2)

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(np.abs(w) <= self.width / 2, 1.0 / self.width, 0.0)

    def cdf(self, w):
        return np.clip(np.asarray(w, dtype=float) / self.width + 0.5, 0.0, 1.0)

    def quantile(self, q):
        return (np.asarray(q, dtype=float) - 0.5) * self.width

    def params(self):
        return {"width": self.width}


FAMILIES = {"gaussian": Gaussian, "exponential": Exponential, "gamma": Gamma, "powerlaw": PowerLaw, "uniform": Uniform}


def evaluate(f: NoiseFamily, what: str, arg):
    """Evaluate ``pdf``, ``cdf``, ``ccdf`` or ``quantile`` of a family at ``arg``."""
    a = np.asarray(arg, dtype=float)
    if what == "quantile":
        if np.any((a <= 0) | (a >= 1)):
            raise QuantileOutOfRange(f"quantile level {arg!r} not in (0, 1)")
        return f.quantile(a)
    lo, hi = f.support
    if np.any((a < lo) | (a > hi)):
        raise OutOfSupport(f"{arg!r} outside the support [{lo}, {hi}] of {f.name}")
    if what not in ("pdf", "cdf", "ccdf"):
        raise ValueError(f"unknown evaluation {what!r}")
    out = getattr(f, what)(a)
    return float(out) if np.ndim(out) == 0 else out


def is_log_concave(f: NoiseFamily) -> bool:
    if isinstance(f, (Gaussian, Exponential, Uniform)):
        return True
    if isinstance(f, Gamma):
        return f.shape >= 1
    return False


def _quantile_levels(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / (n + 1)


def check_dispersive(f1: NoiseFamily, f2: NoiseFamily, quantile_grid: int = 199) -> Verdict:
    """Whether f1 is more dispersed than f2 on an equispaced grid of quantile levels."""
    levels = _quantile_levels(quantile_grid)
    q1, q2 = np.asarray(f1.quantile(levels)), np.asarray(f2.quantile(levels))
    gap = (q1[None, :] - q1[:, None]) - (q2[None, :] - q2[:, None])
    gap = np.triu(gap, k=1) + np.tril(np.full_like(gap, np.inf))
    i, j = np.unravel_index(np.argmin(gap), gap.shape)
    if gap[i, j] < -ORDER_TOL:
        return fails({"alpha": float(levels[i]), "beta": float(levels[j]), "spacing_gap": float(gap[i, j])}, grid=True)
    return holds(grid=True, min_gap=float(gap[i, j]))


def _common_grid(f1: NoiseFamily, f2: NoiseFamily, n: int, eps: float = 1e-6) -> np.ndarray:
    lo = min(float(f1.quantile(eps)), float(f2.quantile(eps)))
    hi = max(float(f1.quantile(1 - eps)), float(f2.quantile(1 - eps)))
    lo = max(lo, f1.support[0], f2.support[0])
    hi = min(hi, f1.support[1], f2.support[1])
    return np.linspace(lo, hi, n)


def check_hazard_rate(f1: NoiseFamily, f2: NoiseFamily, grid: int = 401) -> Verdict:
    """Whether ccdf2 / ccdf1 is nonincreasing (f1 dominates in hazard rate order)."""
    w = _common_grid(f1, f2, grid)
    c1, c2 = np.asarray(f1.ccdf(w)), np.asarray(f2.ccdf(w))
    keep = (c1 > 0) & (c2 > 0)
    w, ratio = w[keep], c2[keep] / c1[keep]
    steps = np.diff(ratio)
    if steps.size and steps.max() > ORDER_TOL:
        i = int(np.argmax(steps))
        return fails({"w": float(w[i]), "w_next": float(w[i + 1]), "increase": float(steps[i])}, grid=True)
    return holds(grid=True, points=int(w.size))


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    differential_entropy: float


def _entropy_quadrature(f: NoiseFamily) -> float:
    lo = f.support[0]
    hi = float(f.quantile(1 - 1e-12))

    def integrand(w):
        p = float(f.pdf(w))
        return -p * math.log(p) if p > 0 else 0.0

    # log-spaced breakpoints keep the heavy tail well resolved
    pts = np.unique(np.concatenate([[lo], lo + np.geomspace(1e-6, hi - lo, 40)]))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-11, limit=200)[0]
    return total


def moments(f: NoiseFamily) -> Moments:
    if isinstance(f, Gaussian):
        return Moments(0.0, f.sigma**2, 0.5 * math.log(2 * math.pi * math.e * f.sigma**2))
    if isinstance(f, Exponential):
        return Moments(1 / f.rate, 1 / f.rate**2, 1 - math.log(f.rate))
    if isinstance(f, Uniform):
        return Moments(0.0, f.width**2 / 12, math.log(f.width))
    if isinstance(f, Gamma):
        return Moments(f.shape, f.shape, _entropy_quadrature(f))
    if isinstance(f, PowerLaw):
        a = f.alpha
        mean = 1 / (a - 2) if a > 2 else math.inf
        var = (a - 1) / ((a - 2) ** 2 * (a - 3)) if a > 3 else math.inf
        return Moments(mean, var, _entropy_quadrature(f))
    raise TypeError(f"unsupported family {f!r}")


def check_theorem4_ratio(f_power: NoiseFamily, f_exp: NoiseFamily, grid=41) -> Verdict:
    """Check that ccdf_exp(ybar - x) / cdf_power(y - x) is nondecreasing in x.

    ``grid`` is a point count on [0, span] or an explicit array of points; x, y
    and ybar all range over it, restricted to y, ybar > x.
    """
    if not isinstance(f_power, PowerLaw) or not isinstance(f_exp, Exponential):
        raise WrongFamilies("expected (PowerLaw, Exponential)")
    if np.ndim(grid) == 0:
        span = max(10.0, float(f_exp.quantile(0.999)))
        pts = np.linspace(0.0, span, int(grid))
    else:
        pts = np.asarray(grid, dtype=float)
    n = pts.size
    worst = None
    for iy in range(n):
        for iyb in range(n):
            m = min(iy, iyb)
            if m < 2:
                continue
            x = pts[:m]
            r = np.asarray(f_exp.ccdf(pts[iyb] - x)) / np.asarray(f_power.cdf(pts[iy] - x))
            steps = np.diff(r)
            scale = np.maximum(1.0, np.abs(r[:-1]))
            bad = steps < -ORDER_TOL * scale
            if bad.any():
                k = int(np.argmax(bad))
                worst = {"y": float(pts[iy]), "ybar": float(pts[iyb]), "x": float(x[k]), "x_next": float(x[k + 1]),
                         "drop": float(steps[k])}
                return fails(worst, grid=True)
    return holds(grid=True, points=int(n))


@dataclass(frozen=True)
class Discretization:
    kernel: FiniteKernel
    edges: np.ndarray
    truncated: np.ndarray
    dropped_bins: tuple[int, ...] = ()


def discretize_to_kernel(f: NoiseFamily, states: StateLevels, obs_grid: tuple[float, float, int],
                         min_coverage: float = 1 - 1e-6) -> Discretization:
    """Bin Y = g_x + W onto ``count`` equal cells of [lo, hi].

    Bins that are empty for every state are dropped so the result is a valid
    kernel; their indices are reported.
    """
    lo, hi, count = obs_grid
    g = states.g if isinstance(states, StateLevels) else np.asarray(states, dtype=float)
    edges = np.linspace(lo, hi, int(count) + 1)
    cdf = np.asarray(f.cdf(edges[None, :] - g[:, None]))
    probs = np.clip(np.diff(cdf, axis=1), 0.0, None)
    mass = probs.sum(axis=1)
    for x, m in enumerate(mass):
        if m < min_coverage:
            raise InsufficientCoverage(x, float(m))
    probs = probs / mass[:, None]
    live = probs.max(axis=0) > 0
    dropped = tuple(int(j) for j in np.flatnonzero(~live))
    return Discretization(FiniteKernel(probs[:, live]), edges, 1.0 - mass, dropped)
