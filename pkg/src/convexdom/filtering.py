"""HMM filter, localization, conditional mean and a grid filter for continuous states."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import Belief, FiniteKernel, StateLevels, as_array, as_kernel
from .errors import CoverageWarning, OutOfSupport, ZeroNormalizer


@dataclass(frozen=True)
class FilterState:
    belief: Belief
    log_normalizer: float = 0.0


def _levels(g) -> np.ndarray:
    return g.g if isinstance(g, StateLevels) else np.asarray(g, dtype=float)


def predict(pi, P=None) -> np.ndarray:
    """P' pi; ``None`` stands for the identity."""
    pi = np.asarray(pi, dtype=float)
    return pi if P is None else as_array(P).T @ pi


def update_with_likelihood(pi, likelihood, P=None) -> tuple[Belief, float]:
    """T(pi, y) = diag(likelihood) P' pi / sigma for a precomputed likelihood column."""
    alpha = np.asarray(likelihood, dtype=float) * predict(pi, P)
    sigma = float(alpha.sum())
    if not sigma > 0:
        raise ZeroNormalizer()
    post = alpha / sigma
    # guard the simplex tolerance against rounding
    post = post / post.sum()
    return Belief(post), sigma


def filter_update(pi, y, P, k) -> tuple[Belief, float]:
    """One HMM filter step; returns the posterior and sigma = P(y | pi)."""
    return update_with_likelihood(pi, as_kernel(k).likelihood(y), P)


def filter_sequence(pi0, ys, P, k) -> FilterState:
    """Fold :func:`filter_update` over ``ys``; sigma is accumulated in log space."""
    belief = pi0 if isinstance(pi0, Belief) else Belief(pi0)
    k = as_kernel(k)
    log_norm = 0.0
    for t, y in enumerate(ys):
        try:
            belief, sigma = filter_update(belief, y, P, k)
        except ZeroNormalizer:
            raise ZeroNormalizer(f"observation {y!r} impossible at step {t}", step=t) from None
        log_norm += math.log(sigma)
    return FilterState(belief, log_norm)


def conditional_mean(fs, g) -> float:
    """g' pi for a FilterState, Belief or plain vector."""
    b = fs.belief if isinstance(fs, FilterState) else fs
    return float(_levels(g) @ np.asarray(b, dtype=float))


def two_timescale_likelihood(k, yvec) -> np.ndarray:
    """Likelihood of Delta conditionally independent observations of a frozen state."""
    k = as_kernel(k)
    yvec = list(yvec)
    if not yvec:
        raise OutOfSupport("need at least one observation")
    out = np.ones(k.n_states)
    for y in yvec:
        out = out * k.likelihood(y)
    return out


# --- continuous states ------------------------------------------------------


def trapezoid_weights(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


@dataclass(frozen=True, eq=False)
class GridDensity:
    grid: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if abs(self.weights @ self.values - 1.0) > 1e-8:
            raise ValueError("density does not integrate to one")

    @classmethod
    def from_values(cls, grid, values) -> "GridDensity":
        grid = np.asarray(grid, dtype=float)
        w = trapezoid_weights(grid)
        values = np.asarray(values, dtype=float)
        return cls(grid, w, values / (w @ values))

    @classmethod
    def uniform(cls, lo: float, hi: float, points: int = 2001) -> "GridDensity":
        grid = np.linspace(lo, hi, points)
        return cls.from_values(grid, np.ones(points))

    def mean(self) -> float:
        return float(self.weights @ (self.grid * self.values))

    def variance(self) -> float:
        m = self.mean()
        return float(self.weights @ ((self.grid - m) ** 2 * self.values))


def grid_filter_update(pi: GridDensity, y: float, f, transition=None) -> tuple[GridDensity, float]:
    """Bayes step Y = x + W on a state grid.

    ``transition`` is None for the identity or an (n, n) array K with
    K[j, i] = p(x_i | x_j) sampled as a density in x_i.
    """
    pred = pi.values
    if transition is not None:
        K = np.asarray(transition, dtype=float)
        pred = (pi.weights * pi.values) @ K
    unnorm = np.asarray(f.pdf(y - pi.grid), dtype=float) * pred
    sigma = float(pi.weights @ unnorm)
    if not sigma > 0:
        raise ZeroNormalizer(f"observation {y!r} has zero likelihood on the grid")
    post = GridDensity(pi.grid, pi.weights, unnorm / sigma)
    mass = post.weights * post.values
    window = np.convolve(mass, np.ones(3), mode="same")
    if window.max() > 1 - 1e-6:
        warnings.warn("posterior mass concentrates within 3 grid cells; refine the grid",
                      CoverageWarning, stacklevel=2)
    return post, sigma
