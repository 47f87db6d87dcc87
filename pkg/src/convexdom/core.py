"""Domain types and elementary stochastic-order comparisons.

States and observation symbols are indexed from 0 throughout the Python API.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    InvalidBelief,
    LengthMismatch,
    NegativeEntry,
    OutOfSupport,
    RowSumViolation,
    ShapeMismatch,
)

SIMPLEX_TOL = 1e-12
TIE_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


class Order(enum.Enum):
    GE = "GE"
    LE = "LE"
    EQ = "EQ"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True, eq=False)
class Belief:
    """A point of the probability simplex."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size == 0:
            raise InvalidBelief("belief must be a non-empty vector")
        if np.any(w < 0):
            raise InvalidBelief(f"negative weight {w.min()!r}")
        if abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise InvalidBelief(f"weights sum to {w.sum()!r}")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    @classmethod
    def normalized(cls, v) -> "Belief":
        v = np.asarray(v, dtype=float)
        return cls(v / v.sum())

    @classmethod
    def uniform(cls, n: int) -> "Belief":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic matrix; build through :func:`validate_stochastic`."""

    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def validate_stochastic(m, tol: float = SIMPLEX_TOL) -> StochasticMatrix:
    """Check nonnegativity and unit row sums; return the validated matrix."""
    arr = np.array(m, dtype=float)
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a rectangular matrix, got shape {arr.shape}")
    neg = np.argwhere(arr < 0)
    if neg.size:
        i, j = (int(v) for v in neg[0])
        raise NegativeEntry(i, j, float(arr[i, j]))
    sums = arr.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > tol:
            raise RowSumViolation(i, float(s))
    return StochasticMatrix(_frozen(arr))


def as_array(m) -> np.ndarray:
    if isinstance(m, (StochasticMatrix, Belief)):
        return np.asarray(m)
    if isinstance(m, FiniteKernel):
        return m.matrix
    return np.asarray(m, dtype=float)


@dataclass(frozen=True, eq=False)
class StateLevels:
    """Strictly increasing physical levels attached to the states."""

    g: np.ndarray

    def __post_init__(self):
        g = _frozen(self.g)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("state levels must be a non-empty vector")
        if np.any(np.diff(g) <= 0):
            raise ValueError(f"state levels must be strictly increasing, got {g.tolist()}")
        object.__setattr__(self, "g", g)

    def __len__(self):
        return self.g.size

    @classmethod
    def indices(cls, n: int) -> "StateLevels":
        return cls(np.arange(n, dtype=float))


# --- sensor kernels ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    """Observation matrix over the finite alphabet {0, ..., Y-1}."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrix)
        mat = validate_stochastic(arr).values
        dead = np.flatnonzero(mat.max(axis=0) <= 0)
        if dead.size:
            raise ValueError(f"observation {int(dead[0])} has zero likelihood in every state")
        object.__setattr__(self, "matrix", mat)

    @property
    def n_states(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_obs(self) -> int:
        return self.matrix.shape[1]

    def cdf_table(self) -> np.ndarray:
        """F(y|x) = P(Y <= y | x), shape (X, Y)."""
        c = np.cumsum(self.matrix, axis=1)
        c[:, -1] = 1.0
        return c

    def ccdf_table(self) -> np.ndarray:
        """Complementary cdf P(Y > y | x); the last column is identically 0."""
        return np.clip(1.0 - self.cdf_table(), 0.0, 1.0)

    def likelihood(self, y) -> np.ndarray:
        y = int(y)
        if not 0 <= y < self.n_obs:
            raise OutOfSupport(f"observation {y} outside alphabet of size {self.n_obs}")
        return self.matrix[:, y]


@dataclass(frozen=True, eq=False)
class AdditiveKernel:
    """Y = g_x + W with W drawn from a noise family (see :mod:`convexdom.densities`)."""

    noise: object
    levels: StateLevels

    @property
    def n_states(self) -> int:
        return len(self.levels)

    def likelihood(self, y) -> np.ndarray:
        return np.asarray(self.noise.pdf(float(y) - self.levels.g), dtype=float)

    def cdf(self, x: int, y: float) -> float:
        return float(self.noise.cdf(float(y) - self.levels.g[x]))


@dataclass(frozen=True, eq=False)
class GridDensityKernel:
    """Per-state observation densities sampled on a uniform grid over [a, b]."""

    a: float
    b: float
    values: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] < 2:
            raise ShapeMismatch("grid density needs shape (X, n>=2)")
        if np.any(vals < 0):
            raise ValueError("densities must be nonnegative")
        if not self.b > self.a:
            raise ValueError("support must satisfy a < b")
        h = (self.b - self.a) / (vals.shape[1] - 1)
        cum = np.concatenate(
            [np.zeros((vals.shape[0], 1)), np.cumsum(0.5 * h * (vals[:, 1:] + vals[:, :-1]), axis=1)],
            axis=1,
        )
        mass = cum[:, -1:]
        if np.any(mass <= 0):
            raise ValueError("every state needs positive mass")
        vals = vals / mass
        cum = cum / mass
        vals.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_cum", cum)

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.values.shape[1])

    def likelihood(self, y) -> np.ndarray:
        y = float(y)
        if not self.a <= y <= self.b:
            raise OutOfSupport(f"observation {y} outside [{self.a}, {self.b}]")
        return np.array([np.interp(y, self.grid, row) for row in self.values])

    def cdf(self, x: int, y: float) -> float:
        if not self.a <= y <= self.b:
            raise OutOfSupport(f"observation {y} outside [{self.a}, {self.b}]")
        return float(np.interp(y, self.grid, self._cum[x]))


SensorKernel = Union[FiniteKernel, AdditiveKernel, GridDensityKernel]


def as_kernel(k) -> SensorKernel:
    if isinstance(k, (FiniteKernel, AdditiveKernel, GridDensityKernel)):
        return k
    return FiniteKernel(as_array(k))


@dataclass(frozen=True, eq=False)
class SensorPair:
    """Two sensors observing the same state space."""

    sensor1: SensorKernel
    sensor2: SensorKernel
    levels: StateLevels | None = None

    def __post_init__(self):
        s1, s2 = as_kernel(self.sensor1), as_kernel(self.sensor2)
        if s1.n_states != s2.n_states:
            raise ShapeMismatch(f"sensors have {s1.n_states} and {s2.n_states} states")
        levels = self.levels if self.levels is not None else StateLevels.indices(s1.n_states)
        if not isinstance(levels, StateLevels):
            levels = StateLevels(levels)
        if len(levels) != s1.n_states:
            raise ShapeMismatch("state levels do not match the number of states")
        object.__setattr__(self, "sensor1", s1)
        object.__setattr__(self, "sensor2", s2)
        object.__setattr__(self, "levels", levels)

    @property
    def n_states(self) -> int:
        return self.sensor1.n_states

    @property
    def finite(self) -> bool:
        return isinstance(self.sensor1, FiniteKernel) and isinstance(self.sensor2, FiniteKernel)

    def swapped(self) -> "SensorPair":
        return SensorPair(self.sensor2, self.sensor1, self.levels)


# --- order comparisons ------------------------------------------------------


def _pair(p, q):
    p, q = as_array(p).ravel(), as_array(q).ravel()
    if p.size != q.size:
        raise LengthMismatch(f"lengths {p.size} and {q.size} differ")
    return p, q


def _combine(ge: bool, le: bool) -> Order:
    if ge and le:
        return Order.EQ
    if ge:
        return Order.GE
    if le:
        return Order.LE
    return Order.INCOMPARABLE


def _mlr_ge(p, q, tol):
    # p(x) q(x') <= q(x) p(x') for every x < x'
    d = np.outer(p, q) - np.outer(q, p)
    return bool(np.all(np.triu(d, k=1) <= tol))


def mlr_compare(p, q, tol: float = TIE_TOL) -> Order:
    """Monotone likelihood ratio comparison of ``p`` against ``q``."""
    p, q = _pair(p, q)
    return _combine(_mlr_ge(p, q, tol), _mlr_ge(q, p, tol))


def first_order_compare(p, q, tol: float = TIE_TOL) -> Order:
    """First-order stochastic dominance; GE when ``p`` puts more mass on high states."""
    p, q = _pair(p, q)
    cp, cq = np.cumsum(p), np.cumsum(q)
    return _combine(bool(np.all(cp <= cq + tol)), bool(np.all(cq <= cp + tol)))


def cdf_from_kernel(k, x: int, y) -> float:
    """Conditional cdf F(y|x). The complementary cdf is ``1 - cdf_from_kernel(...)``."""
    k = as_kernel(k)
    if not 0 <= x < k.n_states:
        raise OutOfSupport(f"state {x} out of range")
    if isinstance(k, FiniteKernel):
        if not float(y).is_integer() or not 0 <= int(y) < k.n_obs:
            raise OutOfSupport(f"observation {y} outside alphabet of size {k.n_obs}")
        return float(k.cdf_table()[x, int(y)])
    return k.cdf(x, y)
