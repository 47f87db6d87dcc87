"""Two-state controlled sensing POMDP: value iteration on a belief grid.

The belief is parametrized by p = pi(2) (index 1) in [0, 1]. Actions are
0-based in the API; CSV output numbers them from 1.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import FiniteKernel, as_kernel, validate_stochastic
from .errors import NoConvergence, NotTwoState
from .verdict import Verdict, fails, holds

TIE_TOL = 1e-12
GAP_SLACK = 1e-7


@dataclass(frozen=True, eq=False)
class PomdpModel:
    P: np.ndarray
    kernels: tuple
    rewards: np.ndarray  # (U, 2)
    discount: float = 0.9
    horizon: int | None = None
    terminal_reward: np.ndarray | None = None

    def __post_init__(self):
        P = validate_stochastic(self.P).values
        if P.shape != (2, 2):
            raise NotTwoState(f"transition matrix has {P.shape[0]} states")
        kernels = tuple(as_kernel(k) for k in self.kernels)
        for k in kernels:
            if not isinstance(k, FiniteKernel):
                raise TypeError("POMDP kernels must be finite; discretize continuous sensors first")
            if k.n_states != 2:
                raise NotTwoState(f"kernel has {k.n_states} states")
        r = np.array(self.rewards, dtype=float)
        if r.shape != (len(kernels), 2):
            raise ValueError(f"rewards must have shape ({len(kernels)}, 2)")
        if not 0 <= self.discount < 1 and self.horizon is None:
            raise ValueError("infinite horizon needs discount in [0, 1)")
        rs = None if self.terminal_reward is None else np.array(self.terminal_reward, dtype=float)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "kernels", kernels)
        object.__setattr__(self, "rewards", r)
        object.__setattr__(self, "terminal_reward", rs)

    @property
    def n_actions(self) -> int:
        return len(self.kernels)


def _argmax_last(Q: np.ndarray, tol: float = TIE_TOL) -> np.ndarray:
    """Largest index attaining the row maximum within ``tol``."""
    best = Q.max(axis=1, keepdims=True)
    hit = Q >= best - tol
    return Q.shape[1] - 1 - np.argmax(hit[:, ::-1], axis=1)


@dataclass
class ValueGrid:
    grid: np.ndarray
    V: np.ndarray
    Q: np.ndarray
    policy: np.ndarray
    immediate: np.ndarray
    myopic: np.ndarray
    iterations: int
    sup_changes: list[float] = field(default_factory=list)

    def is_convex(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.diff(self.V, 2) >= -tol))

    def to_csv(self, path) -> None:
        U = self.Q.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p", "V", *[f"Q_{u + 1}" for u in range(U)], "mu_star", "mu_myopic"])
            for i, p in enumerate(self.grid):
                w.writerow([f"{p:.17g}", f"{self.V[i]:.17g}", *[f"{q:.17g}" for q in self.Q[i]],
                            int(self.policy[i]) + 1, int(self.myopic[i]) + 1])


def belief_grid(grid_size: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, grid_size)


def myopic_policy(m: PomdpModel, grid_size: int = 1001) -> np.ndarray:
    """argmax_u r_u' pi per grid point, ties toward the larger action."""
    p = belief_grid(grid_size)
    pis = np.column_stack([1 - p, p])
    return _argmax_last(pis @ m.rewards.T)


def _backup_terms(m: PomdpModel, pis: np.ndarray):
    """Per action: next-belief coordinates and observation probabilities."""
    pred = pis @ m.P
    out = []
    for k in m.kernels:
        alpha = pred[:, None, :] * k.matrix.T[None, :, :]  # (n, Y, 2)
        sigma = alpha.sum(axis=2)
        with np.errstate(invalid="ignore", divide="ignore"):
            nxt = np.where(sigma > 0, alpha[:, :, 1] / sigma, 0.0)
        out.append((nxt, sigma))
    return out


def value_iterate(m: PomdpModel, grid_size: int = 1001, tol: float = 1e-6,
                  max_iters: int = 100_000) -> ValueGrid:
    """Value iteration with linear interpolation of V between grid points.

    Infinite horizon stops once the sup-norm change is at most
    tol (1 - rho) / (2 rho). Finite horizon runs exactly N backups from the
    terminal reward.
    """
    if grid_size < 101:
        raise ValueError("grid_size must be at least 101")
    p = belief_grid(grid_size)
    pis = np.column_stack([1 - p, p])
    immediate = pis @ m.rewards.T
    terms = _backup_terms(m, pis)
    rho = m.discount

    def backup(V):
        Q = immediate.copy()
        if rho == 0:
            return Q
        for u, (nxt, sigma) in enumerate(terms):
            Q[:, u] += rho * np.sum(sigma * np.interp(nxt, p, V), axis=1)
        return Q

    changes = []
    if m.horizon is not None:
        rs = m.terminal_reward if m.terminal_reward is not None else np.zeros(2)
        V = pis @ rs
        Q = immediate.copy()
        for _ in range(m.horizon):
            Q = backup(V)
            Vn = Q.max(axis=1)
            changes.append(float(np.abs(Vn - V).max()))
            V = Vn
        iters = m.horizon
    else:
        V = np.zeros(grid_size)
        threshold = tol * (1 - rho) / (2 * rho) if rho > 0 else math.inf
        for iters in range(1, max_iters + 1):
            Q = backup(V)
            Vn = Q.max(axis=1)
            changes.append(float(np.abs(Vn - V).max()))
            V = Vn
            if changes[-1] <= threshold:
                break
        else:
            raise NoConvergence(max_iters)
    return ValueGrid(p, V, Q, _argmax_last(Q), immediate, _argmax_last(immediate), iters, changes)


def contraction_log(vg: ValueGrid, rho: float) -> list[dict]:
    """Per-iteration ratio of successive sup-norm changes; should stay near or below rho."""
    out = []
    c = vg.sup_changes
    for i in range(1, len(c)):
        ratio = c[i] / c[i - 1] if c[i - 1] > 0 else 0.0
        out.append({"iteration": i + 1, "sup_change": c[i], "ratio": ratio, "within": ratio <= rho + 1e-6})
    return out


@dataclass
class LowerBoundResult:
    verdict: Verdict
    violations: list[dict]
    flagged: list[dict]
    coincide: str

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.to_dict(), "violations": self.violations[:20],
                "n_violations": len(self.violations), "flagged": self.flagged[:20],
                "n_flagged": len(self.flagged), "coincide": self.coincide}


def verify_lower_bound(vg: ValueGrid, m: PomdpModel) -> LowerBoundResult:
    """mu*(p) >= myopic(p) everywhere, and Q(p,u+1) - Q(p,u) >= (r_{u+1} - r_u)' pi.

    Deficits smaller than 1e-7 are attributed to interpolation and flagged.
    """
    U = vg.Q.shape[1]
    violations, flagged = [], []
    if U > 1:
        gap = np.diff(vg.Q, axis=1) - np.diff(vg.immediate, axis=1)
        for i, u in np.argwhere(gap < 0):
            item = {"p": float(vg.grid[i]), "u": int(u), "deficit": float(-gap[i, u])}
            (flagged if -gap[i, u] < GAP_SLACK else violations).append(item)
        for i in np.flatnonzero(vg.policy < vg.myopic):
            item = {"p": float(vg.grid[i]), "mu_star": int(vg.policy[i]), "mu_myopic": int(vg.myopic[i])}
            deficit = vg.Q[i, vg.myopic[i]] - vg.Q[i].max()
            (flagged if -deficit < GAP_SLACK else violations).append(item)
    top = vg.myopic == U - 1
    agree = bool(np.all(vg.policy[top] == U - 1))
    coincide = "coincides (grid)" if agree else "does not coincide"
    if violations:
        return LowerBoundResult(fails(violations[0], grid=True), violations, flagged, coincide)
    return LowerBoundResult(holds(grid=True, flagged=len(flagged)), violations, flagged, coincide)


def q_gap_monotone(vg: ValueGrid) -> Verdict:
    """Q(p,u) - r_u' pi nondecreasing in u, up to 1e-7."""
    gap = vg.Q - vg.immediate
    d = np.diff(gap, axis=1)
    bad = np.argwhere(d < -GAP_SLACK)
    if bad.size:
        i, u = (int(v) for v in bad[0])
        return fails({"p": float(vg.grid[i]), "u": u, "shortfall": float(-d[i, u]),
                      "count": int(bad.shape[0])}, grid=True)
    return holds(grid=True)
