"""Dense two-phase simplex with Bland's rule.

Internal to :mod:`convexdom.orders`; the problems solved here have at most a
few hundred variables, so a plain tableau is adequate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    phase1_objective: float
    objective: float | None
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run(T: np.ndarray, basis: list[int], allowed: int, max_iter: int) -> tuple[str, int]:
    """Minimize the objective held in the last row of ``T``.

    The last row stores reduced costs; its final entry is minus the objective.
    Only the first ``allowed`` columns may enter the basis.
    """
    m = T.shape[0] - 1
    for it in range(max_iter):
        costs = T[-1, :allowed]
        entering = np.flatnonzero(costs < -PIVOT_TOL)
        if entering.size == 0:
            return "optimal", it
        col = int(entering[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return "unbounded", it
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
    raise RuntimeError(f"simplex did not terminate in {max_iter} iterations")


def two_phase_simplex(c, A_eq, b_eq, max_iter: int = 50_000) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_eq @ x = b_eq`` and ``x >= 0``."""
    A = np.array(A_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    # phase 1: one artificial per row, minimize their sum
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    _, it1 = _run(T, basis, n + m, max_iter)
    phase1 = max(0.0, -float(T[-1, -1]))
    if phase1 > 1e-9:
        x = np.zeros(n)
        for r, j in enumerate(basis):
            if j < n:
                x[j] = T[r, -1]
        return LPResult("infeasible", x, phase1, None, it1)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
            if cand.size:
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]

    # phase 2
    T[-1, :n] = c
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status, it2 = _run(T, basis, n, max_iter)
    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    obj = float(c @ x) if status == "optimal" else None
    return LPResult(status, x, phase1, obj, it1 + it2)
