"""Dominance oracles: exact psi(lambda) enumeration and Monte-Carlo estimators.

psi(lambda) = E[m2 - lambda]^+ - E[m1 - lambda]^+, where m_u is the
conditional mean after k observations from sensor u. Increasing convex
dominance of m2 over m1 holds iff psi >= 0 for every lambda.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import AdditiveKernel, Belief, FiniteKernel, GridDensityKernel, SensorPair, StateLevels, as_array
from .errors import EnumerationCapExceeded, GridRequired, ZeroNormalizer

PSI_TOL = 1e-10
ENUMERATION_CAP = 10**7
CHUNK = 4096


def _levels(pair: SensorPair, g):
    if g is None:
        return pair.levels.g
    return g.g if isinstance(g, StateLevels) else np.asarray(g, dtype=float)


def _transition(P, n):
    return np.eye(n) if P is None else as_array(P)


# --- exact enumeration ------------------------------------------------------


@dataclass
class Outcomes:
    """All observation sequences of one sensor: conditional means and probabilities."""

    means: np.ndarray
    probs: np.ndarray
    second_moment_state: float


def enumerate_outcomes(k: FiniteKernel, P, pi0, steps: int, g, cap: int = ENUMERATION_CAP) -> Outcomes:
    B = k.matrix
    Y = B.shape[1]
    count = Y ** steps
    if count > cap:
        raise EnumerationCapExceeded(count, cap, steps)
    P = _transition(P, B.shape[0])
    alpha = np.asarray(pi0, dtype=float)[None, :]
    for _ in range(steps):
        pred = alpha @ P
        alpha = (pred[:, None, :] * B.T[None, :, :]).reshape(-1, B.shape[0])
    sigma = alpha.sum(axis=1)
    live = sigma > 0
    means = (alpha[live] @ g) / sigma[live]
    marginal = np.asarray(pi0, dtype=float) @ np.linalg.matrix_power(P, steps)
    return Outcomes(means, sigma[live], float(marginal @ (g * g)))


def expected_hinge(out: Outcomes, lambdas) -> np.ndarray:
    """E[m - lambda]^+ for every lambda, exact."""
    order = np.argsort(out.means, kind="stable")
    m, s = out.means[order], out.probs[order]
    # suffix sums of sigma and sigma*m
    suf_s = np.concatenate([np.cumsum(s[::-1])[::-1], [0.0]])
    suf_sm = np.concatenate([np.cumsum((s * m)[::-1])[::-1], [0.0]])
    idx = np.searchsorted(m, lambdas, side="right")
    return suf_sm[idx] - np.asarray(lambdas) * suf_s[idx]


@dataclass
class PsiCurve:
    lambdas: np.ndarray
    psi: np.ndarray
    min_value: float
    min_lambda: float
    k: int
    prior: np.ndarray
    breakpoints: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def holds(self) -> bool:
        return self.min_value >= -PSI_TOL

    def negative_region(self, tol: float = 1e-12) -> tuple[float, float] | None:
        """Outermost zero crossings around the points where psi < -tol.

        psi is piecewise linear between breakpoints, so crossings are located
        by linear interpolation between adjacent evaluation points.
        """
        neg = np.flatnonzero(self.psi < -tol)
        if neg.size == 0:
            return None
        lam, psi = self.lambdas, self.psi

        def crossing(a, b):
            if psi[a] == psi[b]:
                return float(lam[a])
            return float(lam[a] + (lam[b] - lam[a]) * psi[a] / (psi[a] - psi[b]))

        i, j = neg[0], neg[-1]
        lo = crossing(i - 1, i) if i > 0 else float(lam[i])
        hi = crossing(j, j + 1) if j + 1 < lam.size else float(lam[j])
        return lo, hi

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "psi"])
            for lam, v in zip(self.lambdas, self.psi):
                w.writerow([f"{lam:.17g}", f"{v:.17g}"])


def psi_exact(pair: SensorPair, P, pi0, k: int, lambda_points: int = 201, g=None,
              cap: int = ENUMERATION_CAP) -> PsiCurve:
    if not pair.finite:
        raise GridRequired("exact psi needs finite alphabets")
    g = _levels(pair, g)
    count = pair.sensor1.n_obs ** k + pair.sensor2.n_obs ** k
    if count > cap:
        raise EnumerationCapExceeded(count, cap, k)
    pi0 = np.asarray(pi0, dtype=float)
    o1 = enumerate_outcomes(pair.sensor1, P, pi0, k, g, cap)
    o2 = enumerate_outcomes(pair.sensor2, P, pi0, k, g, cap)
    breaks = np.unique(np.concatenate([o1.means, o2.means]))
    lambdas = np.unique(np.concatenate([np.linspace(g.min(), g.max(), lambda_points), breaks]))
    psi = expected_hinge(o2, lambdas) - expected_hinge(o1, lambdas)
    i = int(np.argmin(psi))
    return PsiCurve(lambdas, psi, float(psi[i]), float(lambdas[i]), k, pi0, breaks)


def mse_exact(k: FiniteKernel, P, pi0, steps: int, g) -> float:
    """E(g(X_k) - m)^2 = E g(X_k)^2 - E m^2, by full enumeration."""
    g = np.asarray(g, dtype=float)
    out = enumerate_outcomes(k, P, pi0, steps, g)
    return out.second_moment_state - float(out.probs @ (out.means ** 2))


def expectation_exact(k: FiniteKernel, P, pi0, steps: int, g, phi) -> float:
    out = enumerate_outcomes(k, P, pi0, steps, np.asarray(g, dtype=float))
    return float(out.probs @ phi(out.means))


def simplex_sweep(n: int) -> np.ndarray:
    """Prior sweep: step 0.01 on the segment for two states, resolution 1/10 otherwise."""
    if n == 2:
        p = np.linspace(0.0, 1.0, 101)
        return np.column_stack([1 - p, p])
    pts = []

    def rec(prefix, left, slots):
        if slots == 1:
            pts.append(prefix + [left])
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, slots - 1)

    rec([], 10, n)
    return np.array(pts, dtype=float) / 10.0


# --- Monte Carlo ------------------------------------------------------------


@dataclass
class MonteCarloEstimate:
    value: float
    standard_error: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return {"value": self.value, "standard_error": self.standard_error,
                "trials": self.trials, "seed": self.seed}


def _estimate(samples: np.ndarray, seed: int) -> MonteCarloEstimate:
    n = samples.size
    mean = float(np.sum(samples) / n)
    se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return MonteCarloEstimate(mean, se, n, seed)


def _draw(k, states: np.ndarray, rng: np.random.Generator):
    """Observations for a vector of states; one uniform per draw."""
    u = rng.random(states.size)
    if isinstance(k, FiniteKernel):
        cdf = k.cdf_table()[states]
        return (u[:, None] > cdf).sum(axis=1)
    if isinstance(k, AdditiveKernel):
        return k.levels.g[states] + np.asarray(k.noise.quantile(u), dtype=float)
    if isinstance(k, GridDensityKernel):
        return np.array([np.interp(v, k._cum[x], k.grid) for v, x in zip(u, states)])
    raise TypeError(f"cannot simulate {type(k).__name__}")


def _likelihoods(k, ys) -> np.ndarray:
    """Per-trajectory likelihood rows, shape (n, X)."""
    if isinstance(k, FiniteKernel):
        return k.matrix[:, ys].T
    if isinstance(k, AdditiveKernel):
        return np.asarray(k.noise.pdf(ys[:, None] - k.levels.g[None, :]), dtype=float)
    return np.array([k.likelihood(y) for y in ys])


def _chunk_means(pair: SensorPair, P, pi0, steps, g, seed, chunk, size):
    """Simulate ``size`` trajectories; return final conditional means and states.

    Each chunk owns an independent stream keyed by (seed, chunk), so results do
    not depend on how chunks are spread across workers.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    X = pi0.size
    cum_prior = np.cumsum(pi0)
    cum_P = np.cumsum(P, axis=1)
    x = np.minimum((rng.random(size)[:, None] > cum_prior[None, :]).sum(axis=1), X - 1)
    beliefs = [np.tile(pi0, (size, 1)), np.tile(pi0, (size, 1))]
    sensors = (pair.sensor1, pair.sensor2)
    for _ in range(steps):
        x = np.minimum((rng.random(size)[:, None] > cum_P[x]).sum(axis=1), X - 1)
        for u in range(2):
            ys = _draw(sensors[u], x, rng)
            alpha = _likelihoods(sensors[u], ys) * (beliefs[u] @ P)
            sigma = alpha.sum(axis=1, keepdims=True)
            if np.any(sigma <= 0):
                raise ZeroNormalizer("simulated observation has zero likelihood")
            beliefs[u] = alpha / sigma
    return beliefs[0] @ g, beliefs[1] @ g, g[x]


def simulate_means(pair: SensorPair, P, pi0, steps: int, trials: int, seed: int, g=None,
                   threads: int = 1):
    """Conditional means (m1, m2) and true levels g(X_k) for ``trials`` trajectories.

    Both sensors see the same state path (common random numbers).
    """
    g = _levels(pair, g)
    P = _transition(P, pair.n_states)
    pi0 = np.asarray(pi0, dtype=float)
    sizes = [min(CHUNK, trials - s) for s in range(0, trials, CHUNK)]

    def job(c):
        return _chunk_means(pair, P, pi0, steps, g, seed, c, sizes[c])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    else:
        parts = [job(c) for c in range(len(sizes))]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


@dataclass
class Comparison:
    sensor1: MonteCarloEstimate
    sensor2: MonteCarloEstimate
    difference: MonteCarloEstimate
    z: float
    verdict: str

    def to_dict(self) -> dict:
        return {"sensor1": self.sensor1.to_dict(), "sensor2": self.sensor2.to_dict(),
                "difference": self.difference.to_dict(), "z": self.z, "verdict": self.verdict}


def _compare(s1, s2, seed, larger: str, z_crit: float = 3.0) -> Comparison:
    """One-sided z-test on the paired difference; ``larger`` names the expected winner."""
    e1, e2 = _estimate(s1, seed), _estimate(s2, seed)
    d = _estimate(s2 - s1 if larger == "sensor2" else s1 - s2, seed)
    if d.standard_error == 0:
        z = 0.0 if d.value == 0 else math.copysign(math.inf, d.value)
    else:
        z = d.value / d.standard_error
    verdict = "holds (statistical)" if z >= z_crit else "not established (statistical)"
    return Comparison(e1, e2, d, float(z), verdict)


def default_battery(g) -> dict:
    lo, hi = float(np.min(g)), float(np.max(g))
    battery = {"m^2": lambda m: m * m, "exp(m)": np.exp}
    for c in np.linspace(lo, hi, 7)[1:-1]:
        battery[f"hinge({c:.4g})"] = lambda m, c=c: np.maximum(m - c, 0.0)
    mid = 0.5 * (lo + hi)
    battery[f"max(m,{mid:.4g})"] = lambda m, c=mid: np.maximum(m, c)
    return battery


def convex_dominance_empirical(pair: SensorPair, P, pi0, k: int, battery=None, trials: int = 100_000,
                               seed: int = 0, g=None, threads: int = 1) -> dict[str, Comparison]:
    """E phi(m2) >= E phi(m1) for each convex phi, by simulation."""
    g = _levels(pair, g)
    m1, m2, _ = simulate_means(pair, P, pi0, k, trials, seed, g, threads)
    battery = default_battery(g) if battery is None else battery
    return {name: _compare(phi(m1), phi(m2), seed, "sensor2") for name, phi in battery.items()}


@dataclass
class MseResult:
    comparison: Comparison
    identity_check: tuple[float, float]

    @property
    def mse1(self) -> MonteCarloEstimate:
        return self.comparison.sensor1

    @property
    def mse2(self) -> MonteCarloEstimate:
        return self.comparison.sensor2

    def to_dict(self) -> dict:
        out = self.comparison.to_dict()
        out["second_moment_gap"] = list(self.identity_check)
        return out


def mse_monte_carlo(pair: SensorPair, P, pi0, k: int, trials: int = 100_000, seed: int = 0,
                    g=None, threads: int = 1) -> MseResult:
    """MSE_u = E(g(X_k) - m_u)^2; the test asks whether MSE1 >= MSE2.

    Also reports E g^2 - E m_u^2 per sensor, which equals MSE_u in expectation.
    """
    g = _levels(pair, g)
    m1, m2, truth = simulate_means(pair, P, pi0, k, trials, seed, g, threads)
    cmp_ = _compare((truth - m1) ** 2, (truth - m2) ** 2, seed, "sensor1")
    t2 = float(np.sum(truth ** 2) / truth.size)
    gaps = (t2 - float(np.sum(m1 ** 2) / m1.size), t2 - float(np.sum(m2 ** 2) / m2.size))
    return MseResult(cmp_, gaps)
