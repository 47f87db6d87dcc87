"""Decision procedures that classify a sensor pair.

Conventions: sensor 2 is the candidate "more accurate" sensor. Complementary
cdfs are F(y|x) = P(Y > y | x), so over a finite alphabet the top symbol has
an identically zero complementary cdf.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AdditiveKernel,
    FiniteKernel,
    GridDensityKernel,
    SensorPair,
    as_array,
    as_kernel,
    mlr_compare,
    Order,
    validate_stochastic,
)
from .errors import EnumerationCapExceeded, GridRequired, MixedSupport, ShapeMismatch
from .lp import two_phase_simplex
from .verdict import Verdict, fails, holds, not_applicable, skipped

SIGN_TOL = 1e-10
MINOR_TOL = 1e-12
FEASIBILITY_TOL = 1e-9
ENUMERATION_CAP = 10**7
DEFAULT_GRID_POINTS = 401
CAPACITY_FLOOR = 1e-3


@dataclass(frozen=True)
class SignVector:
    signs: np.ndarray
    tol: float


def sign_vector(v, tol: float = SIGN_TOL) -> SignVector:
    v = np.asarray(v, dtype=float)
    s = np.where(np.abs(v) <= tol, 0, np.sign(v)).astype(int)
    return SignVector(s, tol)


def _sc_violations(s: np.ndarray) -> np.ndarray:
    """Mask of entries equal to -1 preceded (along the last axis) by a +1."""
    pos = s == 1
    seen = np.maximum.accumulate(pos, axis=-1)
    before = np.zeros_like(seen)
    before[..., 1:] = seen[..., :-1]
    return (s == -1) & before


def is_single_crossing(v, tol: float = SIGN_TOL) -> bool:
    """True when the nonzero signs of ``v`` never go from + back to -.

    Zeros are ignored, so (-, 0, -, +) and (+, 0, +) both count.
    """
    return not bool(_sc_violations(sign_vector(v, tol).signs).any())


def _crossing_witness(s: np.ndarray) -> tuple[int, int]:
    bad = int(np.flatnonzero(_sc_violations(s))[0])
    first_pos = int(np.flatnonzero(s[:bad] == 1)[0])
    return first_pos, bad


# --- evaluation tables ------------------------------------------------------


def _noise_spread(noise) -> float:
    from .densities import moments

    var = moments(noise).variance
    if math.isfinite(var):
        return 6.0 * math.sqrt(var)
    return float(noise.quantile(1 - 1e-6))


def observation_grid(pair: SensorPair, points: int = DEFAULT_GRID_POINTS) -> np.ndarray | None:
    """Default uniform grid for continuous sensors; None for finite pairs.

    Additive sensors span six noise standard deviations beyond the state
    levels (a far quantile stands in when the variance is infinite). Grid
    densities span their declared support.
    """
    if pair.finite:
        return None
    lo, hi = math.inf, -math.inf
    g = pair.levels.g
    for s in (pair.sensor1, pair.sensor2):
        if isinstance(s, AdditiveKernel):
            spread = _noise_spread(s.noise)
            lo = min(lo, g[0] - spread)
            hi = max(hi, g[-1] + spread)
        elif isinstance(s, GridDensityKernel):
            lo, hi = min(lo, s.a), max(hi, s.b)
    return np.linspace(lo, hi, points)


def _ccdf_table(k, grid) -> np.ndarray:
    if isinstance(k, FiniteKernel):
        return k.ccdf_table()
    if grid is None:
        raise GridRequired("continuous sensors need an observation grid")
    grid = np.asarray(grid, dtype=float)
    if isinstance(k, AdditiveKernel):
        return np.asarray(k.noise.ccdf(grid[None, :] - k.levels.g[:, None]), dtype=float)
    cum = np.array([np.interp(grid, k.grid, row, left=0.0, right=1.0) for row in k._cum])
    return 1.0 - cum


def _likelihood_table(k, grid) -> np.ndarray:
    if isinstance(k, FiniteKernel):
        return k.matrix
    if grid is None:
        raise GridRequired("continuous sensors need an observation grid")
    grid = np.asarray(grid, dtype=float)
    if isinstance(k, AdditiveKernel):
        return np.asarray(k.noise.pdf(grid[None, :] - k.levels.g[:, None]), dtype=float)
    return np.array([np.interp(grid, k.grid, row, left=0.0, right=0.0) for row in k.values])


def _tables(pair: SensorPair, grid):
    if grid is None and not pair.finite:
        grid = observation_grid(pair)
    return _ccdf_table(pair.sensor1, grid), _ccdf_table(pair.sensor2, grid), not pair.finite


# --- (A1) -------------------------------------------------------------------


def check_tp2(k, grid=None, tol: float = MINOR_TOL) -> Verdict:
    """All 2x2 minors B[i,y]B[i',y'] - B[i,y']B[i',y] with i<i', y<y' are >= -tol."""
    k = as_kernel(k)
    B = _likelihood_table(k, grid)
    n = B.shape[0]
    on_grid = not isinstance(k, FiniteKernel)
    worst = None
    for i in range(n - 1):
        for i2 in range(i + 1, n):
            d = np.outer(B[i], B[i2]) - np.outer(B[i2], B[i])
            d = np.triu(d, k=1)
            bad = np.argwhere(d < -tol)
            if bad.size:
                y, y2 = (int(v) for v in bad[0])
                worst = {"i": i, "i2": i2, "y": y, "y2": y2, "minor": float(d[y, y2])}
                return fails(worst, grid=on_grid)
    return holds(grid=on_grid)


def tp2_by_rows(k, tol: float = MINOR_TOL) -> bool:
    """Consecutive rows MLR ordered; equivalent to TP2 for kernels without zero-row gaps."""
    B = as_array(k)
    return all(mlr_compare(B[i + 1], B[i], tol) in (Order.GE, Order.EQ) for i in range(B.shape[0] - 1))


# --- (A2) -------------------------------------------------------------------


def check_single_crossing_a2(pair: SensorPair, grid=None, tol: float = SIGN_TOL) -> Verdict:
    """x -> F1(ybar|x) - F2(y|x) single crossing for every ybar, y."""
    C1, C2, on_grid = _tables(pair, grid)
    # F1 - F2 = C2 - C1; axes (ybar, y, x)
    D = C2.T[None, :, :] - C1.T[:, None, :]
    s = sign_vector(D, tol).signs
    viol = _sc_violations(s)
    if viol.any():
        yb, y, xb = (int(v) for v in np.argwhere(viol)[0])
        x = int(np.flatnonzero(s[yb, y, :xb] == 1)[0])
        return fails({"ybar": yb, "y": y, "x": x, "xbar": xb,
                      "difference": D[yb, y].tolist()}, grid=on_grid)
    return holds(grid=on_grid)


# --- (A3) -------------------------------------------------------------------


def _support_kind(k) -> str:
    if isinstance(k, FiniteKernel):
        return "finite"
    if isinstance(k, GridDensityKernel):
        return "bounded"
    lo, hi = k.noise.support
    if math.isinf(lo) and math.isinf(hi):
        return "real"
    return "half" if math.isinf(hi) else "bounded"


def _boundary_values(k, levels):
    """Likelihoods at the lowest and highest observation, per state."""
    if isinstance(k, FiniteKernel):
        return k.matrix[:, 0], k.matrix[:, -1]
    if isinstance(k, GridDensityKernel):
        return k.values[:, 0], k.values[:, -1]
    lo, hi = k.noise.support
    g = levels.g
    low = np.asarray(k.noise.pdf(g[0] + lo - g), dtype=float)
    if math.isinf(hi):
        high = np.zeros_like(g)
    else:
        high = np.asarray(k.noise.pdf(g[-1] + hi - g), dtype=float)
    return low, high


def check_boundary_a3(pair: SensorPair, tol: float = MINOR_TOL) -> Verdict:
    k1, k2 = pair.sensor1, pair.sensor2
    kinds = {_support_kind(k1), _support_kind(k2)}
    if kinds == {"real"}:
        return not_applicable("both observation spaces are the whole real line")
    if "real" in kinds or ("finite" in kinds and len(kinds) > 1):
        err = MixedSupport(f"supports {sorted(kinds)} cannot be compared at the boundary")
        return not_applicable(str(err))
    lo1, hi1 = _boundary_values(k1, pair.levels)
    lo2, hi2 = _boundary_values(k2, pair.levels)
    n = pair.n_states
    for x in range(n):
        for xb in range(x, n):
            low = lo1[x] * lo2[xb] - lo2[x] * lo1[xb]
            if low > tol:
                return fails({"edge": "lowest", "x": x, "xbar": xb, "gap": float(low)})
            high = hi1[x] * hi2[xb] - hi2[x] * hi1[xb]
            if high < -tol:
                return fails({"edge": "highest", "x": x, "xbar": xb, "gap": float(high)})
    note = "upper boundary at infinity holds vacuously" if "half" in kinds else ""
    return holds(note=note)


# --- (A4) -------------------------------------------------------------------


def _log_family(C1, C2):
    """Log-differences h[y, ybar](x) = log C2[x, y] - log C1[x, ybar].

    Columns containing a zero complementary cdf are excluded; the top symbol
    of a finite alphabet is always among them.
    """
    ok1 = np.all(C1 > 0, axis=0)
    ok2 = np.all(C2 > 0, axis=0)
    cols1, cols2 = np.flatnonzero(ok1), np.flatnonzero(ok2)
    excluded = []
    for sensor, C, ok in ((1, C1, ok1), (2, C2, ok2)):
        for y in np.flatnonzero(~ok):
            x = int(np.flatnonzero(C[:, y] <= 0)[0])
            excluded.append({"sensor": sensor, "y": int(y), "x": x,
                             "structural": bool(np.all(C[:, y] <= 0))})
    labels = [(int(y), int(yb)) for y in cols2 for yb in cols1]
    if not labels:
        return np.zeros((0, C1.shape[0])), labels, excluded
    H = np.log(C2[:, cols2]).T[:, None, :] - np.log(C1[:, cols1]).T[None, :, :]
    return H.reshape(-1, C1.shape[0]), labels, excluded


def check_signed_ratio_a4(pair: SensorPair, grid=None, tol: float = SIGN_TOL,
                          cap: int = ENUMERATION_CAP) -> Verdict:
    """Signed-ratio monotonicity of the log complementary-cdf differences.

    Every h = log F2(y|.) - log F1(ybar|.) must be single crossing, and for
    any two of them f, g and every x < xbar with f(x) < 0 < g(x),
    -f(x)/g(x) >= -f(xbar)/g(xbar) (in cross-multiplied form).
    """
    C1, C2, on_grid = _tables(pair, grid)
    H, labels, excluded = _log_family(C1, C2)
    n_fun, n = H.shape
    if n_fun * n_fun > cap:
        raise EnumerationCapExceeded(n_fun * n_fun, cap)
    info = {"functions": n_fun,
            "log_exclusions": [e for e in excluded if not e["structural"]],
            "structural_exclusions": [e for e in excluded if e["structural"]]}
    note = "quadruples touching a zero complementary cdf are excluded"

    s = sign_vector(H, tol).signs
    viol = _sc_violations(s)
    if viol.any():
        f, xb = (int(v) for v in np.argwhere(viol)[0])
        x = int(np.flatnonzero(s[f, :xb] == 1)[0])
        y, yb = labels[f]
        return fails({"kind": "not_single_crossing", "y": y, "ybar": yb, "x": x, "xbar": xb},
                     note=note, grid=on_grid, **info)

    best = None
    for x in range(n - 1):
        neg = H[:, x] < -tol
        pos = H[:, x] > tol
        if not neg.any() or not pos.any():
            continue
        for xb in range(x + 1, n):
            # f(xbar) g(x) - f(x) g(xbar) >= 0 for f(x) < 0 < g(x)
            cross = np.outer(H[:, xb], H[:, x]) - np.outer(H[:, x], H[:, xb])
            bad = neg[:, None] & pos[None, :] & (cross < -MINOR_TOL)
            if bad.any():
                f, g = (int(v) for v in np.argwhere(bad)[0])
                key = (f, g, x, xb)
                if best is None or key < best:
                    best = key
    if best is not None:
        f, g, x, xb = best
        (y, yb), (z, zb) = labels[f], labels[g]
        ratio_x = -H[f, x] / H[g, x]
        ratio_xb = -H[f, xb] / H[g, xb] if H[g, xb] != 0 else math.copysign(math.inf, -H[f, xb])
        return fails({"kind": "ratio", "y": y, "ybar": yb, "z": z, "zbar": zb, "x": x, "xbar": xb,
                      "ratio_x": float(ratio_x), "ratio_xbar": float(ratio_xb)},
                     note=note, grid=on_grid, **info)
    return holds(note=note, grid=on_grid, **info)


# --- aggregated single crossing ----------------------------------------------


def _products(C, k):
    combos = list(itertools.combinations_with_replacement(range(C.shape[1]), k))
    idx = np.array(combos, dtype=int)
    return combos, np.prod(C[:, idx], axis=2).T


def check_aggregated_sc(pair: SensorPair, kmax: int, tol: float = SIGN_TOL,
                        cap: int = ENUMERATION_CAP) -> dict[int, Verdict]:
    """Brute-force single crossing of prod F2(y_l|x) - prod F1(ybar_l|x) for k = 1..kmax.

    Products commute, so multisets of symbols are enumerated; witnesses are
    the first failing pair in lexicographic order.
    """
    if not pair.finite:
        raise GridRequired("aggregated single crossing needs finite alphabets; discretize first")
    C1, C2 = pair.sensor1.ccdf_table(), pair.sensor2.ccdf_table()
    y1, y2 = C1.shape[1], C2.shape[1]
    out = {}
    for k in range(1, kmax + 1):
        count = (y1 * y2) ** k
        if count > cap:
            raise EnumerationCapExceeded(count, cap, k)
        combos2, P2 = _products(C2, k)
        combos1, P1 = _products(C1, k)
        found = None
        step = max(1, 2_000_000 // max(1, P1.size))
        for start in range(0, len(combos2), step):
            D = P2[start:start + step, None, :] - P1[None, :, :]
            s = sign_vector(D, tol).signs
            viol = _sc_violations(s)
            if viol.any():
                a, b, xb = (int(v) for v in np.argwhere(viol)[0])
                x = int(np.flatnonzero(s[a, b, :xb] == 1)[0])
                found = {"k": k, "y": list(combos2[start + a]), "ybar": list(combos1[b]),
                         "x": x, "xbar": xb, "difference": D[a, b].tolist()}
                break
        out[k] = fails(found) if found else holds(tuples=len(combos1) * len(combos2))
    return out


# --- Blackwell --------------------------------------------------------------


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: np.ndarray | None
    residual: float
    phase1_objective: float

    def to_dict(self) -> dict:
        out = {"feasible": self.feasible, "residual": self.residual,
               "phase1_objective": self.phase1_objective}
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
        return out


def _finite_matrices(pair: SensorPair):
    if not pair.finite:
        raise GridRequired("Blackwell factorization needs finite alphabets")
    return pair.sensor1.matrix, pair.sensor2.matrix


def _solve_factor(A, b, shape, check):
    res = two_phase_simplex(np.zeros(A.shape[1]), A, b)
    feasible = res.status == "optimal"
    if not feasible:
        return FeasibilityResult(False, None, math.nan, res.phase1_objective)
    W = np.clip(res.x.reshape(shape), 0.0, None)
    W = W / W.sum(axis=1, keepdims=True)
    return FeasibilityResult(True, W, float(np.abs(check(W)).max()), res.phase1_objective)


def check_blackwell_right(pair: SensorPair) -> FeasibilityResult:
    """Is B1 = B2 L for some row-stochastic L (Y2 x Y1)?"""
    B1, B2 = _finite_matrices(pair)
    X, Y1 = B1.shape
    Y2 = B2.shape[1]
    A = np.zeros((Y2 + X * Y1, Y2 * Y1))
    b = np.zeros(Y2 + X * Y1)
    for j in range(Y2):
        A[j, j * Y1:(j + 1) * Y1] = 1.0
        b[j] = 1.0
    for x in range(X):
        for c in range(Y1):
            A[Y2 + x * Y1 + c, c::Y1] = B2[x]
            b[Y2 + x * Y1 + c] = B1[x, c]
    return _solve_factor(A, b, (Y2, Y1), lambda L: B2 @ L - B1)


def check_blackwell_left(pair: SensorPair) -> FeasibilityResult:
    """Is B1 = M B2 for some row-stochastic M (X x X)?"""
    B1, B2 = _finite_matrices(pair)
    if B1.shape[1] != B2.shape[1]:
        raise ShapeMismatch(f"left factorization needs equal alphabets, got {B1.shape[1]} and {B2.shape[1]}")
    X, Y = B1.shape
    A = np.zeros((X + X * Y, X * X))
    b = np.zeros(X + X * Y)
    for i in range(X):
        A[i, i * X:(i + 1) * X] = 1.0
        b[i] = 1.0
        for y in range(Y):
            A[X + i * Y + y, i * X:(i + 1) * X] = B2[:, y]
            b[X + i * Y + y] = B1[i, y]
    return _solve_factor(A, b, (X, X), lambda M: M @ B2 - B1)


# --- capacity ---------------------------------------------------------------


def _divergences(W, q):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(W > 0, W * np.log2(W / q), 0.0)
    return terms.sum(axis=1)


def _mutual_information(W, r):
    d = _divergences(W, r @ W)
    return float(r @ d), d


def channel_capacity(k, rtol: float = 1e-9, max_iter: int = 1_000_000) -> float:
    """Blahut-Arimoto capacity in bits.

    The update r <- r 2^(mu d) uses an adaptive exponent: mu doubles after a
    step that shrinks the duality gap and falls back toward the plain
    iteration (mu = 1) otherwise. Nearly useless channels
    otherwise need millions of plain steps. Stops when the gap between the
    upper bound max_x D(W_x || q) and the current mutual information is
    within ``rtol`` of the capacity, or of CAPACITY_FLOOR bits if larger.
    """
    W = as_kernel(k).matrix
    r = np.full(W.shape[0], 1.0 / W.shape[0])
    lower, d = _mutual_information(W, r)
    mu = 1.0
    for _ in range(max_iter):
        upper = float(d.max())
        if upper - lower <= rtol * max(upper, CAPACITY_FLOOR):
            break
        while True:
            cand = r * np.exp2(mu * (d - upper))
            cand /= cand.sum()
            cand_lower, cand_d = _mutual_information(W, cand)
            # the duality gap is first order in the input error, so it stays
            # resolvable where the flat mutual information no longer is
            if cand_d.max() - cand_lower < upper - lower or mu == 1.0:
                break
            mu = max(1.0, mu / 4)
        r, lower, d = cand, cand_lower, cand_d
        mu *= 2
    return max(lower, 0.0)


# --- (A5) and (A6) ----------------------------------------------------------


def sequence_labels(n_obs: int, k: int) -> list[tuple[int, ...]]:
    """Observation sequences (y_1..y_k) in label order z = 1, 2, ...

    Sequences are ordered lexicographically with the most recent observation
    y_k as the most significant digit, matching the way the filtered
    posterior (proportional to L' pi) weighs recent data.
    """
    return [tuple(reversed(t)) for t in itertools.product(range(n_obs), repeat=k)]


def _sequence_matrices(P, B, k):
    """L(y_1..y_k) = P B_{y_1} P B_{y_2} ... P B_{y_k}, one per label."""
    out = []
    for seq in sequence_labels(B.shape[1], k):
        L = np.eye(P.shape[0])
        for y in seq:
            L = (L @ P) * B[:, y][None, :]
        out.append(L)
    return np.array(out)


def _sym_gap(La, Lb, i, j):
    S = np.outer(La[:, i], Lb[:, j]) - np.outer(La[:, j], Lb[:, i])
    return S + S.T


def check_global_filter_a5_a6(P, pair: SensorPair, k: int, tol: float = MINOR_TOL,
                              cap: int = ENUMERATION_CAP) -> tuple[Verdict, Verdict]:
    B1, B2 = _finite_matrices(pair)
    P = validate_stochastic(P).values
    if P.shape != (pair.n_states, pair.n_states):
        raise ShapeMismatch("transition matrix does not match the state count")
    for B in (B1, B2):
        if B.shape[1] ** k > cap:
            raise EnumerationCapExceeded(B.shape[1] ** k, cap, k)
    L1, L2 = _sequence_matrices(P, B1, k), _sequence_matrices(P, B2, k)
    X = pair.n_states
    pairs = [(i, j) for i in range(X) for j in range(i + 1, X)]

    a5 = None
    for u, L in ((1, L1), (2, L2)):
        for z in range(len(L)):
            for zb in range(z + 1, len(L)):
                for i, j in pairs:
                    H = _sym_gap(L[z], L[zb], i, j)
                    if H.min() < -tol:
                        labels = sequence_labels((B1 if u == 1 else B2).shape[1], k)
                        a5 = fails({"sensor": u, "z": z + 1, "zbar": zb + 1, "sequence": list(labels[z]),
                                    "sequence_bar": list(labels[zb]), "i": i, "j": j,
                                    "min_entry": float(H.min())})
                        break
                if a5:
                    break
            if a5:
                break
        if a5:
            break
    if a5 is None:
        a5 = holds(k=k)

    if B1.shape[1] != B2.shape[1]:
        return a5, not_applicable("sensors have different alphabets, so z labels differ")
    Z = len(L1)
    nonpos = np.ones(Z, dtype=bool)
    nonneg = np.ones(Z, dtype=bool)
    for z in range(Z):
        for i, j in pairs:
            H = _sym_gap(L1[z], L2[z], i, j)
            nonpos[z] &= H.max() <= tol
            nonneg[z] &= H.min() >= -tol
    for zstar in range(Z):
        if nonpos[:zstar].all() and nonneg[zstar:].all():
            return a5, holds(k=k, zstar=zstar + 1)
    mixed = np.flatnonzero(~nonpos & ~nonneg)
    if mixed.size:
        z = int(mixed[0])
    else:
        # a nonpositive-only label after a nonnegative-only one
        first_pos = int(np.flatnonzero(~nonpos)[0])
        z = int(first_pos + np.flatnonzero(~nonneg[first_pos:])[0])
    labels = sequence_labels(B1.shape[1], k)
    return a5, fails({"z": z + 1, "sequence": list(labels[z]),
                      "nonpositive": nonpos.tolist(), "nonnegative": nonneg.tolist()})


# --- report -----------------------------------------------------------------


@dataclass
class DominanceReport:
    a1_tp2: Verdict
    a2_single_crossing: Verdict
    a3_boundary: Verdict
    a4_signed_ratio: Verdict
    eq10_aggregated: dict[int, Verdict]
    blackwell_right: FeasibilityResult | Verdict
    blackwell_left: FeasibilityResult | Verdict
    capacity1: float | None
    capacity2: float | None
    a5: Verdict
    a6: Verdict
    extra: dict = field(default_factory=dict)

    def assumption_verdicts(self) -> dict[str, Verdict]:
        out = {"a1_tp2": self.a1_tp2, "a2_single_crossing": self.a2_single_crossing,
               "a3_boundary": self.a3_boundary, "a4_signed_ratio": self.a4_signed_ratio}
        for k, v in self.eq10_aggregated.items():
            out[f"eq10_k{k}"] = v
        out["a5"] = self.a5
        out["a6"] = self.a6
        return out

    @property
    def all_hold(self) -> bool:
        """No applicable check failed. Blackwell and capacity are informational."""
        return not any(v.fails for v in self.assumption_verdicts().values())

    def to_dict(self) -> dict:
        def conv(v):
            return v.to_dict() if hasattr(v, "to_dict") else v

        out = {name: conv(v) for name, v in self.assumption_verdicts().items()}
        out["blackwell_right"] = conv(self.blackwell_right)
        out["blackwell_left"] = conv(self.blackwell_left)
        out["capacity1_bits"] = self.capacity1
        out["capacity2_bits"] = self.capacity2
        out.update(self.extra)
        return out


def _combine_tp2(v1: Verdict, v2: Verdict) -> Verdict:
    for u, v in ((1, v1), (2, v2)):
        if v.fails:
            return fails({"sensor": u, **v.witness}, grid=v.grid)
    return holds(grid=v1.grid or v2.grid)


def dominance_report(pair: SensorPair, kmax: int = 3, transition=None, global_k: int = 2,
                     grid=None, cap: int = ENUMERATION_CAP, tol: float | None = None) -> DominanceReport:
    """Run every applicable check on ``pair``.

    A5/A6 are evaluated for k = 1..global_k when a transition matrix other
    than the identity is supplied; Blackwell and capacity only for finite pairs.
    ``tol`` overrides both the sign band and the minor tolerance.
    """
    sign_tol = SIGN_TOL if tol is None else tol
    minor_tol = MINOR_TOL if tol is None else tol
    if grid is None and not pair.finite:
        grid = observation_grid(pair)
    a1 = _combine_tp2(check_tp2(pair.sensor1, grid, minor_tol), check_tp2(pair.sensor2, grid, minor_tol))
    a2 = check_single_crossing_a2(pair, grid, sign_tol)
    a3 = check_boundary_a3(pair, minor_tol)
    try:
        a4 = check_signed_ratio_a4(pair, grid, sign_tol, cap=cap)
    except EnumerationCapExceeded as err:
        a4 = skipped(str(err))
    if pair.finite:
        eq10 = check_aggregated_sc(pair, kmax, sign_tol, cap=cap)
        right = check_blackwell_right(pair)
        try:
            left = check_blackwell_left(pair)
        except ShapeMismatch as err:
            left = not_applicable(str(err))
        cap1, cap2 = channel_capacity(pair.sensor1), channel_capacity(pair.sensor2)
    else:
        eq10 = {}
        right = left = not_applicable("continuous sensors")
        cap1 = cap2 = None

    identity = transition is None or np.allclose(as_array(transition), np.eye(pair.n_states))
    if identity or not pair.finite:
        a5 = a6 = not_applicable("no transition matrix other than the identity was given")
    else:
        a5, a6 = _global_checks(transition, pair, global_k, cap, minor_tol)
    return DominanceReport(a1, a2, a3, a4, eq10, right, left, cap1, cap2, a5, a6)


def _global_checks(P, pair, global_k, cap, tol=MINOR_TOL):
    per_k = {}
    for k in range(1, global_k + 1):
        per_k[k] = check_global_filter_a5_a6(P, pair, k, tol, cap=cap)
    out = []
    for idx in range(2):
        failed = [(k, v[idx]) for k, v in per_k.items() if v[idx].fails]
        if failed:
            k, v = failed[0]
            out.append(fails({"k": k, **v.witness}))
        elif all(v[idx].status.value == "NotApplicable" for v in per_k.values()):
            out.append(per_k[1][idx])
        else:
            out.append(holds(per_k={k: v[idx].details for k, v in per_k.items()}))
    return tuple(out)
