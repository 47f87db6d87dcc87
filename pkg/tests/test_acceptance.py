"""Acceptance criteria 1-9, one PASS/FAIL line each.

Lines are printed in the terminal summary. Tolerances and time budgets are
the ones the criteria state; nothing here is loosened to make a line pass.
"""
import itertools
import time

import numpy as np
import pytest

from convexdom.cli import main
from convexdom.core import Order, SensorPair, mlr_compare
from convexdom.densities import (
    Gaussian,
    check_dispersive,
    check_hazard_rate,
    check_theorem4_ratio,
    is_log_concave,
    moments,
)
from convexdom.errors import ZeroNormalizer
from convexdom.filtering import GridDensity, conditional_mean, filter_update, grid_filter_update
from convexdom.fixtures import FIXTURES, get_fixture, noise_discretization
from convexdom.orders import (
    check_aggregated_sc,
    check_blackwell_left,
    check_blackwell_right,
    check_boundary_a3,
    check_global_filter_a5_a6,
    check_signed_ratio_a4,
    check_single_crossing_a2,
    check_tp2,
)
from convexdom.pomdp import PomdpModel, contraction_log, q_gap_monotone, value_iterate, verify_lower_bound
from convexdom.verify import mse_exact, mse_monte_carlo, psi_exact, simplex_sweep

from conftest import ACCEPTANCE_LINES

PSI_TOL = 1e-10


def report(n, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def a1_to_a4(pair):
    return {
        "A1": check_tp2(pair.sensor1).holds and check_tp2(pair.sensor2).holds,
        "A2": check_single_crossing_a2(pair).holds,
        "A3": check_boundary_a3(pair).holds,
        "A4": check_signed_ratio_a4(pair).holds,
    }


def failed(flags):
    return [k for k, v in flags.items() if not v]


def test_criterion_1_fixture_verdicts():
    problems = []
    for name in ("ex1", "ex2", "ex3"):
        t0 = time.perf_counter()
        pair = get_fixture(name).pair
        flags = a1_to_a4(pair)
        right = check_blackwell_right(pair)
        dt = time.perf_counter() - t0
        if failed(flags):
            problems.append(f"{name} fails {','.join(failed(flags))}")
        if not right.phase1_objective > 1e-6:
            problems.append(f"{name} right factorization feasible (phase-1 {right.phase1_objective:.2g})")
        if dt >= 1.0:
            problems.append(f"{name} took {dt:.2f}s")

    pair = get_fixture("capacity").pair
    flags = a1_to_a4(pair)
    left, right = check_blackwell_left(pair), check_blackwell_right(pair)
    if failed(flags):
        problems.append(f"capacity pair fails {','.join(failed(flags))}")
    if not (left.feasible and left.residual <= 1e-9):
        problems.append("capacity pair left factorization not found")
    if right.feasible:
        problems.append("capacity pair right factorization feasible")

    flags = a1_to_a4(get_fixture("wom").pair)
    if failed(flags):
        problems.append(f"wom fails {','.join(failed(flags))}")

    fx = get_fixture("global")
    for k in (1, 2):
        a5, a6 = check_global_filter_a5_a6(fx.transition, fx.pair, k)
        if not (a5.holds and a6.holds):
            problems.append(f"A5/A6 fail at k={k}")
    report(1, not problems, "; ".join(problems) or "all fixture verdicts as stated")


def test_criterion_2_psi_counterexamples():
    out = []
    ok = True
    for name, target in (("appendix1", None), ("appendix2", (0.25, 0.93))):
        t0 = time.perf_counter()
        fx = get_fixture(name)
        curve = psi_exact(fx.pair, fx.transition, fx.prior, 1, g=fx.g)
        region = curve.negative_region()
        dt = time.perf_counter() - t0
        if target is None:
            good = curve.min_value < -1e-6 and region is not None and abs(region[1] - 0.26) <= 0.02
        else:
            good = region is not None and all(abs(a - b) <= 0.02 for a, b in zip(region, target))
        good = good and dt < 1.0
        ok &= good
        shown = "none" if region is None else f"[{region[0]:.4f}, {region[1]:.4f}]"
        out.append(f"{name} min psi {curve.min_value:.4g}, negative on {shown}")
    report(2, ok, "; ".join(out))


def test_criterion_3_global_sweep():
    t0 = time.perf_counter()
    bad = []
    checked = 0
    for name in ("ex1", "ex2", "ex3"):
        pair = get_fixture(name).pair
        for prior in simplex_sweep(pair.n_states):
            for k in (1, 2, 3):
                curve = psi_exact(pair, None, prior, k)
                checked += 1
                if curve.min_value < -PSI_TOL:
                    bad.append((name, k, tuple(np.round(prior, 2).tolist()), curve.min_value))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    if bad:
        worst = min(bad, key=lambda b: b[3])
        names = sorted({b[0] for b in bad})
        detail = (f"{len(bad)} of {checked} (prior, k) cases negative, all in {names}; "
                  f"worst psi {worst[3]:.4g} at k={worst[1]}, prior {worst[2]}")
    else:
        detail = f"{checked} (prior, k) cases nonnegative"
    report(3, ok, f"{detail} ({dt:.1f}s)")


def random_pairs(count=200, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        X = int(rng.integers(2, 4))
        Y1, Y2 = (int(v) for v in rng.integers(2, 4, size=2))
        B1 = rng.dirichlet(np.ones(Y1), size=X)
        B2 = rng.dirichlet(np.ones(Y2), size=X)
        yield SensorPair(B1, B2)


def test_criterion_4_equivalence():
    t0 = time.perf_counter()
    disagree, skipped, compared = [], 0, 0
    for i, pair in enumerate(random_pairs()):
        a4 = check_signed_ratio_a4(pair)
        if a4.details["log_exclusions"]:
            skipped += 1
            continue
        compared += 1
        eq10 = all(v.holds for v in check_aggregated_sc(pair, 3).values())
        if a4.holds != eq10:
            disagree.append((i, a4.status.value, "Holds" if eq10 else "Fails"))
    dt = time.perf_counter() - t0
    ok = not disagree and dt < 120
    detail = f"{compared} compared, {skipped} skipped for log exclusions, {len(disagree)} disagreements"
    if disagree:
        detail += " (draw, A4, k<=3): " + ", ".join(f"({i}, {a}, {e})" for i, a, e in disagree)
    report(4, ok, f"{detail} ({dt:.1f}s)")


def test_criterion_5_mse():
    t0 = time.perf_counter()
    pair = get_fixture("ex1").pair
    prior = np.full(3, 1 / 3)
    g = pair.levels.g
    notes, ok = [], True
    for k in range(1, 6):
        res = mse_monte_carlo(pair, None, prior, k, trials=100_000, seed=42)
        c = res.comparison
        ok &= c.z >= 3.0
        if k <= 3:
            for est, sensor in ((res.mse1, pair.sensor1), (res.mse2, pair.sensor2)):
                exact = mse_exact(sensor, None, prior, k, g)
                ok &= abs(est.value - exact) <= 3 * est.standard_error
        notes.append(f"k={k} z={c.z:.1f}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    report(5, ok, f"MSE1 >= MSE2: {', '.join(notes)} ({dt:.1f}s)")


def test_criterion_6_noise_families():
    t0 = time.perf_counter()
    problems = []
    for name in ("gaussian", "exponential", "gamma"):
        f1, f2 = get_fixture(name).noise
        if not (is_log_concave(f1) and is_log_concave(f2)):
            problems.append(f"{name} log-concavity")
        if not check_dispersive(f1, f2).holds:
            problems.append(f"{name} dispersive")
        if not check_hazard_rate(f1, f2).holds:
            problems.append(f"{name} hazard rate")
        pair = noise_discretization(f1, f2)
        if not (check_tp2(pair.sensor1).holds and check_tp2(pair.sensor2).holds):
            problems.append(f"{name} discretized A1")
        if not check_single_crossing_a2(pair).holds:
            problems.append(f"{name} discretized A2")
        for k, v in check_aggregated_sc(pair, 2).items():
            if not v.holds:
                problems.append(f"{name} discretized aggregation k={k}")
    pw, ex = get_fixture("powerlaw").noise
    var = moments(pw).variance
    if abs(var - 17.35) > 0.05:
        problems.append(f"power-law variance {var:.4f}")
    if not check_theorem4_ratio(pw, ex).holds:
        problems.append("power-law/exponential ratio")
    dt = time.perf_counter() - t0
    if dt >= 10:
        problems.append(f"took {dt:.1f}s")
    report(6, not problems, "; ".join(problems) or f"all family checks hold ({dt:.1f}s)")


def test_criterion_7_filter():
    t0 = time.perf_counter()
    problems = []
    grid = np.linspace(-8, 8, 2001)
    prior = GridDensity.from_values(grid, np.exp(-grid**2 / 2))
    post, _ = grid_filter_update(prior, 0.0, Gaussian(1.0))
    if abs(post.mean()) > 1e-6 or abs(post.variance() - 0.5) > 1e-6:
        problems.append(f"conjugate mean {post.mean():.3g} var {post.variance():.9f}")

    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        n, m = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        B = rng.dirichlet(np.ones(m), size=n)
        pi = rng.dirichlet(np.ones(n))
        g = np.arange(n, dtype=float)
        total = 0.0
        for y in range(m):
            try:
                b, s = filter_update(pi, y, None, B)
            except ZeroNormalizer:
                continue
            total += conditional_mean(b, g) * s
        worst = max(worst, abs(total - g @ pi))
    if worst > 1e-12:
        problems.append(f"martingale gap {worst:.2g}")

    kernels = []
    for fx in FIXTURES.values():
        if fx.pair is not None:
            kernels += [fx.pair.sensor1, fx.pair.sensor2]
    tp2 = [k for k in kernels if check_tp2(k).holds]
    for k in tp2:
        for _ in range(20):
            pi = rng.dirichlet(np.ones(k.n_states))
            prev = None
            for y in range(k.n_obs):
                try:
                    b, _ = filter_update(pi, y, None, k)
                except ZeroNormalizer:
                    continue
                if prev is not None and mlr_compare(b, prev) not in (Order.GE, Order.EQ):
                    problems.append("MLR monotonicity")
                prev = b
    dt = time.perf_counter() - t0
    if dt >= 5:
        problems.append(f"took {dt:.1f}s")
    detail = f"conjugate, martingale (max gap {worst:.1e}) and MLR on {len(tp2)} TP2 kernels"
    report(7, not problems, "; ".join(sorted(set(problems))) or detail)


def test_criterion_8_pomdp():
    t0 = time.perf_counter()
    problems, used = [], []
    for name, fx in FIXTURES.items():
        if fx.pomdp is None:
            continue
        m = fx.pomdp
        pair = SensorPair(*m.kernels)
        a13 = (check_tp2(pair.sensor1).holds and check_tp2(pair.sensor2).holds
               and check_single_crossing_a2(pair).holds and check_boundary_a3(pair).holds)
        vg = value_iterate(m, 1001, 1e-6)
        if not vg.is_convex(1e-9):
            problems.append(f"{name} V not convex")
        if len(contraction_log(vg, m.discount)) != vg.iterations - 1 or len(vg.sup_changes) != vg.iterations:
            problems.append(f"{name} contraction log incomplete")
        if not a13:
            continue
        used.append(name)
        if not verify_lower_bound(vg, m).verdict.holds:
            problems.append(f"{name} myopic lower bound")
        if not q_gap_monotone(vg).holds:
            problems.append(f"{name} Q-gap")
        zero = PomdpModel(m.P, m.kernels, m.rewards, 0.0)
        vz = value_iterate(zero, 1001, 1e-6)
        if not np.array_equal(vz.policy, vz.myopic):
            problems.append(f"{name} discount 0 policy differs from myopic")
    dt = time.perf_counter() - t0
    if dt >= 60:
        problems.append(f"took {dt:.1f}s")
    report(8, not problems and bool(used),
           "; ".join(problems) or f"bounds hold on {used}, convexity on all POMDP fixtures ({dt:.1f}s)")


DETERMINISM_COMMANDS = [
    ["check", "builtin:ex1"],
    ["check", "builtin:gaussian"],
    ["psi", "builtin:ex1", "--k", "2"],
    ["mse", "builtin:ex1", "--kmax", "5", "--trials", "100000", "--seed", "42"],
    ["pomdp", "builtin:global"],
    ["capacity", "builtin:capacity"],
    ["paper", "all"],
]


def test_criterion_9_determinism(tmp_path, capsys):
    differing = []
    for i, cmd in enumerate(DETERMINISM_COMMANDS):
        blobs = []
        for threads in ("1", "4"):
            out = tmp_path / f"{i}-{threads}"
            main([*cmd, "--threads", threads, "--out", str(out), "--json"])
            stdout = capsys.readouterr().out
            files = {p.name: p.read_bytes() for p in sorted(out.iterdir()) if not p.name.endswith("_timing.json")}
            blobs.append((stdout, files))
        if blobs[0] != blobs[1]:
            differing.append(" ".join(cmd))
    report(9, not differing, "differs: " + "; ".join(differing) if differing
           else f"{len(DETERMINISM_COMMANDS)} commands byte-identical for --threads 1 and 4")


# --- supplementary: what the criterion-4 disagreements look like at larger k ---


def _log_products(C, k):
    combos = list(itertools.combinations_with_replacement(range(C.shape[1]), k))
    return np.array([np.log(C[:, list(c)]).sum(axis=1) for c in combos])


def aggregated_sc_log(pair, k, tol=1e-12):
    """Single crossing of prod C2 - prod C1 in log space, top symbols excluded.

    A product containing the top symbol is identically zero, so its
    difference with any other product has constant sign and cannot break
    single crossing. Log space keeps large-k products out of the zero band.
    """
    C1 = pair.sensor1.ccdf_table()[:, :-1]
    C2 = pair.sensor2.ccdf_table()[:, :-1]
    L1, L2 = _log_products(C1, k), _log_products(C2, k)
    D = L2[:, None, :] - L1[None, :, :]
    s = np.where(np.abs(D) <= tol, 0, np.sign(D))
    pos = np.maximum.accumulate(s == 1, axis=-1)
    before = np.zeros_like(pos)
    before[..., 1:] = pos[..., :-1]
    return not bool(((s == -1) & before).any())


def test_disagreements_resolve_at_larger_k():
    found = []
    for i, pair in enumerate(random_pairs()):
        a4 = check_signed_ratio_a4(pair)
        if a4.details["log_exclusions"] or a4.holds:
            continue
        if all(v.holds for v in check_aggregated_sc(pair, 3).values()):
            first = next((k for k in range(4, 61) if not aggregated_sc_log(pair, k)), None)
            found.append((i, first))
    assert found, "expected at least one pair where the two checks differ at k <= 3"
    assert all(k is not None for _, k in found), found


def test_a13_without_a4_breaks_the_myopic_bound():
    fx = FIXTURES["global"]
    pair = FIXTURES["a2_not_a4"].pair
    m = PomdpModel(fx.pomdp.P, (pair.sensor1, pair.sensor2), fx.pomdp.rewards, 0.9)
    assert check_boundary_a3(pair).holds and check_single_crossing_a2(pair).holds
    vg = value_iterate(m)
    gap = q_gap_monotone(vg)
    assert gap.fails and gap.witness["shortfall"] > 1e-3


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
