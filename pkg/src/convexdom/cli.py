"""Command-line front end.

Exit codes: 0 pass, 1 a check failed, 2 usage or model-file error, 3 an
enumeration cap was exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .core import AdditiveKernel, FiniteKernel, SensorPair, StateLevels
from .errors import (
    ConvexDomError,
    EnumerationCapExceeded,
    ModelFileError,
    NotTwoState,
    UnknownExample,
    UnknownSensor,
)
from .fixtures import FIXTURES, NOISE_LEVELS, evaluate_fixture, get_fixture
from .modelfile import Model, load_model
from .orders import channel_capacity, dominance_report
from .pomdp import PomdpModel, contraction_log, q_gap_monotone, value_iterate, verify_lower_bound
from .verify import mse_exact, mse_monte_carlo, psi_exact

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
BUILTIN = "builtin:"


class UsageError(ConvexDomError):
    pass


# --- helpers ----------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _model_from_fixture(name: str) -> Model:
    fx = get_fixture(name)
    if fx.kind == "noise":
        lv = StateLevels(NOISE_LEVELS)
        sensors = {"sensor1": AdditiveKernel(fx.noise[0], lv), "sensor2": AdditiveKernel(fx.noise[1], lv)}
    else:
        lv = fx.pair.levels
        sensors = {"sensor1": fx.pair.sensor1, "sensor2": fx.pair.sensor2}
    n = len(lv)
    prior = fx.prior if fx.prior is not None else np.full(n, 1.0 / n)
    transition = fx.transition
    pomdp = None
    if fx.pomdp is not None:
        transition = fx.pomdp.P
        pomdp = {"actions": ["sensor1", "sensor2"], "rewards": fx.pomdp.rewards,
                 "discount": fx.pomdp.discount, "horizon": fx.pomdp.horizon,
                 "terminal_reward": fx.pomdp.terminal_reward}
    return Model(n, lv, transition, prior, sensors, pomdp, source=f"{BUILTIN}{name}", g=fx.g)


def _load(spec: str) -> Model:
    if spec.startswith(BUILTIN):
        return _model_from_fixture(spec[len(BUILTIN):])
    return load_model(spec)


def _source_digest(spec: str) -> str:
    if spec.startswith(BUILTIN):
        return spec
    with open(spec, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def config_hash(args, fields) -> str:
    """Hash of every input that can change the numeric payload (not --threads or --out)."""
    payload = {"command": args.command, "seed": args.seed, "tol": args.tol,
               **{f: getattr(args, f) for f in fields}}
    if getattr(args, "model", None):
        payload["model"] = _source_digest(args.model)
    blob = json.dumps(_jsonable(payload), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _pick_pair(model: Model, names) -> tuple[str, str, SensorPair]:
    if names:
        if len(names) != 2:
            raise UsageError("--sensors takes exactly two names")
        a, b = names
    else:
        if len(model.sensors) != 2:
            raise UsageError("model has more than two sensors; choose with --sensors A B")
        a, b = list(model.sensors)
    return a, b, model.pair(a, b)


class Output:
    """Collects the machine-readable report and writes artifacts under --out."""

    def __init__(self, args, fields=()):
        self.args = args
        self.report = {"command": args.command, "argv": _echo(args), "config_hash": config_hash(args, fields),
                       "seed": args.seed, "version": __version__, "artifacts": []}
        self.started = time.perf_counter()

    def path(self, name: str) -> str | None:
        if not self.args.out:
            return None
        os.makedirs(self.args.out, exist_ok=True)
        p = os.path.join(self.args.out, name)
        self.report["artifacts"].append(name)
        return p

    def finish(self, code: int) -> int:
        self.report["exit_code"] = code
        text = _dumps(self.report)
        if self.args.out:
            os.makedirs(self.args.out, exist_ok=True)
            with open(os.path.join(self.args.out, f"{self.args.command}_report.json"), "w") as fh:
                fh.write(text + "\n")
            # wall-clock timing lives in a side file so the report stays reproducible
            with open(os.path.join(self.args.out, f"{self.args.command}_timing.json"), "w") as fh:
                fh.write(json.dumps({"seconds": time.perf_counter() - self.started}) + "\n")
        if self.args.json:
            print(text)
        return code


def _echo(args) -> list[str]:
    skip = {"func", "threads", "out", "json"}
    return [f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skip]


def _say(args, line: str = "") -> None:
    if not args.json:
        print(line)


# --- commands ---------------------------------------------------------------


def cmd_check(args) -> int:
    out = Output(args, ("sensors", "kmax", "global_k"))
    model = _load(args.model)
    a, b, pair = _pick_pair(model, args.sensors)
    rep = dominance_report(pair, kmax=args.kmax if pair.finite else 0, transition=model.transition,
                           global_k=args.global_k, tol=args.tol)
    data = rep.to_dict()
    out.report.update({"sensors": [a, b], "checks": data})
    _say(args, f"sensor 1 = {a}, sensor 2 = {b}")
    for name, v in rep.assumption_verdicts().items():
        line = f"  {name:<22} {v.label}"
        if v.fails:
            line += f"  witness={_jsonable(v.witness)}"
        _say(args, line)
    for name, fr in (("blackwell_right", rep.blackwell_right), ("blackwell_left", rep.blackwell_left)):
        if hasattr(fr, "feasible"):
            _say(args, f"  {name:<22} {'feasible' if fr.feasible else 'infeasible'} "
                       f"(phase-1 objective {fr.phase1_objective:.3g})")
        else:
            _say(args, f"  {name:<22} {fr.label}")
    if rep.capacity1 is not None:
        _say(args, f"  capacity (bits)        {rep.capacity1:.6f} vs {rep.capacity2:.6f}")
    return out.finish(EXIT_OK if rep.all_hold else EXIT_FAIL)


def cmd_psi(args) -> int:
    out = Output(args, ("sensors", "k", "lambda_points"))
    model = _load(args.model)
    a, b, pair = _pick_pair(model, args.sensors)
    tol = args.tol if args.tol is not None else 1e-10
    curve = psi_exact(pair, model.transition, model.prior, args.k, args.lambda_points, g=model.g)
    holds = curve.min_value >= -tol
    csv_path = args.csv or out.path(f"psi_k{args.k}.csv")
    if csv_path:
        curve.to_csv(csv_path)
    region = curve.negative_region()
    out.report.update({"sensors": [a, b], "k": args.k, "min_psi": curve.min_value,
                       "argmin_lambda": curve.min_lambda, "negative_region": region,
                       "verdict": "Holds" if holds else "Fails", "points": int(curve.lambdas.size)})
    _say(args, f"min psi = {curve.min_value:.6g} at lambda = {curve.min_lambda:.6g}")
    if region:
        _say(args, f"psi < 0 on [{region[0]:.4f}, {region[1]:.4f}]")
    _say(args, f"verdict: {'Holds' if holds else 'Fails'}")
    return out.finish(EXIT_OK if holds else EXIT_FAIL)


def cmd_mse(args) -> int:
    out = Output(args, ("sensors", "kmax", "trials"))
    model = _load(args.model)
    a, b, pair = _pick_pair(model, args.sensors)
    rows = []
    _say(args, f"{'k':>3} {'MSE1':>12} {'se1':>10} {'MSE2':>12} {'se2':>10} {'z':>8}  exact")
    ok = True
    for k in range(1, args.kmax + 1):
        res = mse_monte_carlo(pair, model.transition, model.prior, k, args.trials, args.seed,
                              g=model.g, threads=args.threads)
        row = {"k": k, **res.to_dict()}
        exact = None
        if pair.finite and max(pair.sensor1.n_obs, pair.sensor2.n_obs) ** k <= 10**6:
            g = model.g if model.g is not None else model.levels.g
            exact = [mse_exact(s, model.transition, model.prior, k, g) for s in (pair.sensor1, pair.sensor2)]
            row["exact"] = exact
        rows.append(row)
        c = res.comparison
        ok &= c.z >= 3.0
        ex = "" if exact is None else f"{exact[0]:.6f} / {exact[1]:.6f}"
        _say(args, f"{k:>3} {c.sensor1.value:>12.6f} {c.sensor1.standard_error:>10.2e} "
                   f"{c.sensor2.value:>12.6f} {c.sensor2.standard_error:>10.2e} {c.z:>8.2f}  {ex}")
    out.report.update({"sensors": [a, b], "trials": args.trials, "rows": rows})
    return out.finish(EXIT_OK if ok else EXIT_FAIL)


def _pomdp_model(model: Model) -> PomdpModel:
    if model.pomdp is None:
        raise UsageError("model file has no pomdp section")
    if model.n_states != 2:
        raise NotTwoState(f"the POMDP solver handles 2 states, model has {model.n_states}")
    kernels = []
    for name in model.pomdp["actions"]:
        k = model.sensor(name)
        if not isinstance(k, FiniteKernel):
            raise UsageError(f"sensor {name!r} is continuous; discretize it before solving")
        kernels.append(k)
    P = model.transition if model.transition is not None else np.eye(2)
    return PomdpModel(P, tuple(kernels), model.pomdp["rewards"], model.pomdp["discount"],
                      model.pomdp["horizon"], model.pomdp["terminal_reward"])


def cmd_pomdp(args) -> int:
    tol = args.tol if args.tol is not None else 1e-6
    out = Output(args, ("grid",))
    model = _load(args.model)
    pm = _pomdp_model(model)
    vg = value_iterate(pm, args.grid, tol)
    lb = verify_lower_bound(vg, pm)
    gap = q_gap_monotone(vg)
    csv_path = args.csv or out.path("value_grid.csv")
    if csv_path:
        vg.to_csv(csv_path)
    log = contraction_log(vg, pm.discount)
    out.report.update({"iterations": vg.iterations, "convex": vg.is_convex(),
                       "lower_bound": lb.to_dict(), "q_gap": gap.to_dict(),
                       "contraction": {"ratios_within_discount": all(r["within"] for r in log),
                                       "last_sup_change": vg.sup_changes[-1] if vg.sup_changes else 0.0}})
    _say(args, f"value iteration: {vg.iterations} iterations, V convex on grid: {vg.is_convex()}")
    _say(args, f"myopic lower bound: {lb.verdict.label} ({len(lb.violations)} violations, "
               f"{len(lb.flagged)} flagged), {lb.coincide}")
    _say(args, f"Q-gap monotone: {gap.label}")
    return out.finish(EXIT_OK if lb.verdict.holds and gap.holds else EXIT_FAIL)


def cmd_capacity(args) -> int:
    out = Output(args, ("sensors",))
    model = _load(args.model)
    names = args.sensors or list(model.sensors)
    caps = {}
    for n in names:
        k = model.sensor(n)
        if not isinstance(k, FiniteKernel):
            raise UsageError(f"sensor {n!r} is continuous; capacity needs a finite alphabet")
        caps[n] = channel_capacity(k)
        _say(args, f"{n:<16} {caps[n]:.9f} bits")
    out.report["capacity_bits"] = caps
    return out.finish(EXIT_OK)


def cmd_paper(args) -> int:
    out = Output(args, ("example",))
    ids = sorted(FIXTURES) if args.example == "all" else [args.example]
    results = []
    for i in ids:
        fx = get_fixture(i)
        res = evaluate_fixture(fx)
        results.append({k: v for k, v in res.items() if k != "details"} | {"details": res["details"]})
        _say(args, f"[{i}] {fx.title}: {'all match' if res['all_match'] else 'MISMATCH'}")
        for row in res["rows"]:
            mark = "ok " if row["match"] else "BAD"
            extra = f"  (claimed: {row['claimed']})" if "claimed" in row else ""
            _say(args, f"   {mark} {row['check']:<20} expected {row['expected']:<12} got {row['got']}{extra}")
        for note in res["notes"]:
            _say(args, f"   note: {note}")
    out.report["examples"] = results
    return out.finish(EXIT_OK if all(r["all_match"] for r in results) else EXIT_FAIL)


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")
    common.add_argument("--tol", type=float, default=None, help="override the command's numeric tolerance")
    common.add_argument("--out", default=None, help="directory for CSV files and the JSON report")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of tables")

    p = argparse.ArgumentParser(prog="convexdom", description="Compare sensors by convex dominance of "
                                "their conditional-mean estimates.", parents=[common])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=func)
        return sp

    sp = add("check", cmd_check, "run the assumption checks on a sensor pair")
    sp.add_argument("model", help="model file or builtin:<example>")
    sp.add_argument("--sensors", nargs="+")
    sp.add_argument("--kmax", type=int, default=3)
    sp.add_argument("--global-k", dest="global_k", type=int, default=2)

    sp = add("psi", cmd_psi, "exact psi curve by enumeration")
    sp.add_argument("model")
    sp.add_argument("--sensors", nargs="+")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--lambda-points", dest="lambda_points", type=int, default=201)
    sp.add_argument("--csv", default=None)

    sp = add("mse", cmd_mse, "Monte-Carlo MSE of the conditional means, k = 1..kmax")
    sp.add_argument("model")
    sp.add_argument("--sensors", nargs="+")
    sp.add_argument("--kmax", type=int, default=5)
    sp.add_argument("--trials", type=int, default=100_000)

    sp = add("pomdp", cmd_pomdp, "solve the two-state POMDP and check the myopic bound")
    sp.add_argument("model")
    sp.add_argument("--grid", type=int, default=1001)
    sp.add_argument("--csv", default=None)

    sp = add("capacity", cmd_capacity, "Shannon capacity of finite sensors")
    sp.add_argument("model")
    sp.add_argument("--sensors", nargs="+")

    sp = add("paper", cmd_paper, "run a built-in example against its expected verdicts")
    sp.add_argument("example", help=f"one of {sorted(FIXTURES)} or 'all'")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except EnumerationCapExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CAP
    except (ModelFileError, UnknownSensor, UnknownExample, NotTwoState, UsageError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ConvexDomError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
