"""YAML model files.

Example::

    states: {count: 2, levels: [0, 1]}
    transition: [[0.9, 0.1], [0.1, 0.9]]     # or: identity
    prior: [0.5, 0.5]                          # optional, uniform by default
    sensors:
      - {name: coarse, kind: matrix, matrix: [[0.7, 0.3], [0.3, 0.7]]}
      - {name: fine, kind: gaussian, sigma: 1.0}
    pomdp:                                     # optional
      actions: [coarse, fine]
      rewards: [[1.0, 0.2], [0.8, 1.0]]
      discount: 0.9

Errors carry the 1-based line and column of the offending node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .core import AdditiveKernel, FiniteKernel, GridDensityKernel, SensorPair, StateLevels, validate_stochastic
from .densities import Exponential, Gamma, Gaussian, PowerLaw, Uniform
from .errors import ConvexDomError, ModelFileError, UnknownSensor

NOISE_KINDS = {
    "gaussian": (Gaussian, "sigma"),
    "exponential": (Exponential, "rate"),
    "gamma": (Gamma, "shape"),
    "powerlaw": (PowerLaw, "alpha"),
    "uniform": (Uniform, "width"),
}
KINDS = ("matrix", "grid-density", *NOISE_KINDS)


@dataclass
class Model:
    n_states: int
    levels: StateLevels
    transition: np.ndarray | None
    prior: np.ndarray
    sensors: dict
    pomdp: dict | None = None
    source: str = ""
    marks: dict = field(default_factory=dict, repr=False)
    g: np.ndarray | None = None  # levels for the conditional mean when they are not strictly increasing

    def sensor(self, name: str):
        try:
            return self.sensors[name]
        except KeyError:
            raise UnknownSensor(f"no sensor named {name!r}; available: {list(self.sensors)}") from None

    def pair(self, a: str, b: str) -> SensorPair:
        return SensorPair(self.sensor(a), self.sensor(b), self.levels)


def _construct(node, path, marks):
    marks[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = yaml.safe_load(yaml.serialize(k)) if not isinstance(k, yaml.ScalarNode) else k.value
            out[key] = _construct(v, path + (key,), marks)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_construct(v, path + (i,), marks) for i, v in enumerate(node.value)]
    return yaml.safe_load(yaml.serialize(node))


class _Doc:
    def __init__(self, data, marks):
        self.data, self.marks = data, marks

    def fail(self, path, message):
        for i in range(len(path), -1, -1):
            if path[:i] in self.marks:
                line, col = self.marks[path[:i]]
                raise ModelFileError(message, line, col)
        raise ModelFileError(message)

    def get(self, path, required=True, default=None):
        cur = self.data
        for i, p in enumerate(path):
            if isinstance(cur, dict) and p in cur:
                cur = cur[p]
            elif isinstance(cur, list) and isinstance(p, int) and p < len(cur):
                cur = cur[p]
            else:
                if required:
                    self.fail(path[:i], f"missing field {'.'.join(map(str, path))}")
                return default
        return cur

    def matrix(self, path):
        raw = self.get(path)
        try:
            arr = np.array(raw, dtype=float)
        except (TypeError, ValueError):
            self.fail(path, "expected a numeric matrix")
        if arr.ndim != 2:
            self.fail(path, "expected a rectangular matrix (list of equal-length rows)")
        return arr

    def vector(self, path, required=True):
        raw = self.get(path, required)
        if raw is None:
            return None
        try:
            arr = np.array(raw, dtype=float)
        except (TypeError, ValueError):
            self.fail(path, "expected a numeric vector")
        if arr.ndim != 1:
            self.fail(path, "expected a flat list of numbers")
        return arr

    def number(self, path, required=True, default=None):
        raw = self.get(path, required, default)
        if raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.fail(path, f"expected a number, got {raw!r}")
        return float(raw)


def _sensor(doc: _Doc, i: int, levels: StateLevels, n: int):
    base = ("sensors", i)
    entry = doc.get(base)
    if not isinstance(entry, dict):
        doc.fail(base, "each sensor must be a mapping")
    name = doc.get(base + ("name",))
    kind = doc.get(base + ("kind",))
    if kind not in KINDS:
        doc.fail(base + ("kind",), f"unknown sensor kind {kind!r}; expected one of {list(KINDS)}")
    try:
        if kind == "matrix":
            m = doc.matrix(base + ("matrix",))
            if m.shape[0] != n:
                doc.fail(base + ("matrix",), f"matrix has {m.shape[0]} rows, expected {n}")
            return str(name), FiniteKernel(m)
        if kind == "grid-density":
            vals = doc.matrix(base + ("values",))
            if vals.shape[0] != n:
                doc.fail(base + ("values",), f"values has {vals.shape[0]} rows, expected {n}")
            return str(name), GridDensityKernel(doc.number(base + ("a",)), doc.number(base + ("b",)), vals)
        cls, param = NOISE_KINDS[kind]
        return str(name), AdditiveKernel(cls(doc.number(base + (param,))), levels)
    except ModelFileError:
        raise
    except (ConvexDomError, ValueError) as err:
        doc.fail(base, f"invalid sensor {name!r}: {err}")


def parse_model(text: str) -> Model:
    try:
        node = yaml.compose(text)
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark
        raise ModelFileError(str(err.problem), mark.line + 1 if mark else None,
                             mark.column + 1 if mark else None) from None
    if node is None or not isinstance(node, yaml.MappingNode):
        raise ModelFileError("model file must be a mapping", 1, 1)
    marks: dict = {}
    doc = _Doc(_construct(node, (), marks), marks)

    n = doc.get(("states", "count"))
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        doc.fail(("states", "count"), "states.count must be a positive integer")
    lv = doc.vector(("states", "levels"), required=False)
    try:
        levels = StateLevels(lv) if lv is not None else StateLevels.indices(n)
    except ValueError as err:
        doc.fail(("states", "levels"), str(err))
    if len(levels) != n:
        doc.fail(("states", "levels"), f"expected {n} levels")

    tr = doc.get(("transition",), required=False, default="identity")
    if tr == "identity" or tr is None:
        P = None
    else:
        P = doc.matrix(("transition",))
        if P.shape != (n, n):
            doc.fail(("transition",), f"transition must be {n}x{n}")
        try:
            validate_stochastic(P)
        except ConvexDomError as err:
            doc.fail(("transition",), str(err))

    prior = doc.vector(("prior",), required=False)
    if prior is None:
        prior = np.full(n, 1.0 / n)
    elif prior.size != n or np.any(prior < 0) or abs(prior.sum() - 1) > 1e-9:
        doc.fail(("prior",), "prior must be a probability vector over the states")

    raw = doc.get(("sensors",))
    if not isinstance(raw, list) or not raw:
        doc.fail(("sensors",), "sensors must be a non-empty list")
    sensors = {}
    for i in range(len(raw)):
        name, k = _sensor(doc, i, levels, n)
        if name in sensors:
            doc.fail(("sensors", i, "name"), f"duplicate sensor name {name!r}")
        sensors[name] = k

    pomdp = None
    if doc.get(("pomdp",), required=False) is not None:
        actions = doc.get(("pomdp", "actions"), required=False, default=list(sensors))
        for j, a in enumerate(actions):
            if a not in sensors:
                doc.fail(("pomdp", "actions", j), f"unknown sensor {a!r}")
        rewards = doc.matrix(("pomdp", "rewards"))
        if rewards.shape != (len(actions), n):
            doc.fail(("pomdp", "rewards"), f"rewards must be {len(actions)}x{n}")
        horizon = doc.get(("pomdp", "horizon"), required=False)
        if horizon is not None and (isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 1):
            doc.fail(("pomdp", "horizon"), "horizon must be a positive integer")
        pomdp = {"actions": list(actions), "rewards": rewards,
                 "discount": doc.number(("pomdp", "discount"), required=False, default=0.9),
                 "horizon": horizon,
                 "terminal_reward": doc.vector(("pomdp", "terminal_reward"), required=False)}
    return Model(n, levels, P, prior, sensors, pomdp, text, marks)


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
