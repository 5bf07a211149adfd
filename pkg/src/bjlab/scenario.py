"""Scenario files: a measure space, an inner space, named simple functions and one experiment.

A scenario is a JSON document::

    {
      "name": "two-atom-hilbert",
      "space": {"weights": [1, 1]},
      "inner": {"dim": 2, "p": 2, "field": "real"},
      "outer_p": 1,
      "functions": {"f": [[1, 0], [-1, 0]], "g": [[1, 1], [1, 0]]},
      "experiment": "bj_check",
      "seed": 0,
      "tolerance": 1e-9,
      "params": {},
      "expect": {"orthogonal": {"f,g": true, "g,f": false}}
    }

``space`` may also be a bare list of weights. Complex coordinates are written
as ``[re, im]`` pairs. ``tolerance`` is optional and falls back to the
``BJLAB_TOL`` environment variable, then to the library default.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .bochner import SimpleFunction
from .errors import BJLabError, ScenarioError
from .measure import MeasureSpace
from .scalar_spaces import DEFAULT_TOL, ScalarSpace

EXPERIMENTS = (
    "reproduce_example",
    "bj_check",
    "smoothness",
    "left_symmetry",
    "right_symmetry",
    "fuzz_equivalence",
    "converse_check",
    "sequence_classify",
)
TOL_ENV = "BJLAB_TOL"
_KEYS = {"name", "space", "inner", "outer_p", "functions", "experiment", "seed", "tolerance", "params", "expect"}


@dataclass(frozen=True)
class Scenario:
    name: str
    space: MeasureSpace
    inner: ScalarSpace
    outer_p: float
    functions: dict
    experiment: str
    seed: int = 0
    tolerance: float = DEFAULT_TOL
    params: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)

    def function(self, name=None) -> SimpleFunction:
        if name is None:
            name = "f" if "f" in self.functions else next(iter(self.functions))
        try:
            return self.functions[name]
        except KeyError:
            raise ScenarioError(f"no function named {name!r}", field="functions") from None

    def with_overrides(self, *, seed=None, tolerance=None, experiment=None, trials=None):
        params = dict(self.params)
        if trials is not None:
            params["trials"] = _positive_int(trials, "trials")
        return replace(
            self,
            seed=self.seed if seed is None else _seed(seed),
            tolerance=self.tolerance if tolerance is None else _tolerance(tolerance),
            experiment=self.experiment if experiment is None else _experiment(experiment),
            params=params,
        )


def env_tolerance():
    """``BJLAB_TOL`` as a float, or ``None`` when unset."""
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        return _tolerance(float(raw))
    except (ValueError, ScenarioError):
        raise ScenarioError(f"{TOL_ENV}={raw!r} is not a positive number") from None


class _Locator:
    """Maps a dotted field path to the line where its key first appears."""

    def __init__(self, text):
        self.text = text

    def line(self, path):
        if not self.text:
            return None
        pos = 0
        found = None
        for key in path.split("."):
            m = re.compile(r'"%s"\s*:' % re.escape(key)).search(self.text, pos)
            if m is None:
                break
            pos = m.end()
            found = m.start()
        return None if found is None else self.text.count("\n", 0, found) + 1

    def error(self, message, path):
        return ScenarioError(message, field=path, line=self.line(path))


def _tolerance(t):
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not (math.isfinite(t) and t > 0):
        raise ScenarioError(f"tolerance must be a positive number, got {t!r}", field="tolerance")
    return float(t)


def _seed(s):
    if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < 2**64:
        raise ScenarioError(f"seed must be an integer in [0, 2^64), got {s!r}", field="seed")
    return int(s)


def _positive_int(n, name):
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ScenarioError(f"{name} must be a positive integer, got {n!r}", field=f"params.{name}")
    return int(n)


def _experiment(e):
    if e not in EXPERIMENTS:
        raise ScenarioError(f"unknown experiment {e!r}; expected one of {', '.join(EXPERIMENTS)}", field="experiment")
    return e


def _number(x, loc, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise loc.error(f"expected a number, got {x!r}", path)
    if not math.isfinite(x):
        raise loc.error("numbers must be finite", path)
    return float(x)


def _scalar(x, complex_field, loc, path):
    if isinstance(x, list):
        if len(x) != 2:
            raise loc.error(f"a complex scalar is a [re, im] pair, got {x!r}", path)
        if not complex_field:
            raise loc.error("complex scalar in a real inner space", path)
        return complex(_number(x[0], loc, path), _number(x[1], loc, path))
    return _number(x, loc, path)


def _parse_space(raw, loc):
    if isinstance(raw, list):
        raw = {"weights": raw}
    if not isinstance(raw, dict) or "weights" not in raw:
        raise loc.error("space needs a list of weights", "space")
    w = raw["weights"]
    if not isinstance(w, list) or not w:
        raise loc.error("weights must be a non-empty list", "space.weights")
    weights = [_number(x, loc, "space.weights") for x in w]
    if any(x < 0 for x in weights):
        raise loc.error("weights must be non-negative", "space.weights")
    points = raw.get("points", ())
    try:
        return MeasureSpace(np.array(weights), tuple(points))
    except BJLabError as e:
        raise loc.error(str(e), "space") from None


def _parse_inner(raw, loc):
    if not isinstance(raw, dict):
        raise loc.error("inner must be an object with dim, p and field", "inner")
    for k in ("dim", "p"):
        if k not in raw:
            raise loc.error("missing required field", f"inner.{k}")
    dim = raw["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise loc.error(f"dim must be an integer, got {dim!r}", "inner.dim")
    try:
        return ScalarSpace(dim, _number(raw["p"], loc, "inner.p"), raw.get("field", "real"))
    except BJLabError as e:
        raise loc.error(str(e), "inner") from None


def _parse_functions(raw, space, inner, loc):
    if not isinstance(raw, dict) or not raw:
        raise loc.error("functions must be a non-empty object of named value lists", "functions")
    out = {}
    for name, rows in raw.items():
        path = f"functions.{name}"
        if not isinstance(rows, list) or len(rows) != len(space):
            raise loc.error(f"expected one value per point ({len(space)} rows)", path)
        vals = []
        for row in rows:
            if inner.dim == 1 and not (isinstance(row, list) and len(row) == 1):
                row = [row]
            if not isinstance(row, list) or len(row) != inner.dim:
                got = len(row) if isinstance(row, list) else 1
                raise loc.error(f"each value needs {inner.dim} coordinates, got {got}", path)
            vals.append([_scalar(x, inner.is_complex, loc, path) for x in row])
        out[name] = SimpleFunction(space, inner, np.array(vals, dtype=inner.dtype))
    return out


def parse_scenario(data, text="") -> Scenario:
    """Validate a decoded scenario document; ``text`` is used for line numbers."""
    loc = _Locator(text)
    if not isinstance(data, dict):
        raise ScenarioError("a scenario must be a JSON object", line=1 if text else None)
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise loc.error(f"unknown field(s): {', '.join(unknown)}", unknown[0])
    for k in ("name", "space", "inner", "outer_p", "functions", "experiment"):
        if k not in data:
            raise ScenarioError("missing required field", field=k)
    name = data["name"]
    if not isinstance(name, str) or not name:
        raise loc.error("name must be a non-empty string", "name")
    space = _parse_space(data["space"], loc)
    inner = _parse_inner(data["inner"], loc)
    outer_p = _number(data["outer_p"], loc, "outer_p")
    if outer_p < 1:
        raise loc.error(f"outer_p must be >= 1, got {outer_p!r}", "outer_p")
    functions = _parse_functions(data["functions"], space, inner, loc)

    def located(fn, key, default):
        try:
            return fn(data.get(key, default))
        except ScenarioError as e:
            raise loc.error(str(e).split(": ", 1)[-1], key) from None

    experiment = located(_experiment, "experiment", None)
    seed = located(_seed, "seed", 0)
    tol = data.get("tolerance")
    tolerance = located(_tolerance, "tolerance", None) if tol is not None else (env_tolerance() or DEFAULT_TOL)
    params = data.get("params", {})
    expect = data.get("expect", {})
    for key, v in (("params", params), ("expect", expect)):
        if not isinstance(v, dict):
            raise loc.error("must be an object", key)
    return Scenario(name, space, inner, outer_p, functions, experiment, seed, tolerance, params, expect)


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e.msg} (column {e.colno})", line=e.lineno) from None
    return parse_scenario(data, text)


_S = 2 ** -0.5

BUILTIN_SCENARIOS = {
    "two-atom-hilbert": {
        "name": "two-atom-hilbert",
        "space": {"weights": [1, 1]},
        "inner": {"dim": 2, "p": 2, "field": "real"},
        "outer_p": 1,
        "functions": {"f": [[1, 0], [-1, 0]], "g": [[1, 1], [1, 0]]},
        "experiment": "reproduce_example",
        "seed": 0,
        "expect": {
            "orthogonal": {"f,g": True, "g,f": False},
            "abs_c": {"f,g": 0.0, "g,f": 1 - _S},
            "cozero_structure": {"f": "two_atoms"},
        },
    },
    "null-satellite": {
        "name": "null-satellite",
        "space": {"weights": [1, 0]},
        "inner": {"dim": 2, "p": 3, "field": "real"},
        "outer_p": 1,
        "functions": {"f": [[2, 1], [0, 0]], "g": [[1, -4], [1, 1]]},
        "experiment": "reproduce_example",
        "seed": 0,
        "expect": {
            "orthogonal": {"f,g": True, "g,f": False},
            "cozero_structure": {"f": "one_atom"},
        },
    },
    "three-atom-l1-witnesses": {
        "name": "three-atom-l1-witnesses",
        "space": {"weights": [1, 1, 1, 0.5]},
        "inner": {"dim": 2, "p": 2, "field": "real"},
        "outer_p": 1,
        "functions": {"f": [[1, 0], [0, 1], [3, 0], [0, 0]]},
        "experiment": "left_symmetry",
        "seed": 0,
        "expect": {"verdict": "witness_found", "construction": "zero-set-bump"},
    },
    "three-atom-lp-witnesses": {
        "name": "three-atom-lp-witnesses",
        "space": {"weights": [1, 1, 1]},
        "inner": {"dim": 2, "p": 2, "field": "real"},
        "outer_p": 3,
        "functions": {"f": [[1, 0], [0, 1], [3, 0]]},
        "experiment": "left_symmetry",
        "seed": 0,
        "expect": {"verdict": "witness_found", "residual": 756.0},
    },
    "two-slot-rotation": {
        "name": "two-slot-rotation",
        "space": {"weights": [1, 1]},
        "inner": {"dim": 2, "p": 2, "field": "real"},
        "outer_p": 3,
        "functions": {"x": [[1, 0], [1, 0]]},
        "experiment": "sequence_classify",
        "seed": 0,
        "expect": {"verdict": "witness_found", "construction": "two-slot-rotation", "residual": 1 - 2**0.5},
    },
    "one-atom-converse": {
        "name": "one-atom-converse",
        "space": {"weights": [2, 0, 0]},
        "inner": {"dim": 3, "p": 2, "field": "real"},
        "outer_p": 3,
        "functions": {"f": [[1, 2, 0], [0, 0, 0], [0, 1, 0]]},
        "experiment": "converse_check",
        "seed": 7,
        "params": {"trials": 200, "claim": "left"},
        "expect": {"verdict": "no_witness_found"},
    },
}


def builtin_scenario(name) -> Scenario:
    try:
        data = BUILTIN_SCENARIOS[name]
    except KeyError:
        raise ScenarioError(f"no built-in scenario {name!r}; known: {', '.join(BUILTIN_SCENARIOS)}") from None
    return parse_scenario(data, json.dumps(data, indent=2))
