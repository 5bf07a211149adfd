"""Execute scenario experiments and assemble reports.

A report is written as JSON lines: a header line (the only place holding a
timestamp or a wall-clock runtime), one record per experiment and a closing
summary. Everything after the header is a function of the scenario and seed,
so reruns produce identical bodies.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__
from .bochner import (
    SimpleFunction,
    approx_smooth_l1,
    bj_characterization,
    bj_oracle,
    cozero_set,
    l1_terms,
    lp_functional,
    orthogonal_correction,
    right_additive_at,
    smooth_l1,
)
from .errors import ScenarioError, UnsupportedError
from .fuzz import FuzzConfig, fuzz_equivalence
from .measure import cozero_structure
from .sampling import rng_for
from .scenario import Scenario, builtin_scenario, load_scenario
from .symmetry import (
    Claim,
    Outcome,
    left_witness_l1,
    lp_witnesses,
    partial_converse_check,
    right_witness_l1,
    sequence_space_classify,
)

P2_EXCLUDED = ("left_symmetry", "right_symmetry", "sequence_classify")
P2_MESSAGE = (
    "outer p = 2 is excluded for {experiment}: for a Hilbert inner space L^2(mu, H) is itself "
    "a Hilbert space, where B-J orthogonality is symmetric and the witness constructions degenerate"
)


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    expected: object = None
    tolerance: float | None = None

    def to_dict(self):
        d = {"name": self.name, "passed": bool(self.passed)}
        for k in ("value", "expected", "tolerance"):
            v = getattr(self, k)
            if v is not None:
                d[k] = _plain(v)
        return d


@dataclass
class Record:
    scenario: str
    experiment: str
    seed: int
    tolerance: float
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name, passed, value=None, expected=None, tolerance=None):
        self.checks.append(Check(name, bool(passed), value, expected, tolerance))

    def close(self, name, value, expected, tol):
        self.check(name, abs(value - expected) <= tol, value, expected, tol)

    def to_dict(self):
        return {
            "kind": "record",
            "scenario": self.scenario,
            "experiment": self.experiment,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "data": _plain(self.data),
        }


@dataclass
class Report:
    records: list
    runtime: float = 0.0
    timestamp: str = ""
    path: Path | None = None

    @property
    def assertions(self):
        return sum(len(r.checks) for r in self.records)

    @property
    def failures(self):
        return sum(not c.passed for r in self.records for c in r.checks)

    @property
    def passed(self):
        return self.failures == 0

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def summary(self):
        return {
            "kind": "summary",
            "scenarios": [r.scenario for r in self.records],
            "assertions": self.assertions,
            "failures": self.failures,
            "passed": self.passed,
        }

    def lines(self):
        header = {"kind": "header", "tool": "bjlab", "version": __version__,
                  "timestamp": self.timestamp, "runtime_s": round(self.runtime, 6)}
        body = [r.to_dict() for r in self.records] + [self.summary()]
        return [json.dumps(header)] + [json.dumps(b, sort_keys=True) for b in body]

    def body(self):
        """The report without its header line."""
        return "\n".join(self.lines()[1:]) + "\n"

    def write(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.lines()) + "\n")
        self.path = path
        return path

    def human(self):
        out = []
        for r in self.records:
            fails = [c for c in r.checks if not c.passed]
            status = "PASS" if r.passed else "FAIL"
            out.append(f"[{status}] {r.scenario} ({r.experiment}): {len(r.checks) - len(fails)}/{len(r.checks)} checks")
            for c in fails:
                out.append(f"    failed {c.name}: value={_short(c.value)} expected={_short(c.expected)} tol={c.tolerance}")
        out.append(f"{self.assertions - self.failures}/{self.assertions} assertions passed")
        return "\n".join(out)


def _short(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return repr(_plain(v))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj


def _pairs(sc: Scenario):
    pairs = sc.params.get("pairs")
    if pairs is None:
        names = list(sc.functions)
        if len(names) < 2:
            raise ScenarioError("needs two functions or params.pairs", field="functions")
        a, b = names[:2]
        pairs = [[a, b], [b, a]]
    return [(a, b) for a, b in pairs]


def _abs_c(f, g, p, ip_smooth):
    if not ip_smooth:
        return None
    if p == 1.0:
        return abs(l1_terms(f, g)[0])
    return abs(lp_functional(f, g, p))


def _bj_check(sc: Scenario, rec: Record):
    p, tol = sc.outer_p, sc.tolerance
    exp_orth = sc.expect.get("orthogonal", {})
    exp_c = sc.expect.get("abs_c", {})
    smooth = sc.inner.is_smooth
    for a, b in _pairs(sc):
        f, g = sc.function(a), sc.function(b)
        key = f"{a},{b}"
        orc = bj_oracle(f, g, p, tol)
        entry = {"oracle": orc.to_dict()}
        if smooth:
            char = bj_characterization(f, g, p, tol)
            entry["characterization"] = char.to_dict()
            rec.check(f"{key}: characterization agrees with oracle", char.orthogonal == orc.orthogonal,
                      char.orthogonal, orc.orthogonal, tol)
        c = _abs_c(f, g, p, smooth)
        if c is not None:
            entry["abs_c"] = c
        rec.data[key] = entry
        if key in exp_orth:
            rec.check(f"{key}: orthogonal", orc.orthogonal == bool(exp_orth[key]), orc.orthogonal, exp_orth[key], tol)
        if key in exp_c:
            rec.close(f"{key}: |c|", c, float(exp_c[key]), tol)
    for name, s in sc.expect.get("cozero_structure", {}).items():
        got = cozero_structure(cozero_set(sc.function(name)), sc.space).value
        rec.data.setdefault("cozero_structure", {})[name] = got
        rec.check(f"cozero_structure({name})", got == s, got, s)


def _reproduce(sc: Scenario, rec: Record):
    if not sc.expect:
        raise ScenarioError("reproduce_example needs an expect block", field="expect")
    _bj_check(sc, rec)


def _smoothness(sc: Scenario, rec: Record):
    if sc.outer_p != 1.0:
        raise UnsupportedError("the smoothness experiment is for outer p = 1 (L^p is smooth for 1 < p < inf)")
    tol = sc.tolerance
    f = sc.function(sc.params.get("function"))
    s = smooth_l1(f)
    a = approx_smooth_l1(f)
    rec.data.update(status=s.status, approx_status=a.status, zero_measure=s.zero_measure, s0=s.s0)
    if not s.smooth:
        v1, v2 = s.separator_values
        atom = next(iter(s.atom))
        target = float(np.linalg.norm(f.values[s.s0], ord=f.codomain.p)) * f.space.weights[atom]
        rec.data.update(separator_values=[v1, v2], atom=atom, diameter_bound=a.diameter_bound)
        rec.close("T_h1(separator) = 0", abs(v1), 0.0, tol)
        rec.close("T_h2(separator) = ||f(s0)|| mu(A)", float(np.real(v2)), target, tol)
        rec.close("support-set diameter bound", a.diameter_bound, 2.0, tol)
    else:
        trials = int(sc.params.get("trials", 100))
        rng = rng_for(sc.seed, 31)
        fails = 0
        for _ in range(trials):
            g1 = orthogonal_correction(f, _random_like(rng, f), 1.0)
            g2 = orthogonal_correction(f, _random_like(rng, f), 1.0)
            fails += not right_additive_at(f, g1, g2, tol)
        rec.data["right_additivity_trials"] = trials
        rec.check("right additivity on corrected pairs", fails == 0, fails, 0)
    if "status" in sc.expect:
        rec.check("status", s.status == sc.expect["status"], s.status, sc.expect["status"])


def _random_like(rng, f):
    v = rng.standard_normal(f.values.shape)
    if f.codomain.is_complex:
        v = v + 1j * rng.standard_normal(f.values.shape)
    return SimpleFunction(f.space, f.codomain, v)


def _record_symmetry(sc: Scenario, rec: Record, rep, label=""):
    tol = sc.tolerance
    rec.data[label or "report"] = rep.to_dict()
    if rep.found:
        fwd, bwd = rep.replay()
        rec.check(f"{label}witness replays through the oracle", fwd.orthogonal and not bwd.orthogonal,
                  [fwd.orthogonal, bwd.orthogonal], [True, False], tol)
        expected = rep.detail.get("expected_residual")
        if expected is not None and rep.residual is not None:
            rec.close(f"{label}residual matches construction", float(np.real(rep.residual)), float(expected), tol)
    pre = label
    if "verdict" in sc.expect:
        rec.check(f"{pre}verdict", rep.verdict.value == sc.expect["verdict"], rep.verdict.value, sc.expect["verdict"])
    if "construction" in sc.expect:
        rec.check(f"{pre}construction", rep.construction == sc.expect["construction"],
                  rep.construction, sc.expect["construction"])
    if "residual" in sc.expect and rep.residual is not None:
        rec.close(f"{pre}residual", float(np.real(rep.residual)), float(sc.expect["residual"]), tol)


def _symmetry(claim):
    def run(sc: Scenario, rec: Record):
        f = sc.function(sc.params.get("function"))
        tol = sc.tolerance
        if sc.outer_p == 1.0:
            if claim is Claim.LEFT:
                rep = left_witness_l1(f, tol)
            else:
                rep = right_witness_l1(f, tol, B=sc.params.get("B"))
        else:
            left, right = lp_witnesses(f, sc.outer_p, tol)
            rep = left if claim is Claim.LEFT else right
        _record_symmetry(sc, rec, rep)
    return run


def _sequence(sc: Scenario, rec: Record):
    f = sc.function(sc.params.get("function"))
    rep = sequence_space_classify(f.values, sc.outer_p, sc.inner, sc.tolerance)
    _record_symmetry(sc, rec, rep)


def _converse(sc: Scenario, rec: Record):
    f = sc.function(sc.params.get("function"))
    trials = int(sc.params.get("trials", 200))
    claim = Claim(sc.params.get("claim", "left"))
    diagnostic = bool(sc.params.get("diagnostic", False))
    rep = partial_converse_check(f, sc.outer_p, trials, claim, seed=sc.seed, tol=sc.tolerance, diagnostic=diagnostic)
    rec.data["report"] = rep.to_dict()
    if rep.verdict is Outcome.HYPOTHESIS_VIOLATED:
        rec.data["note"] = "hypotheses of the partial converse do not hold; nothing asserted"
    elif not diagnostic:
        rec.check("no counterexample to the partial converse", not rep.found, rep.verdict.value, "no_witness_found")
    if "verdict" in sc.expect:
        rec.check("verdict", rep.verdict.value == sc.expect["verdict"], rep.verdict.value, sc.expect["verdict"])


def _fuzz(sc: Scenario, rec: Record):
    kw = {k: sc.params[k] for k in ("outer_ps", "inner_ps", "fields", "band") if k in sc.params}
    for k in ("outer_ps", "inner_ps", "fields"):
        if k in kw:
            kw[k] = tuple(kw[k])
    cfg = FuzzConfig(trials=int(sc.params.get("trials", 1000)), seed=sc.seed, **kw)
    fuzz_record(fuzz_equivalence(cfg), rec)


def fuzz_record(report, rec: Record):
    d = report.to_dict()
    rec.data.update(config=d["config"], summaries=d["summaries"], band_violations=d["band_violations"])
    band = report.config.band
    for s in report.summaries:
        rec.check(f"outer p = {s.outer_p}: no disagreement outside the band", s.in_band == s.disagreements,
                  s.worst_margin, f"<= {band}", band)


EXPERIMENT_RUNNERS = {
    "reproduce_example": _reproduce,
    "bj_check": _bj_check,
    "smoothness": _smoothness,
    "left_symmetry": _symmetry(Claim.LEFT),
    "right_symmetry": _symmetry(Claim.RIGHT),
    "fuzz_equivalence": _fuzz,
    "converse_check": _converse,
    "sequence_classify": _sequence,
}


def execute(sc: Scenario) -> Record:
    """Run the scenario's experiment; never touches the file system."""
    if sc.outer_p == 2.0 and sc.experiment in P2_EXCLUDED:
        raise UnsupportedError(P2_MESSAGE.format(experiment=sc.experiment))
    rec = Record(sc.name, sc.experiment, sc.seed, sc.tolerance)
    EXPERIMENT_RUNNERS[sc.experiment](sc, rec)
    return rec


def _stamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_scenarios(scenarios, out=None) -> Report:
    start = time.perf_counter()
    records = [execute(sc) for sc in scenarios]
    report = Report(records, time.perf_counter() - start, _stamp())
    if out is not None:
        report.write(out)
    return report


def run_scenario(path, overrides=None) -> Report:
    """Load ``path`` (or a built-in name prefixed ``builtin:``), apply overrides and run it.

    ``overrides`` may hold ``seed``, ``tol``, ``trials``, ``experiment`` and ``out``.
    The report is written to ``out``, defaulting to ``<name>.report.jsonl``.
    """
    o = dict(overrides or {})
    path = str(path)
    sc = builtin_scenario(path[len("builtin:"):]) if path.startswith("builtin:") else load_scenario(path)
    sc = sc.with_overrides(seed=o.get("seed"), tolerance=o.get("tol"),
                           experiment=o.get("experiment"), trials=o.get("trials"))
    out = o.get("out") or f"{sc.name}.report.jsonl"
    return run_scenarios([sc], out)
