import json
import math

import pytest

from bjlab.cli import main
from bjlab.errors import ScenarioError, UnsupportedError
from bjlab.runner import execute, run_scenario
from bjlab.scenario import BUILTIN_SCENARIOS, builtin_scenario, load_scenario, parse_scenario

GOOD = {
    "name": "demo",
    "space": {"weights": [1, 1]},
    "inner": {"dim": 2, "p": 2},
    "outer_p": 1,
    "functions": {"f": [[1, 0], [-1, 0]], "g": [[1, 1], [1, 0]]},
    "experiment": "bj_check",
    "seed": 3,
}


def write(tmp_path, data, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2) if not isinstance(data, str) else data)
    return path


def body(path):
    return path.read_text().split("\n", 1)[1]


@pytest.mark.parametrize("name", list(BUILTIN_SCENARIOS))
def test_builtins_pass(name):
    rec = execute(builtin_scenario(name))
    assert rec.checks and rec.passed, [c for c in rec.checks if not c.passed]


def test_two_atom_builtin_values():
    rec = execute(builtin_scenario("two-atom-hilbert"))
    checks = {c.name: c for c in rec.checks}
    hit = [c for name, c in checks.items() if "g,f" in name and isinstance(c.value, float)]
    assert any(math.isclose(c.value, 1 - 2**-0.5, abs_tol=1e-9) for c in hit)


def test_parse_complex_and_scalar_rows():
    sc = parse_scenario({**GOOD, "inner": {"dim": 1, "p": 2, "field": "complex"},
                         "functions": {"f": [[1, 2], 3], "g": [[0, 1], [[1, 0]]]}})
    assert sc.function("f").values[:, 0].tolist() == [1 + 2j, 3]
    assert sc.function("g").values[:, 0].tolist() == [1j, 1]
    sc = parse_scenario({**GOOD, "space": [1, 0]})
    assert sc.space.weights.tolist() == [1, 0]


@pytest.mark.parametrize("patch, field", [
    ({"functions": {"f": [[1, 0]]}}, "functions.f"),
    ({"experiment": "nope"}, "experiment"),
    ({"outer_p": 0.5}, "outer_p"),
    ({"seed": -1}, "seed"),
    ({"tolerance": 0}, "tolerance"),
    ({"bogus": 1}, "bogus"),
    ({"inner": {"dim": 2, "p": 2}, "functions": {"f": [[[1, 0], 0], [0, 0]]}}, "functions.f"),
])
def test_parse_diagnostics(tmp_path, patch, field):
    path = write(tmp_path, {**GOOD, **patch})
    with pytest.raises(ScenarioError) as e:
        load_scenario(path)
    assert e.value.field == field
    assert e.value.line is not None


def test_missing_field_and_bad_json(tmp_path):
    data = dict(GOOD)
    del data["space"]
    with pytest.raises(ScenarioError, match="field 'space'"):
        parse_scenario(data)
    path = write(tmp_path, '{\n  "name": "x",\n  "space": [1,\n}')
    with pytest.raises(ScenarioError) as e:
        load_scenario(path)
    assert e.value.line == 4


def test_tolerance_precedence(tmp_path, monkeypatch):
    path = write(tmp_path, GOOD)
    assert load_scenario(path).tolerance == 1e-9
    monkeypatch.setenv("BJLAB_TOL", "1e-6")
    assert load_scenario(path).tolerance == 1e-6
    filed = write(tmp_path, {**GOOD, "tolerance": 1e-4}, "t.json")
    assert load_scenario(filed).tolerance == 1e-4
    rep = run_scenario(filed, {"tol": 1e-3, "out": tmp_path / "r.jsonl"})
    assert rep.records[0].tolerance == 1e-3
    monkeypatch.setenv("BJLAB_TOL", "abc")
    with pytest.raises(ScenarioError):
        load_scenario(path)
    assert main(["run", str(path), "--out", str(tmp_path / "x.jsonl")]) == 2


def test_exit_codes(tmp_path, capsys):
    good = write(tmp_path, {**GOOD, "expect": {"orthogonal": {"f,g": True}}})
    assert main(["run", str(good), "--out", str(tmp_path / "a.jsonl")]) == 0
    bad_expect = write(tmp_path, {**GOOD, "experiment": "reproduce_example",
                                  "expect": {"orthogonal": {"f,g": False}}}, "b.json")
    assert main(["run", str(bad_expect), "--out", str(tmp_path / "b.jsonl")]) == 1
    broken = write(tmp_path, {**GOOD, "functions": {"f": [[1, 0]]}}, "c.json")
    assert main(["run", str(broken)]) == 2
    err = capsys.readouterr().err
    assert "field 'functions.f'" in err and "line" in err
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_p2_exclusion(tmp_path, capsys):
    path = write(tmp_path, {**GOOD, "outer_p": 2, "experiment": "left_symmetry"})
    with pytest.raises(UnsupportedError, match="excluded"):
        execute(load_scenario(path))
    assert main(["run", str(path)]) == 2
    assert "p = 2 is excluded" in capsys.readouterr().err


def test_deterministic_bodies(tmp_path):
    for k in (1, 2):
        assert main(["examples", "--out", str(tmp_path / f"e{k}.jsonl")]) == 0
    assert body(tmp_path / "e1.jsonl") == body(tmp_path / "e2.jsonl")
    lines = [json.loads(x) for x in (tmp_path / "e1.jsonl").read_text().splitlines()]
    assert lines[0]["kind"] == "header" and lines[-1]["kind"] == "summary"
    assert lines[-1]["passed"] and lines[-1]["failures"] == 0
    assert len(lines) == len(BUILTIN_SCENARIOS) + 2


def test_overrides(tmp_path):
    path = write(tmp_path, GOOD)
    rep = run_scenario(path, {"seed": 11, "experiment": "smoothness", "out": tmp_path / "o.jsonl"})
    r = rep.records[0]
    assert (r.seed, r.experiment) == (11, "smoothness")
    with pytest.raises(ScenarioError):
        run_scenario(path, {"trials": 0})
    with pytest.raises(ScenarioError):
        run_scenario("builtin:nope")


def test_fuzz_command(tmp_path):
    out = tmp_path / "f.jsonl"
    assert main(["fuzz", "--trials", "50", "--seed", "4", "--out", str(out)]) == 0
    again = tmp_path / "g.jsonl"
    main(["fuzz", "--trials", "50", "--seed", "4", "--out", str(again)])
    assert body(out) == body(again)
    rec = json.loads(out.read_text().splitlines()[1])
    assert [s["trials"] for s in rec["data"]["summaries"]] == [50, 50, 50]


def test_fuzz_scenario_and_converse(tmp_path):
    fz = write(tmp_path, {**GOOD, "experiment": "fuzz_equivalence", "params": {"trials": 40, "outer_ps": [1, 3]}})
    assert main(["run", str(fz), "--out", str(tmp_path / "fz.jsonl")]) == 0
    cv = write(tmp_path, {**GOOD, "space": [1, 0], "experiment": "converse_check",
                          "params": {"trials": 30, "function": "g"}}, "cv.json")
    assert main(["run", str(cv), "--out", str(tmp_path / "cv.jsonl")]) == 0
