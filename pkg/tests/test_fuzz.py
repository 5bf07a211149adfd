import pytest

from bjlab.errors import DomainError
from bjlab.fuzz import FuzzConfig, fuzz_equivalence, oracle_tolerance


def test_rejects_zero_trials():
    with pytest.raises(DomainError):
        FuzzConfig(trials=0)
    with pytest.raises(DomainError):
        fuzz_equivalence(trials=0)


def test_oracle_tolerance_scaling():
    assert oracle_tolerance(1.0) == 1e-15
    assert oracle_tolerance(1.0, 0.5) == 1e-9
    assert oracle_tolerance(3.0, 0.5) == 1e-9
    assert oracle_tolerance(1.5) == pytest.approx(1e-24)
    assert oracle_tolerance(3.0) == pytest.approx(1e-18)


def test_small_campaign_passes_and_is_deterministic():
    a = fuzz_equivalence(trials=300, seed=7)
    b = fuzz_equivalence(trials=300, seed=7)
    assert a.passed
    assert a.to_dict() == b.to_dict()
    assert [s.trials for s in a.summaries] == [300, 300, 300]
    modes = a.summaries[0].modes
    assert set(modes) <= {"random", "orthogonal", "near", "boundary"} and sum(modes.values()) == 300
    assert fuzz_equivalence(trials=300, seed=8).to_dict() != a.to_dict()


def test_orthogonal_and_non_orthogonal_verdicts_both_occur():
    rep = fuzz_equivalence(trials=200, seed=1)
    for s in rep.summaries:
        assert 0 < s.orthogonal < s.trials


def test_band_violations_fail_the_report():
    rep = fuzz_equivalence(trials=200, seed=2, band=0.0, oracle_tol=1e-3)
    assert not rep.passed
    assert rep.to_dict()["band_violations"]
