"""Seeded fuzzing of the orthogonality characterizations against the definition oracle.

Random pairs are almost never close to orthogonal, so most trials are drawn
near the decision boundary: exact corrections onto the orthogonality
constraint, perturbations of those at log-uniform scales, and (for ``p = 1``)
pairs sitting on ``|c| = r``. A disagreement between the two deciders is
tolerated only when the characterization margin is within ``band``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bochner import (
    FUZZ_ZERO_TAU,
    bj_characterization,
    bj_oracle_many,
    l1_terms,
    lp_norm,
    oracle_tolerance,
    orthogonal_correction,
)
from .errors import DomainError
from .sampling import random_function, random_space, rng_for
from .scalar_spaces import ScalarSpace

MODES = ("random", "orthogonal", "near", "boundary")
MODE_WEIGHTS = (0.2, 0.25, 0.4, 0.15)


@dataclass(frozen=True)
class FuzzConfig:
    trials: int = 10_000
    outer_ps: tuple = (1.0, 1.5, 3.0)
    inner_ps: tuple = (1.5, 2.0, 3.0)
    n_points: tuple = (2, 6)
    dims: tuple = (1, 4)
    zero_fraction: float = 0.2
    fields: tuple = ("real",)
    seed: int = 0
    char_tol: float = 1e-12
    oracle_tol: float | None = None
    band: float = 1e-6
    perturbation_exponents: tuple = (-9.0, -1.0)

    def __post_init__(self):
        if int(self.trials) < 1:
            raise DomainError("fuzzing needs trials >= 1")


@dataclass
class Disagreement:
    outer_p: float
    inner_p: float
    field: str
    mode: str
    trial: int
    characterization: dict
    oracle: dict
    margin: float


@dataclass
class FuzzSummary:
    outer_p: float
    trials: int = 0
    agreements: int = 0
    disagreements: int = 0
    in_band: int = 0
    worst_margin: float = 0.0
    orthogonal: int = 0
    modes: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "outer_p": self.outer_p,
            "trials": self.trials,
            "agreements": self.agreements,
            "agreement_rate": self.agreements / self.trials if self.trials else 1.0,
            "disagreements": self.disagreements,
            "disagreements_in_band": self.in_band,
            "worst_disagreement_margin": self.worst_margin,
            "orthogonal_verdicts": self.orthogonal,
            "modes": dict(sorted(self.modes.items())),
        }


@dataclass
class FuzzReport:
    config: FuzzConfig
    summaries: list
    disagreements: list
    runtime: float

    @property
    def band_violations(self):
        return [d for d in self.disagreements if abs(d.margin) > self.config.band]

    @property
    def passed(self):
        return not self.band_violations

    def to_dict(self):
        c = self.config
        return {
            "config": {
                "trials": c.trials, "outer_ps": list(c.outer_ps), "inner_ps": list(c.inner_ps),
                "n_points": list(c.n_points), "dims": list(c.dims), "zero_fraction": c.zero_fraction,
                "fields": list(c.fields), "seed": c.seed, "char_tol": c.char_tol,
                "oracle_tol": c.oracle_tol, "band": c.band,
            },
            "summaries": [s.to_dict() for s in self.summaries],
            "band_violations": [vars(d) for d in self.band_violations],
            "passed": self.passed,
        }


def _draw_pair(rng, cfg, p):
    space = random_space(rng, *cfg.n_points, zero_fraction=cfg.zero_fraction)
    codomain = ScalarSpace(
        int(rng.integers(cfg.dims[0], cfg.dims[1] + 1)),
        float(rng.choice(cfg.inner_ps)),
        str(rng.choice(cfg.fields)),
    )
    f = random_function(rng, space, codomain)
    g = random_function(rng, space, codomain, zero_prob=0.2)
    mode = str(rng.choice(MODES, p=MODE_WEIGHTS))
    if mode == "random":
        return f, g, mode
    base = orthogonal_correction(f, g, p)
    if mode == "boundary":
        _, r = l1_terms(f, base) if p == 1.0 else (0.0, 0.0)
        if r > 0:
            sign = 1.0 if rng.random() < 0.5 else -1.0
            base = base + (sign * r / lp_norm(f, 1.0)) * f
        else:
            mode = "near"
    if mode in ("near", "boundary") and (mode == "near" or rng.random() < 0.5):
        h = random_function(rng, space, codomain, zero_prob=0.2)
        hn = lp_norm(h, p)
        bn = lp_norm(base, p) or lp_norm(f, p)
        if hn > 0:
            s = 10.0 ** rng.uniform(*cfg.perturbation_exponents)
            base = base + (s * bn / hn) * h
    return f, base, mode


def fuzz_equivalence(config: FuzzConfig | None = None, **overrides) -> FuzzReport:
    """Compare ``bj_l1``/``bj_lp`` with ``bj_oracle`` on ``config.trials`` pairs per outer exponent."""
    cfg = config or FuzzConfig()
    if overrides:
        cfg = FuzzConfig(**{**vars(cfg), **overrides})
    start = time.perf_counter()
    summaries = []
    disagreements = []
    for k, p in enumerate(cfg.outer_ps):
        p = float(p)
        rng = rng_for(cfg.seed, k, int(round(p * 1000)))
        summary = FuzzSummary(p)
        otol = cfg.oracle_tol if cfg.oracle_tol is not None else oracle_tolerance(p, cfg.band)
        trials = [_draw_pair(rng, cfg, p) for _ in range(int(cfg.trials))]
        oracle = bj_oracle_many([(f, g) for f, g, _ in trials], p, otol)
        for t, ((f, g, mode), orc) in enumerate(zip(trials, oracle)):
            char = bj_characterization(f, g, p, cfg.char_tol, FUZZ_ZERO_TAU)
            summary.trials += 1
            summary.modes[mode] = summary.modes.get(mode, 0) + 1
            summary.orthogonal += char.orthogonal
            if char.orthogonal == orc.orthogonal:
                summary.agreements += 1
                continue
            summary.disagreements += 1
            m = char.margin
            if abs(m) <= cfg.band:
                summary.in_band += 1
            summary.worst_margin = max(summary.worst_margin, abs(m))
            disagreements.append(
                Disagreement(p, f.codomain.p, f.codomain.field, mode, t, char.to_dict(), orc.to_dict(), m)
            )
        summaries.append(summary)
    return FuzzReport(cfg, summaries, disagreements, time.perf_counter() - start)
