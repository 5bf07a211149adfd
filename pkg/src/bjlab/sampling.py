"""Seeded random generators for spaces, vectors and simple functions."""

from __future__ import annotations

import math

import numpy as np

from .bochner import SimpleFunction
from .measure import MeasureSpace
from .scalar_spaces import ScalarSpace, norm_rows


def rng_for(seed, *keys):
    """Independent generator for a (seed, task keys) combination."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, keys)]))


def random_coords(rng, shape, complex_field=False):
    v = rng.standard_normal(shape)
    if complex_field:
        v = v + 1j * rng.standard_normal(shape)
    return v


def random_vector(rng, space: ScalarSpace):
    return random_coords(rng, space.dim, space.is_complex)


def random_unit_vector(rng, space: ScalarSpace):
    while True:
        v = random_vector(rng, space)
        n = norm_rows(v[None], space.p)[0]
        if n > 0:
            return v / n


def random_space(rng, n_min=2, n_max=6, zero_fraction=0.2, weight_range=(0.0, 2.0)) -> MeasureSpace:
    """A space of ``n_min..n_max`` points, at least ``zero_fraction`` of them null.

    At least one point keeps positive weight.
    """
    n = int(rng.integers(n_min, n_max + 1))
    lo, hi = weight_range
    w = rng.uniform(lo, hi, n)
    w[w == 0] = hi / 2
    k = min(max(math.ceil(zero_fraction * n), 1), n - 1)
    w[rng.choice(n, size=k, replace=False)] = 0.0
    return MeasureSpace(w)


def random_function(rng, space: MeasureSpace, codomain: ScalarSpace, zero_prob=0.3) -> SimpleFunction:
    """Random values, each point zeroed with probability ``zero_prob``; nonzero in ``L^p``."""
    n = len(space)
    v = random_coords(rng, (n, codomain.dim), codomain.is_complex)
    v[rng.random(n) < zero_prob] = 0
    pos = np.flatnonzero(space.weights > 0)
    if not np.any(v[pos]):
        v[rng.choice(pos)] = random_vector(rng, codomain)
    return SimpleFunction(space, codomain, v)


def structured_function(
    rng,
    codomain: ScalarSpace,
    cozero_atoms: int,
    zero_atoms: int = 0,
    null_points: int = 0,
    weight_range=(0.1, 2.0),
) -> SimpleFunction:
    """A function whose cozero set holds exactly ``cozero_atoms`` atoms.

    ``zero_atoms`` positive-weight points carry the value 0 and ``null_points``
    weight-zero points carry random values. Points are shuffled.
    """
    n = cozero_atoms + zero_atoms + null_points
    w = np.concatenate([
        rng.uniform(*weight_range, cozero_atoms + zero_atoms),
        np.zeros(null_points),
    ])
    v = random_coords(rng, (n, codomain.dim), codomain.is_complex)
    v[cozero_atoms:cozero_atoms + zero_atoms] = 0
    for i in range(cozero_atoms):
        while not np.any(v[i]):
            v[i] = random_vector(rng, codomain)
    perm = rng.permutation(n)
    return SimpleFunction(MeasureSpace(w[perm]), codomain, v[perm])
