"""Finite weighted point spaces.

A point of weight zero is a null set, so non-trivial null sets are available
without an explicit sigma-algebra. Every singleton of positive weight is an
atom, and up to null sets there are no others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class SetOfPoints:
    indices: frozenset

    def __init__(self, indices=()):
        idx = frozenset(int(i) for i in indices)
        object.__setattr__(self, "indices", idx)

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def __or__(self, other):
        return SetOfPoints(self.indices | other.indices)

    def __and__(self, other):
        return SetOfPoints(self.indices & other.indices)

    def __sub__(self, other):
        return SetOfPoints(self.indices - other.indices)

    def isdisjoint(self, other):
        return self.indices.isdisjoint(other.indices)

    def __repr__(self):
        return f"SetOfPoints({sorted(self.indices)})"


class CozeroStructure(str, Enum):
    NULL = "null"
    ONE_ATOM = "one_atom"
    TWO_ATOMS = "two_atoms"
    MORE = "more"


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    weights: np.ndarray
    points: tuple = ()

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError("a measure space needs a non-empty list of weights")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DomainError("weights must be finite and non-negative")
        w.setflags(write=False)
        pts = tuple(self.points) if self.points else tuple(range(w.size))
        if len(pts) != w.size:
            raise DimensionError(f"{len(pts)} point labels for {w.size} weights")
        if len(set(pts)) != len(pts):
            raise DomainError("point labels must be distinct")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        return (
            isinstance(other, MeasureSpace)
            and self.points == other.points
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.points, self.weights.tobytes()))

    @property
    def total(self):
        return float(self.weights.sum())

    def full(self) -> SetOfPoints:
        return SetOfPoints(range(len(self)))

    def index_of(self, label) -> int:
        return self.points.index(label)

    def check(self, s: SetOfPoints) -> SetOfPoints:
        bad = [i for i in s.indices if not 0 <= i < len(self)]
        if bad:
            raise DimensionError(f"indices {sorted(bad)} are not points of this space")
        return s

    def positive(self, s: SetOfPoints | None = None) -> SetOfPoints:
        """The positive-weight points of ``s`` (all points by default)."""
        s = self.full() if s is None else self.check(s)
        return SetOfPoints(i for i in s.indices if self.weights[i] > 0)

    def to_dict(self):
        return {"points": list(self.points), "weights": self.weights.tolist()}


def measure_of(s: SetOfPoints, space: MeasureSpace) -> float:
    space.check(s)
    return math.fsum(space.weights[i] for i in s.indices)


def atoms(space: MeasureSpace) -> list[SetOfPoints]:
    return [SetOfPoints([i]) for i in range(len(space)) if space.weights[i] > 0]


def cozero_structure(s: SetOfPoints, space: MeasureSpace) -> CozeroStructure:
    """Classify ``s`` by how many atoms it contains up to null sets."""
    k = len(space.positive(s))
    if k == 0:
        return CozeroStructure.NULL
    if k == 1:
        return CozeroStructure.ONE_ATOM
    if k == 2:
        return CozeroStructure.TWO_ATOMS
    return CozeroStructure.MORE
