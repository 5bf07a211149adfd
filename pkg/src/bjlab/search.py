"""Derivative-free and derivative-based minimizers for convex scalar functions.

All routines assume convexity of the objective on the bracket; under that
assumption the bracket always keeps the global minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SearchResult:
    x: np.ndarray
    fun: np.ndarray
    iterations: int


def section_search(fun, lo, hi, *, probes=2, xtol=0.0, max_iter=500):
    """Minimize a convex function independently on each row of a bracket.

    ``fun`` maps an array of shape ``(rows, probes + 2)`` to values of the
    same shape. Each iteration evaluates the row on an equispaced grid and
    keeps the two cells around the grid minimizer, shrinking the bracket by
    ``2 / (probes + 1)``. ``probes=2`` is classic ternary search.

    Iteration stops when every row is narrower than ``xtol`` or has reached
    floating-point resolution.
    """
    if probes < 2:
        raise ValueError("section search needs at least two interior probes")
    lo = np.atleast_1d(np.asarray(lo, dtype=float)).copy()
    hi = np.atleast_1d(np.asarray(hi, dtype=float)).copy()
    if lo.shape != hi.shape:
        raise ValueError("lo and hi must have the same shape")
    if np.any(hi < lo):
        raise ValueError("empty bracket")
    rows = lo.shape[0]
    t = np.linspace(0.0, 1.0, probes + 2)
    best_x = 0.5 * (lo + hi)
    best_f = np.full(rows, np.inf)
    idx = np.arange(rows)
    it = 0
    while it < max_iter:
        it += 1
        width = hi - lo
        grid = lo[:, None] + width[:, None] * t[None, :]
        vals = np.asarray(fun(grid), dtype=float)
        j = np.argmin(vals, axis=1)
        fj = vals[idx, j]
        better = fj < best_f
        best_f = np.where(better, fj, best_f)
        best_x = np.where(better, grid[idx, j], best_x)
        floor = 4.0 * _EPS * np.maximum(np.maximum(np.abs(lo), np.abs(hi)), _EPS)
        if np.all((width <= xtol) | (width <= floor)):
            break
        lo = grid[idx, np.maximum(j - 1, 0)]
        hi = grid[idx, np.minimum(j + 1, probes + 1)]
    return SearchResult(best_x, best_f, it)


def ternary_search(fun, lo, hi, *, xtol=1e-12, max_iter=500):
    """Scalar convenience wrapper: returns ``(argmin, min)`` of a convex ``fun``."""
    res = section_search(
        lambda grid: np.vectorize(fun, otypes=[float])(grid),
        lo,
        hi,
        probes=2,
        xtol=xtol,
        max_iter=max_iter,
    )
    return float(res.x[0]), float(res.fun[0])


def bisect_increasing(deriv, lo, hi, *, max_iter=200):
    """Root of a nondecreasing function on ``[lo, hi]`` by bisection.

    If ``deriv`` does not change sign on the bracket the endpoint closest to
    the sign change is returned. Iteration stops when the midpoint no longer
    moves in floating point.
    """
    lo = float(lo)
    hi = float(hi)
    if deriv(lo) >= 0:
        return lo
    if deriv(hi) <= 0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if deriv(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
