"""Definition-based Birkhoff-James test shared by the vector and Bochner oracles.

The objective is the relative norm change ``R(lam) = N(f + lam g) / N(f) - 1``
for the mixed norm ``N(h) = (sum_s mu_s ||h_s||_p^q)^(1/q)``. A plain
``N(f + lam g) - N(f)`` loses every digit below ``eps * N(f)``, which hides the
quadratically small dips of nearly orthogonal pairs. Here each stage is
written as ``expm1(log1p(.))`` of a relative increment, so the error in ``R``
scales with ``|lam|`` instead of with ``N(f)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .search import section_search

_EPS = np.finfo(float).eps
REAL_PROBES = 16
COMPLEX_PROBES = 12


class NormChange:
    """Vectorized ``R(lam)`` for a batch of ``(f, g)`` problems.

    ``F`` and ``G`` have shape ``(batch, points, dim)`` and ``weights`` shape
    ``(batch, points)``; padding points carry weight 0 and zero values. A call
    with ``lam`` of shape ``(batch, k)`` evaluates problem ``b`` on row ``b``.
    With a single problem any ``lam`` shape is accepted.
    """

    def __init__(self, F, G, weights, p, q, is_complex):
        F = np.asarray(F)
        G = np.asarray(G)
        if F.ndim == 2:
            F, G = F[None], G[None]
            weights = np.asarray(weights)[None]
        self.is_complex = bool(is_complex)
        self.p = float(p)
        self.q = float(q)
        self.batch = F.shape[0]
        self.mu = np.asarray(weights, dtype=float)[:, None, :]
        self.F = F[:, None]
        self.G = G[:, None]
        self.nz = self.F != 0
        self.safe_F = np.where(self.nz, self.F, 1.0)
        self.abs_Fp = np.abs(self.F) ** self.p
        self.P = self.abs_Fp.sum(axis=-1)
        self.pos = self.P > 0
        self.safe_P = np.where(self.pos, self.P, 1.0)
        self.Pq = self.P ** (self.q / self.p)
        self.N0q = (self.Pq * self.mu).sum(axis=-1)
        self.any_zero = not bool(self.nz.all())
        self.any_null_row = not bool(self.pos.all())

    def __call__(self, lam):
        lam = np.asarray(lam)
        shape = lam.shape
        L = lam.reshape(self.batch, -1)[:, :, None, None]
        p, q = self.p, self.q
        with np.errstate(all="ignore"):
            lb = L * self.G
            z = lb / self.safe_F
            if self.is_complex:
                w = 2.0 * z.real + (z.real**2 + z.imag**2)
            else:
                w = z * (2.0 + z)
            np.maximum(w, -1.0, out=w)
            coord = self.abs_Fp * np.expm1((0.5 * p) * np.log1p(w))
            # Far from f the increments are not small and the log1p chain
            # would take roots of cancelled quantities; direct sums are exact
            # enough there.
            new_abs = np.abs(self.F + lb) ** p
            far = (w < -0.5) | ~np.isfinite(coord)
            if self.any_zero:
                far |= ~self.nz
            if far.any():
                coord = np.where(far, new_abs - self.abs_Fp, coord)
            u = coord.sum(axis=-1) / self.safe_P
            np.maximum(u, -1.0, out=u)
            per_point = self.Pq * np.expm1((q / p) * np.log1p(u))
            far_u = u < -0.5
            if self.any_null_row:
                far_u |= ~self.pos
            if far_u.any():
                direct = new_abs.sum(axis=-1) ** (q / p) - self.Pq
                per_point = np.where(far_u, direct, per_point)
            E = (per_point * self.mu).sum(axis=-1)
            ratio = E / self.N0q
            R = np.expm1(np.log1p(np.maximum(ratio, -1.0)) / q)
            far_r = ratio < -0.5
            if far_r.any():
                newq = ((new_abs.sum(axis=-1) ** (q / p)) * self.mu).sum(axis=-1)
                R = np.where(far_r, (newq / self.N0q) ** (1.0 / q) - 1.0, R)
        return R.reshape(shape)


@dataclass(frozen=True)
class OracleMinimum:
    f_norm: float
    min_norm: float
    drop: float
    argmin: complex | float


BATCH_CHUNK = 512
COMPLEX_BATCH_CHUNK = 32


def _mixed(A, mu, p, q):
    return float(np.dot(mu, (np.abs(A) ** p).sum(axis=-1) ** (q / p)) ** (1.0 / q)) if A.size else 0.0


def _prepare(F, G, weights, p, q, is_complex, tol):
    """Normalized data and search parameters, or a finished ``OracleMinimum``."""
    mu = np.asarray(weights, dtype=float)
    keep = mu > 0
    dtype = complex if is_complex else float
    F = np.asarray(F)[keep].astype(dtype)
    G = np.asarray(G)[keep].astype(dtype)
    mu = mu[keep]
    sF = float(np.max(np.abs(F))) if F.size else 0.0
    sG = float(np.max(np.abs(G))) if G.size else 0.0
    if sF == 0.0:
        return OracleMinimum(0.0, 0.0, 0.0, 0.0)
    Fn = F / sF
    n0 = _mixed(Fn, mu, p, q)
    f_norm = sF * n0
    if sG == 0.0:
        return OracleMinimum(f_norm, f_norm, 0.0, 0.0)
    Gn = G / sG
    ng = _mixed(Gn, mu, p, q)
    bound = 2.0 * n0 / ng * (1.0 + 1e-12)
    scale = max(1.0, f_norm)
    xtol = max(bound * tol * scale / (8.0 * f_norm), 4.0 * _EPS * bound)
    return Fn, Gn, mu, f_norm, sF / sG, bound, xtol


def _finish(f_norm, ratio, r_min, lam):
    if r_min >= 0.0:
        r_min, lam = 0.0, 0.0
    with np.errstate(over="ignore"):
        arg = lam * ratio if lam != 0 else lam
    return OracleMinimum(f_norm, f_norm * (1.0 + r_min), -f_norm * r_min + 0.0, arg)


def minimize_norm_change(F, G, weights, p, q, is_complex, tol):
    """Global minimum of ``lam -> N(f + lam g)`` over the scalar field.

    The minimizer lies in ``|lam| <= 2 N(f) / N(g)``; outside that disk the
    triangle inequality gives ``N(f + lam g) > N(f)``. The search resolution
    bounds the Lipschitz error of the reported minimum by ``tol/4`` in units
    of ``max(1, N(f))``.
    """
    return minimize_norm_change_many([(F, G, weights)], p, q, tol, is_complex)[0]


def minimize_norm_change_many(problems, p, q, tol, is_complex=False):
    """``minimize_norm_change`` for many ``(F, G, weights)`` triples at once.

    Problems of equal shape are searched as the rows of one batched section
    search. A row may keep shrinking after it has converged while others
    finish, so minima can differ from single calls at rounding level.
    ``tol`` is a scalar or one tolerance per problem.
    """
    out = [None] * len(problems)
    tols = np.broadcast_to(np.asarray(tol, dtype=float), (len(problems),))
    todo = []
    for i, (F, G, w) in enumerate(problems):
        prep = _prepare(F, G, w, p, q, is_complex, float(tols[i]))
        if isinstance(prep, OracleMinimum):
            out[i] = prep
        else:
            todo.append((i, prep))
    by_shape = {}
    for item in todo:
        by_shape.setdefault(item[1][0].shape, []).append(item)
    size = COMPLEX_BATCH_CHUNK if is_complex else BATCH_CHUNK
    chunks = [
        group[c:c + size]
        for _, group in sorted(by_shape.items())
        for c in range(0, len(group), size)
    ]
    for chunk in chunks:
        F = np.stack([pr[0] for _, pr in chunk])
        G = np.stack([pr[1] for _, pr in chunk])
        mu = np.stack([pr[2] for _, pr in chunk])
        bound = np.array([pr[5] for _, pr in chunk])
        xtol = np.array([pr[6] for _, pr in chunk])
        objective = NormChange(F, G, mu, p, q, is_complex)
        if is_complex:
            fun, lam = _nested_complex(objective, bound, xtol)
        else:
            res = section_search(objective, -bound, bound, probes=REAL_PROBES, xtol=xtol)
            fun, lam = res.fun, res.x
        for b, (i, prep) in enumerate(chunk):
            arg = complex(lam[b]) if is_complex else float(lam[b])
            out[i] = _finish(prep[3], prep[4], float(fun[b]), arg)
    return out


def _nested_complex(objective, bound, xtol):
    """Minimize each problem over ``lam = a + ib``: outer search in ``a`` of ``min_b``.

    Partial minimization of a jointly convex function is convex, so the outer
    search is again a convex section search. The inner searches of all
    problems and all outer probes run as one batch.
    """
    rows = bound.shape[0]
    idx = np.arange(rows)
    best_r = np.full(rows, np.inf)
    best_lam = np.zeros(rows, dtype=complex)

    def outer(a_grid):
        k = a_grid.shape[1]
        a = a_grid.reshape(rows * k, 1)

        def inner_fun(b_grid):
            m = b_grid.shape[1]
            lam = (a + 1j * b_grid).reshape(rows, k * m)
            return objective(lam).reshape(rows * k, m)

        inner = section_search(
            inner_fun, np.repeat(-bound, k), np.repeat(bound, k), probes=COMPLEX_PROBES, xtol=np.repeat(xtol, k)
        )
        fun = inner.fun.reshape(rows, k)
        b = inner.x.reshape(rows, k)
        j = np.argmin(fun, axis=1)
        fj = fun[idx, j]
        better = fj < best_r
        best_r[better] = fj[better]
        best_lam[better] = a_grid[idx, j][better] + 1j * b[idx, j][better]
        return fun

    section_search(outer, -bound, bound, probes=COMPLEX_PROBES, xtol=xtol)
    return best_r, best_lam
